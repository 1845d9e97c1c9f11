"""Human-validation review service over forged benchmark items.

Reviewers pull pending items from a queue, submit accept / reject / edit
decisions, and export the accepted set. Decisions land in an append-only
JSONL journal (fsync per write, single-writer lock); replaying the journal
over the forged items reproduces queue and export state exactly, so a
service restart loses nothing.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .forge.items import McqItem, banned_token_violations, item_from_record
from .jsonl import iter_jsonl

logger = logging.getLogger(__name__)

VERDICTS = ("accept", "reject", "edit")


@dataclass
class ReviewDecision:
    item_id: str
    verdict: str
    reviewer: str
    timestamp: float
    edited_item: Optional[dict] = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")
        if self.verdict == "edit" and not self.edited_item:
            raise ValueError("edit decisions must carry the edited item")

    def to_record(self) -> dict:
        record = {
            "item_id": self.item_id,
            "verdict": self.verdict,
            "reviewer": self.reviewer,
            "timestamp": self.timestamp,
            "note": self.note,
        }
        if self.edited_item is not None:
            record["edited_item"] = self.edited_item
        return record

    @classmethod
    def from_record(cls, record: dict) -> "ReviewDecision":
        return cls(
            item_id=record["item_id"],
            verdict=record["verdict"],
            reviewer=record.get("reviewer", ""),
            timestamp=record.get("timestamp", 0.0),
            edited_item=record.get("edited_item"),
            note=record.get("note", ""),
        )


def load_journal(path: str | Path) -> list[ReviewDecision]:
    path = Path(path)
    if not path.exists():
        return []
    return [ReviewDecision.from_record(r) for r in iter_jsonl(path)]


def validate_edited_item(kind: str, edited: dict) -> list[str]:
    """Re-run the item invariants on an edit; returns badge warnings.

    Structural violations raise ValueError (the edit is refused). Banned
    tokens in an edited MCQ only produce a warning badge: a human reviewer
    outranks the generation-time filter.
    """
    payload = dict(edited)
    payload.setdefault("kind", kind)
    if payload["kind"] != kind:
        raise ValueError(f"edited item kind {payload['kind']!r} does not match {kind!r}")
    item = item_from_record(payload)
    if isinstance(item, McqItem):
        return [f"banned token: {v}" for v in banned_token_violations(item)]
    return []


class ReviewStore:
    """Items plus journal, with decisions serialized through one lock."""

    def __init__(self, items_path: str | Path, journal_path: str | Path):
        self.items_path = Path(items_path)
        self.journal_path = Path(journal_path)
        self._lock = threading.Lock()
        self.items: list[dict] = list(iter_jsonl(self.items_path))
        self._by_id = {item["item_id"]: item for item in self.items}
        self.decisions: dict[str, ReviewDecision] = {}
        for decision in load_journal(self.journal_path):
            self.decisions.setdefault(decision.item_id, decision)

    def queue(self, kind: str | None = None, limit: int | None = None) -> list[dict]:
        """Pending items in forge order, optionally filtered by kind."""
        pending = [
            item
            for item in self.items
            if item["item_id"] not in self.decisions
            and (kind is None or item["kind"] == kind)
        ]
        return pending[:limit] if limit else pending

    def decide(self, decision: ReviewDecision) -> list[str]:
        """Validate, journal and apply one decision; returns badge warnings."""
        with self._lock:
            item = self._by_id.get(decision.item_id)
            if item is None:
                raise KeyError(f"unknown item {decision.item_id!r}")
            if decision.item_id in self.decisions:
                raise FileExistsError(f"item {decision.item_id!r} already decided")
            warnings: list[str] = []
            if decision.verdict == "edit":
                warnings = validate_edited_item(item["kind"], decision.edited_item)
            self._append_journal(decision)
            self.decisions[decision.item_id] = decision
            return warnings

    def _append_journal(self, decision: ReviewDecision) -> None:
        self.journal_path.parent.mkdir(parents=True, exist_ok=True)
        line = json.dumps(decision.to_record(), ensure_ascii=False) + "\n"
        with open(self.journal_path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def stats(self) -> dict:
        counts = {"accept": 0, "reject": 0, "edit": 0}
        for decision in self.decisions.values():
            counts[decision.verdict] += 1
        counts["pending"] = len(self.items) - len(self.decisions)
        counts["total"] = len(self.items)
        return counts

    def accepted_items(self, kind: str | None = None) -> list[dict]:
        """Accepted (and edited) items with edits applied, forge order."""
        out = []
        for item in self.items:
            decision = self.decisions.get(item["item_id"])
            if decision is None or decision.verdict == "reject":
                continue
            if kind is not None and item["kind"] != kind:
                continue
            if decision.verdict == "edit":
                payload = dict(decision.edited_item)
                payload.setdefault("kind", item["kind"])
                payload["item_id"] = item["item_id"]
            else:
                payload = dict(item)
            payload.pop("review_status", None)
            out.append(payload)
        return out


class DecisionPayload(BaseModel):
    item_id: str
    verdict: str
    reviewer: str = ""
    edited_item: Optional[dict] = None
    note: str = ""


def create_review_app(
    items_path: str | Path,
    journal_path: str | Path,
    static_dir: str | Path | None = None,
    token: str | None = None,
) -> FastAPI:
    """Review API application backed by a journaled store."""
    store = ReviewStore(items_path, journal_path)
    app = FastAPI(title="telebench review")
    app.state.store = store

    def check_auth(request: Request) -> None:
        if token and request.headers.get("Authorization") != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.get("/api/queue", dependencies=[Depends(check_auth)])
    def get_queue(kind: str | None = None, limit: int | None = None):
        return {"items": store.queue(kind=kind, limit=limit), "stats": store.stats()}

    @app.post("/api/decisions", dependencies=[Depends(check_auth)])
    def post_decision(payload: DecisionPayload):
        try:
            decision = ReviewDecision(
                item_id=payload.item_id,
                verdict=payload.verdict,
                reviewer=payload.reviewer,
                timestamp=time.time(),
                edited_item=payload.edited_item,
                note=payload.note,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            warnings = store.decide(decision)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except FileExistsError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"decided": decision.item_id, "warnings": warnings, "stats": store.stats()}

    @app.get("/api/export", dependencies=[Depends(check_auth)])
    def get_export(kind: str | None = None):
        items = store.accepted_items(kind=kind)
        return {"kind": kind, "count": len(items), "items": items}

    @app.get("/api/stats", dependencies=[Depends(check_auth)])
    def get_stats():
        return store.stats()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve_review_api(
    items_path: str | Path,
    journal_path: str | Path,
    host: str = "127.0.0.1",
    port: int = 8321,
    static_dir: str | Path | None = None,
    token: str | None = None,
) -> None:
    """Run the review service until interrupted."""
    import uvicorn

    app = create_review_app(items_path, journal_path, static_dir=static_dir, token=token)
    uvicorn.run(app, host=host, port=port, log_level="info")
