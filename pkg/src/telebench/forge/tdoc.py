"""Working-group classification item sampling from labeled Tdocs."""

from __future__ import annotations

import logging
import random
from typing import Iterable, Sequence

from ..ingest import Document, segment_text
from .items import WORKING_GROUPS, TdocClassItem

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_TARGETS = (128,)


def make_tdoc_items(
    docs_with_wg_meta: Iterable[Document],
    per_wg_quota: int,
    seed: int = 0,
    segment_targets: Sequence[int] = DEFAULT_SEGMENT_TARGETS,
) -> list[TdocClassItem]:
    """Sample up to ``per_wg_quota`` labeled segments per working group.

    Each document is segmented and contributes segments under the working
    group named in its metadata (``working_group`` or ``wg``). Documents
    labeled outside the fixed group set are skipped with a warning. Sampling
    is deterministic for a given seed.
    """
    if per_wg_quota < 1:
        raise ValueError("per_wg_quota must be >= 1")
    pools: dict[str, list[str]] = {}
    for doc in docs_with_wg_meta:
        wg = (doc.meta.get("working_group") or doc.meta.get("wg") or "").strip().upper()
        if wg not in WORKING_GROUPS:
            logger.warning("document %s has unknown working group %r; skipped", doc.id, wg)
            continue
        text = doc.cleaned if doc.cleaned else doc.raw
        for segment in segment_text(text, segment_targets, doc_id=doc.id):
            pools.setdefault(wg, []).append(segment.text)

    rng = random.Random(seed)
    items: list[TdocClassItem] = []
    for wg in sorted(pools):
        pool = pools[wg]
        chosen = pool if len(pool) <= per_wg_quota else rng.sample(pool, per_wg_quota)
        items.extend(TdocClassItem(text=t, label=wg) for t in chosen)
    return items
