"""Exact and near-duplicate removal for document corpora.

Exact dedup hashes whitespace-normalized, case-folded text and keeps the
first document per hash. Near dedup estimates Jaccard similarity of word
shingle sets with MinHash signatures, clusters documents above a similarity
threshold and keeps one representative (the longest text) per cluster.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import Document

_MERSENNE_61 = (1 << 61) - 1

DEFAULT_SHINGLE_WORDS = 5
DEFAULT_NUM_PERMUTATIONS = 128
DEFAULT_JACCARD_THRESHOLD = 0.85
DEFAULT_SEED = 1


@dataclass(frozen=True)
class DedupRemoval:
    """One removed document and the id of its surviving representative."""

    removed_id: str
    kept_id: str
    stage: str

    def to_record(self) -> dict:
        return {"removed": self.removed_id, "kept": self.kept_id, "stage": self.stage}


@dataclass
class ShingleSignature:
    """MinHash signature of a document's word-shingle set."""

    doc_id: str
    minhash: tuple[int, ...]
    shingle_count: int

    def __post_init__(self) -> None:
        if self.shingle_count <= 0:
            raise ValueError("shingle_count must be positive")


def _normalize(text: str) -> str:
    return " ".join(text.split()).casefold()


def _exact_key(text: str) -> str:
    return hashlib.sha256(_normalize(text).encode("utf-8")).hexdigest()


def shingle_set(text: str, shingle_words: int) -> set[str]:
    """Word shingles of the normalized text; short texts yield one shingle."""
    if shingle_words < 1:
        raise ValueError("shingle_words must be >= 1")
    words = _normalize(text).split()
    if len(words) < shingle_words:
        return {" ".join(words)}
    return {" ".join(words[i : i + shingle_words]) for i in range(len(words) - shingle_words + 1)}


def _shingle_hash(shingle: str) -> int:
    digest = hashlib.blake2b(shingle.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % _MERSENNE_61


class MinHasher:
    """Reusable family of seeded universal-hash permutations."""

    def __init__(self, num_permutations: int = DEFAULT_NUM_PERMUTATIONS, seed: int = DEFAULT_SEED):
        if num_permutations < 1:
            raise ValueError("num_permutations must be >= 1")
        rng = random.Random(seed)
        self.num_permutations = num_permutations
        self._coeffs = [
            (rng.randrange(1, _MERSENNE_61), rng.randrange(0, _MERSENNE_61))
            for _ in range(num_permutations)
        ]

    def signature(self, doc_id: str, text: str, shingle_words: int = DEFAULT_SHINGLE_WORDS) -> ShingleSignature:
        shingles = shingle_set(text, shingle_words)
        hashes = [_shingle_hash(s) for s in shingles]
        minhash = tuple(
            min(((a * h + b) % _MERSENNE_61) for h in hashes) for a, b in self._coeffs
        )
        return ShingleSignature(doc_id=doc_id, minhash=minhash, shingle_count=len(shingles))


def estimate_jaccard(a: ShingleSignature, b: ShingleSignature) -> float:
    """Fraction of agreeing MinHash slots; unbiased Jaccard estimator."""
    if len(a.minhash) != len(b.minhash):
        raise ValueError("signatures must use the same permutation count")
    matches = sum(1 for x, y in zip(a.minhash, b.minhash) if x == y)
    return matches / len(a.minhash)


def exact_dedup(docs: Sequence[Document]) -> tuple[list[Document], list[DedupRemoval]]:
    """Collapse documents with identical normalized text; first one survives."""
    kept: list[Document] = []
    removals: list[DedupRemoval] = []
    first_by_key: dict[str, str] = {}
    for doc in docs:
        key = _exact_key(doc.cleaned or doc.raw)
        if key in first_by_key:
            removals.append(DedupRemoval(doc.id, first_by_key[key], stage="exact"))
        else:
            first_by_key[key] = doc.id
            kept.append(doc)
    return kept, removals


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def near_dedup(
    docs: Sequence[Document],
    shingle_words: int = DEFAULT_SHINGLE_WORDS,
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
    num_permutations: int = DEFAULT_NUM_PERMUTATIONS,
    seed: int = DEFAULT_SEED,
) -> tuple[list[Document], list[DedupRemoval]]:
    """Cluster documents with estimated Jaccard >= threshold; keep one each.

    The representative is the document with the longest (cleaned) text,
    ties broken by ascending id. Output preserves input order.
    """
    if not 0 < jaccard_threshold <= 1:
        raise ValueError("jaccard_threshold must be in (0, 1]")
    docs = list(docs)
    if not docs:
        return [], []

    hasher = MinHasher(num_permutations=num_permutations, seed=seed)
    signatures = [hasher.signature(d.id, d.cleaned or d.raw, shingle_words) for d in docs]

    uf = _UnionFind(len(docs))
    for i in range(len(docs)):
        for j in range(i + 1, len(docs)):
            if estimate_jaccard(signatures[i], signatures[j]) >= jaccard_threshold:
                uf.union(i, j)

    clusters: dict[int, list[int]] = {}
    for i in range(len(docs)):
        clusters.setdefault(uf.find(i), []).append(i)

    keep: set[int] = set()
    rep_of: dict[int, int] = {}
    for members in clusters.values():
        rep = min(members, key=lambda i: (-len(docs[i].cleaned or docs[i].raw), docs[i].id))
        keep.add(rep)
        for m in members:
            rep_of[m] = rep

    kept = [docs[i] for i in range(len(docs)) if i in keep]
    removals = [
        DedupRemoval(docs[i].id, docs[rep_of[i]].id, stage="near")
        for i in range(len(docs))
        if i not in keep
    ]
    return kept, removals


def dedup_corpus(
    docs: Sequence[Document],
    shingle_words: int = DEFAULT_SHINGLE_WORDS,
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
    num_permutations: int = DEFAULT_NUM_PERMUTATIONS,
    seed: int = DEFAULT_SEED,
) -> tuple[list[Document], list[DedupRemoval]]:
    """Exact pass followed by near-duplicate pass; removals from both stages."""
    exact_kept, removals = exact_dedup(docs)
    near_kept, near_removals = near_dedup(
        exact_kept,
        shingle_words=shingle_words,
        jaccard_threshold=jaccard_threshold,
        num_permutations=num_permutations,
        seed=seed,
    )
    return near_kept, removals + near_removals


def iter_report_lines(removals: Iterable[DedupRemoval]) -> Iterable[str]:
    """Dedup report lines: removed id, kept representative id, stage."""
    for r in removals:
        yield f"{r.removed_id}\t{r.kept_id}\t{r.stage}"
