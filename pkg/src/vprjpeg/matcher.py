"""Cosine-similarity retrieval of the best reference for each query.

Descriptors are stored as 32-bit floats; every dot product and norm
accumulates in 64-bit, so reports are byte-identical across runs and worker
counts. similarity_matrix builds its rows by calling score_list, which keeps
matrix and row-wise evaluation bit-identical by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptor import DescriptorSet

EPSILON = 1e-12


@dataclass(frozen=True)
class ScoreList:
    """Similarity of one query against every reference, in reference index order."""

    query_index: int
    scores: np.ndarray  # float64, length = reference count


@dataclass
class MatchRecord:
    query_index: int
    matched_ref_index: int
    score: float
    correct: bool | None = None  # filled during evaluation


def cosine_similarity(q: np.ndarray, r: np.ndarray) -> float:
    """dot(q, r) / (|q| |r|); 0.0 when either norm falls below epsilon."""
    qa = np.asarray(q, dtype=np.float64)
    ra = np.asarray(r, dtype=np.float64)
    if qa.shape != ra.shape or qa.ndim != 1:
        raise ValueError(f"dimension mismatch: {qa.shape} vs {ra.shape}")
    if not (np.all(np.isfinite(qa)) and np.all(np.isfinite(ra))):
        raise ValueError("non-finite descriptor entries")
    qn = np.linalg.norm(qa)
    rn = np.linalg.norm(ra)
    if qn < EPSILON or rn < EPSILON:
        return 0.0
    return float(np.dot(qa, ra) / (qn * rn))


def score_list(q: np.ndarray, refs: DescriptorSet, query_index: int = 0) -> ScoreList:
    """Cosine similarity of one query descriptor against a reference set."""
    qa = np.asarray(q, dtype=np.float64)
    if qa.ndim != 1 or qa.shape[0] != refs.dim:
        raise ValueError(f"dimension mismatch: query {qa.shape} vs references dim {refs.dim}")
    if refs.count == 0:
        raise ValueError("empty reference set")
    R = refs.vectors.astype(np.float64)
    qn = np.linalg.norm(qa)
    rn = np.linalg.norm(R, axis=1)
    scores = np.zeros(refs.count, dtype=np.float64)
    if qn >= EPSILON:
        valid = rn >= EPSILON
        scores[valid] = (R[valid] @ qa) / (qn * rn[valid])
    return ScoreList(query_index=query_index, scores=scores)


def best_match(scores: ScoreList) -> MatchRecord:
    """Argmax over the score list; ties resolve to the lowest reference index."""
    if scores.scores.size == 0:
        raise ValueError("empty score list")
    idx = int(np.argmax(scores.scores))  # np.argmax returns the first maximum
    return MatchRecord(
        query_index=scores.query_index,
        matched_ref_index=idx,
        score=float(scores.scores[idx]),
    )


def similarity_matrix(queries: DescriptorSet, refs: DescriptorSet) -> np.ndarray:
    """(query count x reference count) matrix; row i is score_list(queries[i], refs)."""
    if queries.dim != refs.dim:
        raise ValueError(f"dimension mismatch: queries dim {queries.dim} vs references dim {refs.dim}")
    out = np.empty((queries.count, refs.count), dtype=np.float64)
    for i in range(queries.count):
        out[i] = score_list(queries[i], refs, query_index=i).scores
    return out


def match_all(queries: DescriptorSet, refs: DescriptorSet) -> list[MatchRecord]:
    """Best match for every query, in query index order."""
    records = []
    for i in range(queries.count):
        records.append(best_match(score_list(queries[i], refs, query_index=i)))
    return records
