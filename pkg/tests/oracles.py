"""Reference implementations used only by tests.

Everything here is deliberately written the slow, obvious way (pure Python
loops, math module, nested lists) so the production code has an independent
route to check against. Keep these free of imports from the package under
test except for parameter containers.
"""

from __future__ import annotations

import math
from collections import Counter

EPS = 1e-12


def cosine(q, r) -> float:
    """Plain cosine similarity with the zero-norm guard."""
    dot = sum(float(a) * float(b) for a, b in zip(q, r))
    nq = math.sqrt(sum(float(a) ** 2 for a in q))
    nr = math.sqrt(sum(float(b) ** 2 for b in r))
    if nq < EPS or nr < EPS:
        return 0.0
    return dot / (nq * nr)


def similarity_matrix(queries, refs):
    """Naive double loop over descriptor rows."""
    return [[cosine(q, r) for r in refs] for q in queries]


def argmax_first(scores) -> int:
    """Exhaustive scan keeping the first maximum."""
    best_i = 0
    best = float(scores[0])
    for i, s in enumerate(scores):
        if float(s) > best:
            best = float(s)
            best_i = i
    return best_i


def shannon_entropy_bits(gray) -> float:
    """Histogram entropy via Counter, base 2."""
    counts = Counter(int(v) for row in gray for v in row)
    total = sum(counts.values())
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def grayscale_bt601(rgb):
    """Rounded BT.601 luma as nested lists."""
    out = []
    for row in rgb:
        out.append([
            int(round(0.299 * float(r) + 0.587 * float(g) + 0.114 * float(b)))
            for r, g, b in row
        ])
    return out


def hog(gray, resize: int, cell: int, block: int, stride: int, bins: int):
    """Per-pixel histogram-of-oriented-gradients oracle.

    Mirrors the documented contract, not the implementation: central
    differences with edge replication, unsigned angles folded into [0, 180),
    linear split between the two nearest bin centers (centers at multiples
    of 180/bins, wrapping), per-cell accumulation, 2-stage L2-Hys per block.
    """
    n = resize
    assert len(gray) == n and len(gray[0]) == n

    def px(y: int, x: int) -> float:
        y = min(max(y, 0), n - 1)
        x = min(max(x, 0), n - 1)
        return float(gray[y][x])

    cells = n // cell
    hist = [[[0.0] * bins for _ in range(cells)] for _ in range(cells)]
    width = 180.0 / bins
    for y in range(n):
        for x in range(n):
            gx = px(y, x + 1) - px(y, x - 1)
            gy = px(y + 1, x) - px(y - 1, x)
            mag = math.hypot(gx, gy)
            ang = math.degrees(math.atan2(gy, gx)) % 180.0
            t = ang / width
            lo = int(math.floor(t)) % bins
            hi = (lo + 1) % bins
            frac = t - math.floor(t)
            hist[y // cell][x // cell][lo] += mag * (1.0 - frac)
            hist[y // cell][x // cell][hi] += mag * frac

    blocks_per_side = (cells - block) // stride + 1
    out: list[float] = []
    for by in range(blocks_per_side):
        for bx in range(blocks_per_side):
            vec: list[float] = []
            for cy in range(by * stride, by * stride + block):
                for cx in range(bx * stride, bx * stride + block):
                    vec.extend(hist[cy][cx])
            norm = math.sqrt(sum(v * v for v in vec))
            if norm < EPS:
                out.extend(0.0 for _ in vec)
            else:
                clipped = [min(v / norm, 0.2) for v in vec]
                norm2 = math.sqrt(sum(v * v for v in clipped))
                out.extend(v / norm2 for v in clipped)
    return out


def pareto_flags(points):
    """O(n^2) dominance check over (bytes, accuracy) pairs.

    points: list of (percent, total_bytes, accuracy). A point is dominated
    iff some other point has strictly fewer bytes and strictly higher
    accuracy; returns {percent: optimal}.
    """
    flags = {}
    for p, b, a in points:
        dominated = any(
            ob < b and oa > a for op, ob, oa in points if op != p
        )
        flags[p] = not dominated
    return flags


def min_level_for_budget(totals, budget):
    """Exhaustive scan: smallest percent whose total fits the budget."""
    fitting = [p for p in sorted(totals) if totals[p] <= budget]
    return fitting[0] if fitting else None
