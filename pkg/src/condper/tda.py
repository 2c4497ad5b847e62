"""Vietoris-Rips H1 persistence, periodicity scores and diagram metrics.

The H1 diagram is computed by reducing the coboundary matrix of the edges
(persistent cohomology over GF(2)) in reverse filtration order. Edges of the
minimum spanning tree are skipped outright since they pair with vertices in
H0 (the clearing optimisation), and the first pivot of every column is found
in one vectorised pass, so only columns whose pivot collides are reduced
explicitly. Simplices with filtration value above the cap are never built;
classes that survive to the cap die there.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from .embedding import PointCloud, as_cloud
from .errors import ContractError, ValidationError

SQRT3 = math.sqrt(3.0)

# cap on (columns x vertices) entries materialised per batch
_BATCH_ENTRIES = 2_000_000


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Finite (birth, death) pairs of one homology dimension, deaths capped."""

    pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    dimension: int = 1
    cap: float = SQRT3

    def __post_init__(self):
        pairs = np.array(self.pairs, dtype=float).reshape(-1, 2)
        if pairs.size:
            b, d = pairs[:, 0], pairs[:, 1]
            slack = 1e-12 * max(1.0, self.cap)
            if np.any(b < -slack) or np.any(d < b) or np.any(d > self.cap + slack):
                raise ValidationError("diagram pairs must satisfy 0 <= birth <= death <= cap")
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    @property
    def persistence(self) -> np.ndarray:
        return self.pairs[:, 1] - self.pairs[:, 0]


@dataclass(frozen=True, eq=False)
class ScoreValue:
    score: float
    max_persistence: float
    diagram: PersistenceDiagram


def _filtered_edges(X: np.ndarray, cap: float):
    n = X.shape[0]
    D = cdist(X, X)
    iu, ju = np.triu_indices(n, 1)
    length = D[iu, ju]
    keep = length <= cap
    iu, ju, length = iu[keep], ju[keep], length[keep]
    order = np.lexsort((ju, iu, length))
    iu, ju, length = iu[order], ju[order], length[order]
    rank = np.full((n, n), -1, dtype=np.int64)
    ids = np.arange(iu.size, dtype=np.int64)
    rank[iu, ju] = ids
    rank[ju, iu] = ids
    return iu, ju, length, rank


def _spanning_tree_mask(n: int, iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = np.zeros(iu.size, dtype=bool)
    merged = 0
    for e, (a, b) in enumerate(zip(iu.tolist(), ju.tolist())):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree[e] = True
            merged += 1
            if merged == n - 1:
                break
    return tree


class _Coboundary:
    """Triangle keys of edge cofaces.

    A triangle is keyed ``max_edge_rank * n + opposite_vertex``; ordering the
    keys orders triangles by diameter with a deterministic tie-break.
    """

    def __init__(self, iu, ju, rank):
        self.iu, self.ju, self.rank = iu, ju, rank
        self.n = rank.shape[0]
        self.none = np.int64(np.iinfo(np.int64).max)

    def keys(self, edges: np.ndarray) -> np.ndarray:
        n = self.n
        i = self.iu[edges]
        j = self.ju[edges]
        ri = self.rank[i]
        rj = self.rank[j]
        r = edges.astype(np.int64)[:, None]
        valid = (ri >= 0) & (rj >= 0)
        top = np.maximum(np.maximum(ri, rj), r)
        k = np.arange(n, dtype=np.int64)[None, :]
        opp = np.where(top == r, k, np.where(top == ri, j[:, None], i[:, None]))
        return np.where(valid, top * n + opp, self.none)

    def column(self, edge: int) -> np.ndarray:
        row = self.keys(np.array([edge]))[0]
        return np.sort(row[row != self.none])


# largest triangle-key range reduced with a dense bitmap (bytes)
_DENSE_KEY_LIMIT = 64_000_000


class _WorkColumn:
    """Dense GF(2) working column over the triangle-key range.

    Adding a column toggles its entries in place. The pivot only moves forward
    during a reduction, so the scan for the next set entry stays linear in the
    key range overall.
    """

    def __init__(self, size: int):
        self.bits = np.zeros(size, dtype=bool)

    def _next(self, start: int):
        bits = self.bits
        size = bits.size
        step = 4096
        while start < size:
            seg = bits[start:start + step]
            hit = int(seg.argmax())
            if seg[hit]:
                return start + hit
            start += step
            step = min(step * 2, 1 << 20)
        return None

    def reduce(self, col, pivot_owner, stored) -> np.ndarray:
        bits = self.bits
        bits[col] = True
        pivot = int(col[0])
        while pivot in pivot_owner:
            other = stored(pivot_owner[pivot])
            bits[other] = ~bits[other]
            pivot = self._next(pivot)
            if pivot is None:
                return np.empty(0, dtype=np.int64)
        out = pivot + np.flatnonzero(bits[pivot:])
        bits[out] = False
        return out.astype(np.int64)


def vr_persistence_h1(cloud, cap: float = SQRT3) -> PersistenceDiagram:
    """H1 diagram of the Vietoris-Rips filtration truncated at ``cap``.

    Zero-length pairs are dropped; classes alive at ``cap`` get death ``cap``.
    """
    if not (cap > 0 and math.isfinite(cap)):
        raise ValidationError(f"cap: must be positive and finite, got {cap!r}")
    X = np.asarray(as_cloud(cloud).points)
    n = X.shape[0]
    if n < 3:
        return PersistenceDiagram(np.empty((0, 2)), 1, cap)
    iu, ju, length, rank = _filtered_edges(X, cap)
    tree = _spanning_tree_mask(n, iu, ju)
    columns = np.flatnonzero(~tree)[::-1]  # reverse filtration order
    cob = _Coboundary(iu, ju, rank)

    pivot_owner: dict[int, int] = {}
    reduced: dict[int, np.ndarray] = {}
    pairs: list[tuple[float, float]] = []
    key_range = int(iu.size) * n
    work = _WorkColumn(key_range) if key_range <= _DENSE_KEY_LIMIT else None

    def stored(edge):
        col = reduced.get(edge)
        return col if col is not None else cob.column(edge)

    def reduce(edge):
        if work is not None:
            return work.reduce(cob.column(edge), pivot_owner, stored)
        col = cob.column(edge)
        while col.size and int(col[0]) in pivot_owner:
            col = np.setxor1d(col, stored(pivot_owner[int(col[0])]), assume_unique=True)
        return col

    batch = max(1, _BATCH_ENTRIES // n)
    for start in range(0, columns.size, batch):
        chunk = columns[start:start + batch]
        first = cob.keys(chunk).min(axis=1)
        for edge, pivot in zip(chunk.tolist(), first.tolist()):
            birth = float(length[edge])
            if pivot != cob.none and pivot in pivot_owner:
                col = reduce(edge)
                if col.size:
                    pivot = int(col[0])
                    reduced[edge] = col
                else:
                    pivot = cob.none
            if pivot == cob.none:
                if cap > birth:
                    pairs.append((birth, cap))
                continue
            pivot_owner[pivot] = edge
            death = float(length[pivot // n])
            if death > birth:
                pairs.append((birth, death))
    return PersistenceDiagram(np.array(pairs, dtype=float).reshape(-1, 2), 1, cap)


def max_persistence(diagram: PersistenceDiagram) -> float:
    if len(diagram) == 0:
        return 0.0
    return float(np.max(diagram.persistence))


def score_from_cloud(cloud, cap: float = SQRT3) -> ScoreValue:
    """Max H1 persistence divided by ``sqrt(3)``, clamped to [0, 1].

    The cloud must already be centred and normalised onto the unit sphere.
    """
    cloud = as_cloud(cloud)
    norms = np.linalg.norm(cloud.points, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ContractError("cloud points must have unit norm; apply center_normalize first")
    diagram = vr_persistence_h1(cloud, cap)
    mp = max_persistence(diagram)
    return ScoreValue(score=min(max(mp / SQRT3, 0.0), 1.0), max_persistence=mp, diagram=diagram)


def _matching_feasible(cost_ab, diag_a, diag_b, eps) -> bool:
    m, n = cost_ab.shape
    # left: A points then diagonal copies of B; right: B points then diagonal copies of A
    adj = np.zeros((m + n, n + m), dtype=bool)
    adj[:m, :n] = cost_ab <= eps
    adj[np.arange(m), n + np.arange(m)] = diag_a <= eps
    adj[m + np.arange(n), np.arange(n)] = diag_b <= eps
    adj[m:, n:] = True
    match = maximum_bipartite_matching(csr_matrix(adj), perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_distance(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exact bottleneck distance, points may be matched to the diagonal."""
    if d1.dimension != d2.dimension:
        raise ValidationError(
            f"diagrams have different homology dimensions ({d1.dimension} vs {d2.dimension})"
        )
    A, B = d1.pairs, d2.pairs
    diag_a = (A[:, 1] - A[:, 0]) / 2.0
    diag_b = (B[:, 1] - B[:, 0]) / 2.0
    if A.shape[0] == 0 and B.shape[0] == 0:
        return 0.0
    cost_ab = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2) if A.size and B.size else np.empty((A.shape[0], B.shape[0]))
    candidates = np.unique(np.concatenate([[0.0], cost_ab.ravel(), diag_a, diag_b]))
    lo, hi = 0, candidates.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(cost_ab, diag_a, diag_b, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def hausdorff_distance(a, b) -> float:
    a, b = as_cloud(a), as_cloud(b)
    if a.dimension != b.dimension:
        raise ValidationError(f"clouds live in different dimensions ({a.dimension} vs {b.dimension})")
    D = cdist(a.points, b.points)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def write_diagram_csv(diagram: PersistenceDiagram, fh) -> None:
    fh.write(f"# cap={diagram.cap!r}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["birth", "death"])
    for b, d in diagram.pairs:
        writer.writerow([f"{b:.12g}", f"{d:.12g}"])
