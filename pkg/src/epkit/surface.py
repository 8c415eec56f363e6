"""Riemann-surface atlases over a 2-D parameter plane, and loop monodromy.

Sheets are matched by row-major continuation: the first grid row left to
right, then every cell to the one in the previous row. The continuation
is deterministic and linear-time; the *position* of the resulting cuts is
path dependent, exactly as a branch cut should be, so tests downstream
assert topology (component counts, endpoints at the EPs, monodromy), not
exact geometry.

Cut extraction distinguishes:

  - matched cuts: grid edges where the matched assignment itself jumps
    (sheet values change discontinuously);
  - per-component seams: edges where the real (or imaginary) parts of the
    two matched sheets cross or touch. These carry the structure seen in
    the half-difference surfaces: the real seam joins the two EPs while
    the imaginary seams leave them outward.

All cut logic runs on the half-difference field (sheet1 - sheet2)/2 and
is therefore identical in raw and delta modes.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import principal_sqrt
from .epfind import EPLocation

Node = tuple[int, int]
Edge = tuple[Node, Node]

RAW = "raw"
DELTA = "delta"

IDENTITY = "identity"
SWAP = "swap"

END_MATCH_TOL = 1e-8


@dataclass
class CutSet:
    matched: list[Edge] = field(default_factory=list)
    re: list[Edge] = field(default_factory=list)
    im: list[Edge] = field(default_factory=list)

    def all_edges(self) -> list[Edge]:
        return list(dict.fromkeys(self.matched + self.re + self.im))


@dataclass
class SheetGrid:
    """Two continuity-matched eigenvalue sheets over a rectangular grid.

    ``sheet1[i, j]`` lives at (axis1[i], axis2[j]). In delta mode the
    sheets are the half-differences relative to the sheet average, so
    sheet2 == -sheet1 exactly.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    sheet1: np.ndarray
    sheet2: np.ndarray
    cut_cells: CutSet
    delta_mode: str
    missing: list[Node] = field(default_factory=list)


def connected_components(edges: Sequence[Edge]) -> list[set[Node]]:
    """Node sets of connected cut-edge groups.

    Two cut edges belong to the same component when they share a node or
    border the same grid plaquette: a seam crossing a column of cells flags
    one parallel edge per row, and plaquette adjacency chains those into
    one curve.
    """
    edges = list(edges)
    parent = list(range(len(edges)))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    def plaquettes(u: Node, v: Node) -> list[Node]:
        (i1, j1), (i2, j2) = u, v
        if j1 == j2:  # edge along axis1: borders cells (i, j-1) and (i, j)
            i = min(i1, i2)
            return [(i, j1 - 1), (i, j1)]
        i = i1  # edge along axis2: borders cells (i-1, j) and (i, j)
        return [(i - 1, min(j1, j2)), (i, min(j1, j2))]

    by_node: dict[Node, int] = {}
    by_cell: dict[Node, int] = {}
    for k, (u, v) in enumerate(edges):
        for node in (u, v):
            if node in by_node:
                union(k, by_node[node])
            by_node[node] = k
        for cell in plaquettes(u, v):
            if cell in by_cell:
                union(k, by_cell[cell])
            by_cell[cell] = k

    groups: dict[int, set[Node]] = {}
    for k, (u, v) in enumerate(edges):
        groups.setdefault(find(k), set()).update((u, v))
    return sorted(groups.values(), key=lambda s: sorted(s)[0])


def _sample_grid(sampler, axis1, axis2, threads):
    n1, n2 = axis1.size, axis2.size
    va = np.full((n1, n2), np.nan, dtype=complex)
    vb = np.full((n1, n2), np.nan, dtype=complex)
    missing: list[Node] = []

    def eval_row(i):
        row = []
        for j in range(n2):
            try:
                row.append(sampler(float(axis1[i]), float(axis2[j])))
            except Exception:
                row.append(None)
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(eval_row, range(n1)))
    else:
        rows = [eval_row(i) for i in range(n1)]

    for i in range(n1):
        for j in range(n2):
            got = rows[i][j]
            if got is None:
                missing.append((i, j))
            else:
                va[i, j], vb[i, j] = got
    return va, vb, missing


def _match_grid(va, vb, ok):
    """Row-major continuation; returns matched (a, b) fields."""
    n1, n2 = va.shape
    a = va.copy()
    b = vb.copy()
    for j in range(n2):
        for i in range(n1):
            if not ok[i, j]:
                continue
            if j > 0 and ok[i, j - 1]:
                ref_a, ref_b = a[i, j - 1], b[i, j - 1]
            elif i > 0 and ok[i - 1, j]:
                ref_a, ref_b = a[i - 1, j], b[i - 1, j]
            else:
                continue  # seed cell keeps sampler order
            keep = abs(va[i, j] - ref_a) + abs(vb[i, j] - ref_b)
            swap = abs(vb[i, j] - ref_a) + abs(va[i, j] - ref_b)
            if swap < keep:
                a[i, j], b[i, j] = vb[i, j], va[i, j]
    return a, b


def _grid_edges(n1, n2):
    for i in range(n1):
        for j in range(n2):
            if i + 1 < n1:
                yield (i, j), (i + 1, j)
            if j + 1 < n2:
                yield (i, j), (i, j + 1)


def _matched_cut_edges(e, ok, theta):
    n1, n2 = e.shape
    jumps = {0: [], 1: []}  # orientation: 0 along axis1, 1 along axis2
    per_edge = []
    for u, v in _grid_edges(n1, n2):
        if not (ok[u] and ok[v]):
            continue
        orient = 0 if u[0] != v[0] else 1
        jump = abs(e[u] - e[v])
        jumps[orient].append(jump)
        per_edge.append((u, v, orient, jump))
    med = {k: (float(np.median(js)) if js else 0.0) for k, js in jumps.items()}
    out = []
    for u, v, orient, jump in per_edge:
        if med[orient] > 0 and jump > theta * med[orient]:
            out.append((u, v))
    return out


def _component_seam_edges(d, ok, contact_rel, crossing_rel):
    """Edges where a component of the two sheets touches or crosses.

    ``d`` is the matched component difference on nodes. An edge belongs to
    the seam when an endpoint lies within ``contact_rel`` x max|d| of
    coincidence, or when d changes sign across the edge at small magnitude
    (large-magnitude flips are matching discontinuities, not seams).
    """
    scale = float(np.max(np.abs(d[ok]))) if ok.any() else 0.0
    if scale <= 0.0:
        return []
    tau = contact_rel * scale
    veto = crossing_rel * scale
    out = []
    for u, v in _grid_edges(*d.shape):
        if not (ok[u] and ok[v]):
            continue
        lo = min(abs(d[u]), abs(d[v]))
        if lo <= tau:
            out.append((u, v))
        elif d[u] * d[v] < 0 and lo <= veto:
            out.append((u, v))
    return out


def build_surface(sampler: Callable[[float, float], tuple[complex, complex]],
                  window: tuple[tuple[float, float], tuple[float, float]],
                  n1: int, n2: int, delta_mode: str = DELTA, *,
                  theta: float = 10.0, contact_rel: float = 1e-3,
                  crossing_rel: float = 0.05, threads: int = 1,
                  max_missing_frac: float = 0.01) -> SheetGrid:
    """Sample, match, and cut-extract the two eigenvalue sheets.

    Sampler failures mark cells missing (skipped by matching and cut
    extraction); more than ``max_missing_frac`` missing cells aborts.
    """
    if n1 < 16 or n2 < 16:
        raise ValueError("grid must be at least 16 x 16")
    if delta_mode not in (RAW, DELTA):
        raise ValueError(f"delta_mode must be '{RAW}' or '{DELTA}'")
    (p1lo, p1hi), (p2lo, p2hi) = window
    axis1 = np.linspace(p1lo, p1hi, n1)
    axis2 = np.linspace(p2lo, p2hi, n2)

    va, vb, missing = _sample_grid(sampler, axis1, axis2, threads)
    if len(missing) > max_missing_frac * n1 * n2:
        raise RuntimeError(
            f"{len(missing)} of {n1 * n2} cells failed to sample"
        )
    ok = np.ones((n1, n2), dtype=bool)
    for node in missing:
        ok[node] = False

    a, b = _match_grid(va, vb, ok)
    e = 0.5 * (a - b)

    cuts = CutSet(
        matched=_matched_cut_edges(e, ok, theta),
        re=_component_seam_edges(2.0 * e.real, ok, contact_rel, crossing_rel),
        im=_component_seam_edges(2.0 * e.imag, ok, contact_rel, crossing_rel),
    )

    if delta_mode == DELTA:
        sheet1, sheet2 = e, -e
    else:
        sheet1, sheet2 = a, b
    return SheetGrid(axis1, axis2, sheet1, sheet2, cuts, delta_mode, missing)


@dataclass(frozen=True)
class CircleLoop:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def point(self, t: float) -> tuple[float, float]:
        ang = 2.0 * math.pi * t
        return (self.center[0] + self.radius * math.cos(ang),
                self.center[1] + self.radius * math.sin(ang))

    def contains(self, xy: tuple[float, float]) -> bool:
        return math.hypot(xy[0] - self.center[0],
                          xy[1] - self.center[1]) < self.radius


@dataclass(frozen=True)
class PolylineLoop:
    """Closed polygonal loop (the last vertex connects back to the first)."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("a closed polyline needs at least 3 vertices")
        object.__setattr__(self, "vertices",
                           tuple((float(x), float(y)) for x, y in self.vertices))

    def _segments(self):
        verts = self.vertices
        return [(verts[k], verts[(k + 1) % len(verts)]) for k in range(len(verts))]

    def point(self, t: float) -> tuple[float, float]:
        # arc-length parameterization over [0, 1]
        segs = self._segments()
        lengths = [math.hypot(q[0] - p[0], q[1] - p[1]) for p, q in segs]
        total = sum(lengths)
        target = (t % 1.0) * total
        for idx, ((p, q), ell) in enumerate(zip(segs, lengths)):
            if target <= ell or idx == len(segs) - 1:
                frac = min(target / ell, 1.0) if ell > 0 else 0.0
                return (p[0] + frac * (q[0] - p[0]), p[1] + frac * (q[1] - p[1]))
            target -= ell
        return self.vertices[0]

    def contains(self, xy: tuple[float, float]) -> bool:
        # even-odd ray casting
        x, y = xy
        inside = False
        for (x1, y1), (x2, y2) in self._segments():
            if (y1 > y) != (y2 > y):
                xcross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xcross:
                    inside = not inside
        return inside


@dataclass
class LoopResult:
    """Outcome of continuing the eigenvalue pair around a closed loop."""

    permutation: str  # "identity" or "swap"
    n_steps: int
    max_step_jump: float  # peak jump-to-gap ratio over accepted steps
    enclosed_eps: list[EPLocation] = field(default_factory=list)


def encircle(sampler: Callable[[float, float], tuple[complex, complex]],
             loop, n_steps: int = 256, *, jump_factor: float = 0.2,
             max_halvings: int = 40,
             known_eps: Optional[Iterable[EPLocation]] = None) -> LoopResult:
    """Continue the eigenvalue pair around a closed loop and classify the
    monodromy permutation.

    Steps where the matched jump exceeds ``jump_factor`` times the current
    gap are halved adaptively; hitting the step floor raises (the loop
    passes too close to an EP to continue unambiguously).
    """
    if n_steps < 64:
        raise ValueError("n_steps must be >= 64")
    cache: dict[float, tuple[complex, complex]] = {}

    def sample(t: float) -> tuple[complex, complex]:
        if t not in cache:
            x, y = loop.point(t)
            la, lb = sampler(x, y)
            cache[t] = (complex(la), complex(lb))
        return cache[t]

    floor_dt = (1.0 / n_steps) * 0.5 ** max_halvings
    a0, b0 = sample(0.0)
    cur_a, cur_b = a0, b0
    t_cur = 0.0
    accepted = 1
    max_ratio = 0.0

    for target in np.linspace(0.0, 1.0, n_steps + 1)[1:]:
        stack = [float(target)]
        while stack:
            t_next = stack[-1]
            la, lb = sample(t_next)
            gap = abs(cur_a - cur_b)
            if gap == 0.0:
                raise RuntimeError(f"loop passes through an EP at t={t_cur}")
            keep = abs(la - cur_a) + abs(lb - cur_b)
            swap = abs(lb - cur_a) + abs(la - cur_b)
            na, nb = (lb, la) if swap < keep else (la, lb)
            jump = max(abs(na - cur_a), abs(nb - cur_b))
            if jump <= jump_factor * gap:
                cur_a, cur_b = na, nb
                t_cur = t_next
                accepted += 1
                max_ratio = max(max_ratio, jump / gap)
                stack.pop()
            else:
                if t_next - t_cur <= floor_dt:
                    raise RuntimeError(
                        "loop too close to EP: step floor reached at "
                        f"t={t_cur} without continuity"
                    )
                stack.append(0.5 * (t_cur + t_next))

    if abs(cur_a - a0) <= END_MATCH_TOL and abs(cur_b - b0) <= END_MATCH_TOL:
        permutation = IDENTITY
    elif abs(cur_a - b0) <= END_MATCH_TOL and abs(cur_b - a0) <= END_MATCH_TOL:
        permutation = SWAP
    else:
        raise RuntimeError(
            "loop continuation did not return to the starting pair"
        )

    enclosed = [ep for ep in (known_eps or [])
                if loop.contains((ep.p1, ep.p2))]
    return LoopResult(permutation, accepted, max_ratio, enclosed)


@dataclass(frozen=True)
class AnalyticOracle:
    """Multivalued reference functions with known branch structure.

    Two-point kind: +/- sqrt((z - z1)(z - z2)), the square-root pair with
    branch points at z1 and z2. Single-point kind: the N roots of
    (z - z0)^(1/N) (the first two are returned as the pair).
    """

    kind: str
    z1: complex = 0j
    z2: complex = 0j
    z0: complex = 0j
    order: int = 2

    @classmethod
    def two_point(cls, z1: complex, z2: complex) -> "AnalyticOracle":
        if complex(z1) == complex(z2):
            raise ValueError("two-point oracle needs distinct branch points")
        return cls(kind="two-point", z1=complex(z1), z2=complex(z2))

    @classmethod
    def single_point(cls, z0: complex, order: int = 2) -> "AnalyticOracle":
        if order < 2:
            raise ValueError("order must be >= 2")
        return cls(kind="single-point", z0=complex(z0), order=order)

    def branch_points(self) -> list[complex]:
        if self.kind == "two-point":
            return [self.z1, self.z2]
        return [self.z0]

    def sampler(self) -> Callable[[float, float], tuple[complex, complex]]:
        def sample(p1: float, p2: float) -> tuple[complex, complex]:
            return oracle_eval(self, complex(p1, p2))
        return sample


def oracle_eval(o: AnalyticOracle, z: complex) -> tuple[complex, complex]:
    """The two principal-branch values of the oracle at z.

    At a branch point both values are 0 (the degenerate case is left to
    the caller to detect via the vanishing gap).
    """
    z = complex(z)
    if o.kind == "two-point":
        s = principal_sqrt((z - o.z1) * (z - o.z2))
        return s, -s
    w = z - o.z0
    if w == 0:
        return 0j, 0j
    root = cmath.exp(cmath.log(w) / o.order)
    turn = cmath.exp(2j * cmath.pi / o.order)
    return root, root * turn
