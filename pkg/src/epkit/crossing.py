"""1-D scan analysis: branch matching, crossing classification, transitions.

A scan produces an unordered eigenvalue pair per point; greedy continuity
matching turns it into two branches. Classification then inspects the
matched real and imaginary differences:

  LZ  - real parts avoid while imaginary parts cross (real-dominated
        coupling);
  WB  - real parts cross (transversally, or by sticking together over a
        finite interval) while imaginary parts stay separated or bifurcate
        around the contact region (imaginary-dominated coupling).

Sticking renders as a run of gaps at rounding level, so contact is judged
against ``gap_floor`` rather than exact zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import diagonalize, overlap, DiscreteField
from .toymodel import ToyParams, build_hamiltonian, eigvalues_scan

LZ = "LZ"
WB = "WB"

AMBIGUITY_TOL = 1e-14


class UnclassifiableScanError(RuntimeError):
    """Raised when neither the LZ nor the WB pattern fits a scan."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass
class ScanTrajectory:
    """Continuity-matched eigenvalue branches over a strictly increasing scan."""

    ts: np.ndarray
    branch_a: np.ndarray
    branch_b: np.ndarray
    vectors_a: Optional[np.ndarray] = None  # (N, 2) unit eigenvectors, if tracked
    vectors_b: Optional[np.ndarray] = None
    ambiguous: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.branch_a = np.asarray(self.branch_a, dtype=complex)
        self.branch_b = np.asarray(self.branch_b, dtype=complex)
        n = self.ts.size
        if n < 3:
            raise ValueError("a scan needs at least 3 points")
        if self.branch_a.size != n or self.branch_b.size != n:
            raise ValueError("branches must match the scan length")
        if not np.all(np.diff(self.ts) > 0):
            raise ValueError("scan values must be strictly increasing")


@dataclass
class ClassReport:
    label: str
    re_min_gap: float
    im_min_gap: float
    re_cross_points: list[float]
    im_cross_points: list[float]
    bifurcation_edges: Optional[tuple[float, float]] = None


def match_branches(ts, pairs, vectors=None) -> ScanTrajectory:
    """Greedy continuity matching of per-point unordered eigenvalue pairs.

    At each step the pairing minimizing the summed jump is chosen; when
    both pairings agree within ``AMBIGUITY_TOL`` the previous ordering is
    kept and the point index is flagged. ``vectors`` (N, 2, 2), ordered
    like ``pairs``, are permuted alongside when given.
    """
    ts = np.asarray(ts, dtype=float)
    pairs = np.asarray(pairs, dtype=complex)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pairs must have shape (N, 2)")
    if vectors is not None:
        vectors = np.asarray(vectors, dtype=complex)
        if vectors.shape != (pairs.shape[0], 2, 2):
            raise ValueError("vectors must have shape (N, 2, 2)")

    n = pairs.shape[0]
    a = np.empty(n, dtype=complex)
    b = np.empty(n, dtype=complex)
    va = np.empty((n, 2), dtype=complex) if vectors is not None else None
    vb = np.empty((n, 2), dtype=complex) if vectors is not None else None
    ambiguous: list[int] = []

    a[0], b[0] = pairs[0]
    if vectors is not None:
        va[0], vb[0] = vectors[0]
    for k in range(1, n):
        lp, lm = pairs[k]
        keep = abs(lp - a[k - 1]) + abs(lm - b[k - 1])
        swap = abs(lm - a[k - 1]) + abs(lp - b[k - 1])
        if abs(keep - swap) <= AMBIGUITY_TOL:
            ambiguous.append(k)
            chosen_swap = False
        else:
            chosen_swap = swap < keep
        if chosen_swap:
            a[k], b[k] = lm, lp
        else:
            a[k], b[k] = lp, lm
        if vectors is not None:
            if chosen_swap:
                va[k], vb[k] = vectors[k][1], vectors[k][0]
            else:
                va[k], vb[k] = vectors[k][0], vectors[k][1]

    return ScanTrajectory(ts, a, b, va, vb, ambiguous)


def sweep_toy(p: ToyParams, alphas, with_vectors: bool = True) -> ScanTrajectory:
    """Scan the toy model over alpha and return matched branches."""
    alphas = np.asarray(alphas, dtype=float)
    if with_vectors:
        pairs = np.empty((alphas.size, 2), dtype=complex)
        vectors = np.empty((alphas.size, 2, 2), dtype=complex)
        for k, al in enumerate(alphas):
            s = diagonalize(build_hamiltonian(float(al), p))
            pairs[k] = (s.lambda_plus, s.lambda_minus)
            vectors[k] = (s.v_plus, s.v_minus)
        return match_branches(alphas, pairs, vectors)
    lp, lm = eigvalues_scan(alphas, p)
    return match_branches(alphas, np.stack([lp, lm], axis=1))


def _contact_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    k = 0
    n = mask.size
    while k < n:
        if mask[k]:
            start = k
            while k + 1 < n and mask[k + 1]:
                k += 1
            runs.append((start, k))
        k += 1
    return runs


def _component_analysis(ts: np.ndarray, d: np.ndarray, gap_floor: float) -> dict:
    absd = np.abs(d)
    contact_mask = absd <= gap_floor
    runs = _contact_runs(contact_mask)
    interior_runs = [r for r in runs if r[0] > 0 and r[1] < d.size - 1]

    # transversal sign changes between adjacent separated points
    cross_points: list[float] = []
    sign_change = False
    for k in range(d.size - 1):
        if contact_mask[k] or contact_mask[k + 1]:
            continue
        if d[k] * d[k + 1] < 0:
            sign_change = True
            t0, t1 = ts[k], ts[k + 1]
            cross_points.append(float(t0 - d[k] * (t1 - t0) / (d[k + 1] - d[k])))
    # interior contact runs count as crossings (sticking or tangency at EPs)
    for start, stop in interior_runs:
        cross_points.append(float(ts[start]))
        if stop != start:
            cross_points.append(float(ts[stop]))

    contact = bool(contact_mask.any())
    ends_separated = absd[0] > gap_floor and absd[-1] > gap_floor
    ends_coincide = absd[0] <= gap_floor and absd[-1] <= gap_floor
    return {
        "min_gap": float(absd.min()),
        "max_gap": float(absd.max()),
        "cross_points": sorted(cross_points),
        "crossed": sign_change or (contact and ends_separated),
        "avoided": (not sign_change) and (not contact),
        "bifurcated": contact and ends_coincide and absd.max() > gap_floor,
    }


def classify(traj: ScanTrajectory, gap_floor: float = 1e-9,
             edge_factor: float = 5.0) -> ClassReport:
    """Label a matched scan as Landau-Zener (LZ) or width bifurcation (WB).

    Raises :class:`UnclassifiableScanError` when both components cross or
    both avoid (which happens exactly at the transition point).

    ``bifurcation_edges`` brackets the region where the imaginary gap
    exceeds ``edge_factor`` times its baseline (the scan median, floored
    at ``gap_floor``); reported for WB scans only, and only when the
    region is resolved.
    """
    d = traj.branch_a - traj.branch_b
    re = _component_analysis(traj.ts, d.real, gap_floor)
    im = _component_analysis(traj.ts, d.imag, gap_floor)

    if re["avoided"] and im["crossed"]:
        label = LZ
    elif re["crossed"] and (im["avoided"] or im["bifurcated"]):
        label = WB
    else:
        raise UnclassifiableScanError(
            "scan fits neither the LZ nor the WB pattern",
            diagnostics={"re": re, "im": im},
        )

    edges = None
    if label == WB:
        imd = np.abs(d.imag)
        baseline = max(float(np.median(imd)), gap_floor)
        above = imd > edge_factor * baseline
        if above.any():
            first = int(np.argmax(above))
            last = int(above.size - 1 - np.argmax(above[::-1]))
            edges = (float(traj.ts[first]), float(traj.ts[last]))

    return ClassReport(
        label=label,
        re_min_gap=re["min_gap"],
        im_min_gap=im["min_gap"],
        re_cross_points=re["cross_points"],
        im_cross_points=im["cross_points"],
        bifurcation_edges=edges,
    )


def beta_transition(p: ToyParams, beta_window: tuple[float, float], *,
                    alpha_range: tuple[float, float] = (0.2, 1.0),
                    n_alpha: int = 801, tol: float = 1e-3,
                    gap_floor: float = 1e-9) -> float:
    """Bisect the LZ-to-WB transition coefficient beta_c in a window.

    ``p.beta`` is ignored; the scan setup (alpha range and resolution) is
    held fixed while beta is bisected on the classification label. Raises
    ``ValueError`` when both window ends carry the same label.
    """
    lo, hi = float(beta_window[0]), float(beta_window[1])
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError("beta window must satisfy 0 <= lo < hi <= 1")
    alphas = np.linspace(alpha_range[0], alpha_range[1], n_alpha)

    def label_at(beta: float) -> str:
        traj = sweep_toy(p.with_beta(beta), alphas, with_vectors=False)
        return classify(traj, gap_floor=gap_floor).label

    lab_lo, lab_hi = label_at(lo), label_at(hi)
    if lab_lo == lab_hi:
        raise ValueError(
            f"no transition in window: label {lab_lo} at both ends ({lo}, {hi})"
        )
    if lab_lo == WB:  # orient so LZ sits below
        lo, hi = hi, lo

    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        try:
            lab = label_at(mid)
        except UnclassifiableScanError:
            # the midpoint sits exactly on the transition
            return mid
        if lab == LZ:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def overlap_curve(traj: ScanTrajectory) -> np.ndarray:
    """Eigenstate overlap |<v_a, v_b>| along the scan (unit vectors)."""
    if traj.vectors_a is None or traj.vectors_b is None:
        raise ValueError("trajectory carries no eigenvectors")
    return np.array([
        overlap(DiscreteField(va), DiscreteField(vb))
        for va, vb in zip(traj.vectors_a, traj.vectors_b)
    ])


def overlap_peaks(traj: ScanTrajectory, floor: float = 1e-6) -> list[float]:
    """Scan positions of local maxima of the eigenstate overlap.

    Maxima at or below ``floor`` are ignored, so fully decoupled scans
    report no peaks.
    """
    o = overlap_curve(traj)
    peaks = [
        float(traj.ts[k])
        for k in range(1, o.size - 1)
        if o[k] > o[k - 1] and o[k] > o[k + 1] and o[k] > floor
    ]
    return peaks
