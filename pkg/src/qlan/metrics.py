"""Distances: trace norm, classical L1 against the Gaussian by quadrature,
the exact classical-quantum distance over box cells, and the blockwise
distance for the reverse channel."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channels as ch
from . import gaussian as gs
from . import tableaux as tb


def trace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Sum of absolute eigenvalues of the Hermitian difference."""
    return float(np.abs(np.linalg.eigvalsh(A - B)).sum())


def _gaussian_density(pts: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    dim = len(mean)
    inv = np.linalg.inv(cov)
    diff = pts - mean
    expo = -0.5 * np.einsum("ni,ij,nj->n", diff, inv, diff)
    return np.exp(expo) / math.sqrt((2 * math.pi) ** dim * np.linalg.det(cov))


def _box_nodes(lo: np.ndarray, hi: np.ndarray, order: int):
    xs, ws = np.polynomial.legendre.leggauss(order)
    dim = len(lo)
    axes = [0.5 * (hi[i] + lo[i]) + 0.5 * (hi[i] - lo[i]) * xs for i in range(dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wmesh = np.meshgrid(*([ws] * dim), indexing="ij")
    wgrid = np.ones(len(pts))
    for wm in wmesh:
        wgrid = wgrid * wm.ravel()
    wgrid *= math.prod((hi[i] - lo[i]) / 2 for i in range(dim))
    return pts, wgrid


def _adaptive_box_integral(fn, lo, hi, tol=1e-6, orders=(8, 16, 32)) -> float:
    prev = None
    for order in orders:
        pts, wgrid = _box_nodes(lo, hi, order)
        val = float((fn(pts) * wgrid).sum())
        if prev is not None and abs(val - prev) <= tol:
            return val
        prev = val
    return prev


def _check_disjoint(cells) -> None:
    boxes = sorted(((tuple(c.lo), tuple(c.hi)) for c in cells))
    for a in range(len(boxes)):
        for b in range(a + 1, len(boxes)):
            lo_a, hi_a = boxes[a]
            lo_b, hi_b = boxes[b]
            if lo_b[0] >= hi_a[0] - 1e-15:
                break
            if all(lo_b[k] < hi_a[k] - 1e-15 and lo_a[k] < hi_b[k] - 1e-15
                   for k in range(len(lo_a))):
                raise ValueError(f"overlapping boxes {boxes[a]} and {boxes[b]}")


def classical_l1(
    cells, mean: np.ndarray, cov: np.ndarray, tol: float = 1e-6
) -> float:
    """L1 distance between the piecewise-constant box mixture and the
    Gaussian: per-box quadrature of |height - density| plus the Gaussian mass
    outside all boxes."""
    _check_disjoint(cells)
    total = 0.0
    inside = 0.0
    for c in cells:
        volume = math.prod(float(h - l) for l, h in zip(c.lo, c.hi))
        height = c.weight / volume
        total += _adaptive_box_integral(
            lambda pts: np.abs(height - _gaussian_density(pts, mean, cov)),
            c.lo,
            c.hi,
            tol=tol,
        )
        inside += ch.gaussian_box_mass(c.lo, c.hi, mean, cov)
    return total + max(0.0, 1.0 - inside)


@dataclass(frozen=True)
class DistanceReport:
    """Total distance with its named diagnostic components; the components
    dominate the total by the triangle inequality."""

    total: float
    classical: float
    quantum_sup: float
    atypical: float
    truncation_budget: float
    config: dict = field(default_factory=dict)

    def components_sum(self) -> float:
        return self.classical + self.quantum_sup + self.atypical


def cq_distance(out: ch.ClassicalQuantumState, limit: gs.LimitState,
                tol: float = 1e-6) -> DistanceReport:
    """Exact trace-norm distance between the channel output and the Gaussian
    limit.  On each box only the scalar Gaussian density varies, so the
    integrand needs one Hermitian eigensolve per quadrature node."""
    _check_disjoint(out.cells)
    Phi = limit.quantum
    total = 0.0
    inside = 0.0
    classical = 0.0
    qsup = 0.0
    for c in out.cells:
        volume = math.prod(float(h - l) for l, h in zip(c.lo, c.hi))
        height = c.weight / volume
        B = height * c.quantum

        def integrand(pts):
            dens = _gaussian_density(pts, limit.mean, limit.cov)
            return np.array(
                [np.abs(np.linalg.eigvalsh(dv * Phi - B)).sum() for dv in dens]
            )

        total += _adaptive_box_integral(integrand, c.lo, c.hi, tol=tol)
        classical += _adaptive_box_integral(
            lambda pts: np.abs(height - _gaussian_density(pts, limit.mean, limit.cov)),
            c.lo,
            c.hi,
            tol=tol,
        )
        inside += ch.gaussian_box_mass(c.lo, c.hi, limit.mean, limit.cov)
        qsup = max(qsup, trace_distance(Phi, c.quantum / float(np.trace(c.quantum).real)))
    outside = max(0.0, 1.0 - inside)
    total += outside + out.neglected_mass
    classical += outside
    return DistanceReport(
        total=total,
        classical=classical,
        quantum_sup=qsup,
        atypical=out.neglected_mass,
        truncation_budget=out.truncation_budget,
        config={"n": out.n, "d": out.d},
    )


def sn_distance(
    recon: list[tuple[tb.Diagram, float, np.ndarray]],
    blocks: list[ch.BlockData],
) -> float:
    """Blockwise trace distance between the reconstructed state and the model:
    sum over diagrams of || w_lambda block - p_lambda rho_lambda ||_1, the
    multiplicity factors cancelling; diagrams absent from the enumerated set
    contribute their weight."""
    model = {bd.lam: (bd.weight, bd.state.matrix) for bd in blocks}
    seen = set()
    total = 0.0
    for lam, w, rho in recon:
        seen.add(lam)
        if lam in model:
            p, sigma = model[lam]
            total += float(np.abs(np.linalg.eigvalsh(w * rho - p * sigma)).sum())
        else:
            total += w
    for lam, (p, _sigma) in model.items():
        if lam not in seen:
            total += p
    return total
