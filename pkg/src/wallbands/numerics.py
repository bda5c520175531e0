"""Numeric kernel: dense Hermitian eigensolver, periodic quadrature, scalar
minimization and log-log order fitting.

Everything here is pure; callers may run any number of operations
concurrently.  The eigensolver is backed by LAPACK via scipy; the contract
(ascending real spectrum, orthonormal vectors, residual bounds) is what is
normative, not the provider.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from .errors import BracketError, ConvergenceFailure, DegenerateFit

Array = np.ndarray

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense Hermitian matrix; Hermiticity is asserted at construction."""

    entries: Array
    meta: dict | None = None

    def __post_init__(self):
        h = np.asarray(self.entries)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"expected square matrix, got shape {h.shape}")
        scale = float(np.max(np.abs(h))) if h.size else 0.0
        dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
        if dev > HERMITICITY_RTOL * max(scale, 1e-300):
            raise ValueError(f"matrix is not Hermitian: max|H - H^*| = {dev:.3e}, max|H| = {scale:.3e}")
        object.__setattr__(self, "entries", np.ascontiguousarray(h, dtype=complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenResult:
    """Ascending real spectrum, optionally with orthonormal eigenvector columns."""

    values: Array
    vectors: Array | None = None

    def check_contract(self, h: HermitianMatrix, residual_tol: float = 1e-9) -> None:
        """Assert the residual and orthonormality bounds against the source matrix."""
        assert np.all(np.diff(self.values) >= -1e-14 * max(1.0, np.max(np.abs(self.values))))
        if self.vectors is None:
            return
        hn = float(np.linalg.norm(h.entries))
        res = h.entries @ self.vectors - self.vectors * self.values[None, :]
        assert np.max(np.linalg.norm(res, axis=0)) <= residual_tol * max(hn, 1e-300)
        gram = self.vectors.conj().T @ self.vectors
        assert np.max(np.abs(gram - np.eye(h.dim))) <= 1e-10


def eigh(h: HermitianMatrix, want_vectors: bool = False) -> EigenResult:
    """Full spectrum of a Hermitian matrix, ascending, multiplicities included.

    Degeneracies are expected (band crossings) and never an error.
    """
    try:
        if want_vectors:
            w, v = sla.eigh(h.entries, check_finite=False)
            return EigenResult(values=w, vectors=v)
        w = sla.eigh(h.entries, eigvals_only=True, check_finite=False)
        return EigenResult(values=w, vectors=None)
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK does not fail on Hermitian input
        raise ConvergenceFailure(str(exc)) from exc


def eigvalsh(entries: Array) -> Array:
    """Eigenvalues of a raw Hermitian array (hot-path variant, no wrapping)."""
    try:
        return sla.eigh(entries, eigvals_only=True, check_finite=False)
    except sla.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure(str(exc)) from exc


# ---- quadrature ----

def quad_periodic(f, cell: tuple[float, float], nodes: tuple[int, int]):
    """Tensor-product trapezoid rule over one periodicity cell.

    For a cell-periodic integrand the trapezoid rule on a uniform grid is
    spectrally accurate, and coincides with the left-endpoint rule; we use
    the latter.  `f` must accept meshgrid arrays.
    """
    a1, a2 = cell
    n1, n2 = nodes
    if n1 < 2 or n2 < 2:
        raise ValueError("need at least 2 nodes per axis")
    x1 = np.arange(n1) * (a1 / n1)
    x2 = np.arange(n2) * (a2 / n2)
    vals = f(x1[:, None], x2[None, :])
    vals = np.broadcast_to(np.asarray(vals), (n1, n2))
    return vals.mean() * a1 * a2


def quad_periodic_1d(f, length: float, nodes: int):
    """1D variant of `quad_periodic` for single-axis integrals."""
    if nodes < 2:
        raise ValueError("need at least 2 nodes")
    x = np.arange(nodes) * (length / nodes)
    vals = np.broadcast_to(np.asarray(f(x)), (nodes,))
    return vals.mean() * length


# ---- scalar minimization ----

def minimize_scalar(f, bracket: tuple[float, float], tol: float = 1e-10,
                    coarse: int = 64) -> tuple[float, float]:
    """Minimize a continuous scalar function on a finite bracket.

    A coarse scan locates the basin (guarding against non-unimodal traps in
    branch extremization), then a bounded golden/parabolic refinement runs to
    `tol`.  Callers negate `f` to maximize.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"invalid bracket ({lo}, {hi})")
    ts = np.linspace(lo, hi, coarse)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    sub_lo = ts[max(i - 1, 0)]
    sub_hi = ts[min(i + 1, coarse - 1)]
    res = sopt.minimize_scalar(f, bounds=(sub_lo, sub_hi), method="bounded",
                               options={"xatol": tol})
    t_star, f_star = float(res.x), float(res.fun)
    # keep whichever of the scan/refinement is better (refinement can stall on kinks)
    if vals[i] < f_star:
        t_star, f_star = float(ts[i]), float(vals[i])
    return t_star, f_star


# ---- order fitting ----

def fit_order(samples, drop_head: int = 0) -> tuple[float, float]:
    """Least-squares slope of log(err) vs log(eps) with coefficient of determination.

    `samples` is a sequence of (eps, err) pairs; the `drop_head` largest-eps
    points are discarded first.  Any err <= 0 raises DegenerateFit, which
    callers treat as exact agreement (order infinity).
    """
    pairs = sorted(((float(e), float(r)) for e, r in samples), key=lambda p: -p[0])
    pairs = pairs[drop_head:]
    if len(pairs) < 3:
        raise ValueError("need at least 3 samples after drop_head")
    eps = np.array([p[0] for p in pairs])
    err = np.array([p[1] for p in pairs])
    if np.any(err <= 0.0):
        raise DegenerateFit("nonpositive error in order fit (exact agreement?)")
    x, y = np.log(eps), np.log(err)
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fit = design @ np.array([slope, intercept])
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2
