"""Plane-wave Galerkin eigensolver for the full 2D fiber operator
-Laplace + eps^alpha L + eps^(-3/2) V_eps on the periodicity cell with
quasiperiodic boundary conditions, plus the Dirichlet-strip reference bands.

Basis: e^{i (tau1 + 2 pi n / a1) x1} e^{i (tau2 + 2 pi q / a2) x2} with
|n| <= N, |q| <= Q, ordered n-major.  The perturbation L differentiates only
in x1, so its matrix elements close over the longitudinal wavenumbers
p_n = tau1 + 2 pi n / a1:

    L[(n,q),(n',q')] = p_n A11hat[n-n', q-q'] p_n' + (p_n + p_n') A1hat[...]
                       + A0hat[n-n', q-q'],

which reproduces the sesquilinear form
integral(A11 |D u|^2 + 2 A1 Re(D u conj(u)) + A0 |u|^2) with D = tau1 - i d/dx1
on the cell (randomized-vector identity enforced in the test suite; this is
what fixes the sign of the first-order term).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CutoffError
from .model import LatticeParams, OperatorConfig, QuasiMomentum, wall_fourier
from .numerics import HermitianMatrix, eigvalsh
from . import bloch1d

Array = np.ndarray

#: dense solves beyond this dimension are refused
DIM_CAP = 8000
DEFAULT_N = 16


def default_cutoffs(cfg: OperatorConfig, eps: float) -> tuple[int, int]:
    return DEFAULT_N, bloch1d.recommended_Q(cfg, eps)


def dim_of(N: int, Q: int) -> int:
    return (2 * N + 1) * (2 * Q + 1)


@dataclass(frozen=True)
class BandSample:
    """Eigenvalues inside an energy window, with 1-based global band indices."""

    tau: QuasiMomentum
    eps: float
    N: int
    Q: int
    values: Array
    indices: Array
    window: tuple[float, float]


def assemble_H(cfg: OperatorConfig, tau: QuasiMomentum, eps: float, N: int, Q: int,
               enforce_cap: bool = True) -> HermitianMatrix:
    """Dense Galerkin matrix of the fiber operator at quasimomentum tau."""
    dim = dim_of(N, Q)
    if enforce_cap and dim > DIM_CAP:
        raise CutoffError(f"dense dimension {dim} = (2*{N}+1)(2*{Q}+1) exceeds cap {DIM_CAP}")
    a1, a2 = cfg.lattice.a1, cfg.lattice.a2
    ns = np.arange(-N, N + 1)
    qs = np.arange(-Q, Q + 1)
    pn = tau.tau1 + 2 * np.pi * ns / a1
    kq = tau.tau2 + 2 * np.pi * qs / a2

    h = np.zeros((dim, dim), dtype=complex)
    nq = 2 * Q + 1

    # wall term: Toeplitz in q on each n-diagonal block
    vhat = np.asarray(wall_fourier(cfg.wall, eps, a2, np.arange(-2 * Q, 2 * Q + 1)))
    wall_block = vhat[(qs[:, None] - qs[None, :]) + 2 * Q] * eps ** -1.5
    qdiff = (qs[:, None] - qs[None, :]) + 2 * Q

    boxes = {}
    for name in ("A11", "A1", "A0"):
        if not cfg.coeffs.spec(name).is_zero():
            boxes[name] = cfg.coeffs.fourier_box(name, 2 * N, 2 * Q, cfg.lattice)

    scale = eps ** cfg.alpha
    for i, n_a in enumerate(ns):
        rows = slice(i * nq, (i + 1) * nq)
        for j, n_b in enumerate(ns):
            cols = slice(j * nq, (j + 1) * nq)
            dn = n_a - n_b + 2 * N
            block = None
            if "A11" in boxes:
                block = (pn[i] * pn[j]) * boxes["A11"][dn][qdiff]
            if "A1" in boxes:
                t = (pn[i] + pn[j]) * boxes["A1"][dn][qdiff]
                block = t if block is None else block + t
            if "A0" in boxes:
                t = boxes["A0"][dn][qdiff]
                block = t if block is None else block + t
            if block is not None:
                h[rows, cols] = scale * block
        h[rows, rows] += wall_block
    diag = (pn[:, None] ** 2 + kq[None, :] ** 2).ravel()
    h[np.diag_indices_from(h)] += diag

    dev = float(np.max(np.abs(h - h.conj().T)))
    hmax = float(np.max(np.abs(h)))
    if dev > 1e-12 * max(hmax, 1e-300):
        raise AssertionError(f"assembled fiber matrix not Hermitian: {dev:.3e} vs scale {hmax:.3e}")
    ok = Q >= bloch1d.minimum_Q(cfg, eps)
    if not ok:
        warnings.warn(f"cutoff Q={Q} below recommended {bloch1d.minimum_Q(cfg, eps)} at eps={eps}",
                      stacklevel=2)
    return HermitianMatrix(h, meta={"N": N, "Q": Q, "eps": eps, "cutoff_ok": ok})


def eigenvalues(cfg: OperatorConfig, tau: QuasiMomentum, eps: float, N: int, Q: int) -> Array:
    """Full ascending spectrum of the fiber matrix (hot path for scanning)."""
    return eigvalsh(assemble_H(cfg, tau, eps, N, Q).entries)


def bands_2d(cfg: OperatorConfig, tau: QuasiMomentum, eps: float, N: int, Q: int,
             window: tuple[float, float]) -> BandSample:
    """Band values inside an energy window with their global indices (1-based)."""
    emin, emax = window
    if not emin < emax:
        raise ValueError(f"empty window {window}")
    vals = eigenvalues(cfg, tau, eps, N, Q)
    mask = (vals >= emin) & (vals <= emax)
    idx = np.nonzero(mask)[0] + 1
    return BandSample(tau=tau, eps=eps, N=N, Q=Q, values=vals[mask], indices=idx,
                      window=(emin, emax))


def reference_bands(lattice: LatticeParams, tau1: float, count: int) -> list[tuple[int, int, float]]:
    """Lowest `count` Dirichlet-strip eigenvalues (tau1 + 2 pi n/a1)^2 + pi^2 p^2/a2^2.

    Returned as (n, p, E) ascending; exact ties keep (n, p) lexicographic order.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    a1, a2 = lattice.a1, lattice.a2
    entries: list[tuple[float, int, int]] = []
    bound = None
    n_range = 2
    while True:
        entries.clear()
        for n in range(-n_range, n_range + 1):
            long_part = (tau1 + 2 * math.pi * n / a1) ** 2
            p = 1
            while True:
                e = long_part + (math.pi * p / a2) ** 2
                if bound is not None and e > bound and p > 1:
                    break
                entries.append((e, n, p))
                p += 1
                if p > 4 * count + 8:
                    break
        entries.sort()
        bound = entries[min(count, len(entries)) - 1][0] * 1.0 + 1.0
        # enough margin when widening n cannot introduce anything below the cut
        edge = (tau1 + 2 * math.pi * (n_range + 1) / a1) ** 2
        edge_neg = (tau1 - 2 * math.pi * (n_range + 1) / a1) ** 2
        if min(edge, edge_neg) + (math.pi / a2) ** 2 > entries[count - 1][0]:
            break
        n_range *= 2
    return [(n, p, e) for e, n, p in entries[:count]]
