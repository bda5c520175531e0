"""Fourier-Galerkin eigensolver for the reduced transverse operator
-d^2/dx2^2 + eps^(-3/2) V_eps on (0, a2) with quasiperiodic conditions, and
its comparison against the Dirichlet limit pi^2 p^2 / a2^2.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit
from .model import OperatorConfig, wall_fourier, wall_moments
from .numerics import HermitianMatrix, eigvalsh, fit_order
from .predictor import lambda_half_1d

Array = np.ndarray

Q_CAP = 4000


def recommended_Q(cfg: OperatorConfig, eps: float) -> int:
    """Default cutoff: ceil(6 a2 / (eps a3)), capped for dense solves.

    The continuous-but-not-smooth wall profiles have k^-2 Fourier decay; this
    rule keeps the truncated tail irrelevant at the tolerances used here.
    """
    return min(int(math.ceil(6.0 * cfg.lattice.a2 / (eps * cfg.wall.a3))), Q_CAP)


def minimum_Q(cfg: OperatorConfig, eps: float) -> int:
    return max(8, int(math.ceil(4.0 * cfg.lattice.a2 / (eps * cfg.wall.a3))))


@dataclass(frozen=True)
class Spectrum1D:
    tau2: float
    eps: float
    Q: int
    values: Array
    cutoff_ok: bool = True


def assemble_A(cfg: OperatorConfig, tau2: float, eps: float, Q: int) -> HermitianMatrix:
    """Galerkin matrix over e^{i (tau2 + 2 pi q / a2) x2}, q = -Q..Q.

    Diagonal carries the free part (tau2 + 2 pi q/a2)^2; the wall enters as the
    Toeplitz block eps^(-3/2) Vhat_eps(q - q'), Hermitian by conjugate symmetry.
    """
    a2 = cfg.lattice.a2
    q = np.arange(-Q, Q + 1)
    kin = (tau2 + 2 * np.pi * q / a2) ** 2
    coeffs = np.asarray(wall_fourier(cfg.wall, eps, a2, np.arange(-2 * Q, 2 * Q + 1)))
    h = coeffs[(q[:, None] - q[None, :]) + 2 * Q] * eps ** -1.5
    h[np.diag_indices_from(h)] += kin
    ok = Q >= minimum_Q(cfg, eps)
    if not ok:
        warnings.warn(f"cutoff Q={Q} below recommended {minimum_Q(cfg, eps)} at eps={eps}",
                      stacklevel=2)
    return HermitianMatrix(h, meta={"cutoff_ok": ok, "Q": Q, "eps": eps, "tau2": tau2})


def bands_1d(cfg: OperatorConfig, tau2: float, eps: float, Q: int | None = None) -> Spectrum1D:
    """Ascending transverse eigenvalues at one (tau2, eps)."""
    if Q is None:
        Q = recommended_Q(cfg, eps)
    h = assemble_A(cfg, tau2, eps, Q)
    vals = eigvalsh(h.entries)
    return Spectrum1D(tau2=tau2, eps=eps, Q=Q, values=vals, cutoff_ok=h.meta["cutoff_ok"])


@dataclass(frozen=True)
class ConvergenceBand:
    """Dirichlet-limit comparison for one transverse index p."""

    p: int
    errors: tuple[float, ...]
    order: float          # fitted slope of |lambda - pi^2 p^2/a2^2| vs eps (inf if exact)
    r2: float
    half_power_seq: tuple[float, ...]   # (lambda_eps - limit)/sqrt(eps) along the schedule
    half_power_pred: float              # lambda_half_1d at this (p, tau2)
    half_power_last: float


@dataclass(frozen=True)
class Convergence1DReport:
    tau2: float
    epsilons: tuple[float, ...]
    bands: tuple[ConvergenceBand, ...]


def convergence_1d(cfg: OperatorConfig, tau2: float, p_max: int = 2,
                   workers: int | None = None) -> Convergence1DReport:
    """Empirical Dirichlet-limit rates over the config's eps schedule.

    For each p <= p_max: the deviation |lambda_eps^(p) - pi^2 p^2/a2^2| with
    its fitted order, and the half-power quotient sequence compared against
    the closed-form coefficient.
    """
    if len(cfg.epsilons) < 4:
        raise ValueError("need an epsilon schedule with >= 4 points")
    if p_max > 3:
        raise ValueError("p_max above 3 is outside the two-band theory window")
    a2 = cfg.lattice.a2
    mass, _ = wall_moments(cfg.wall)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        spectra = list(pool.map(lambda e: bands_1d(cfg, tau2, e), cfg.epsilons))
    bands = []
    for p in range(1, p_max + 1):
        limit = (math.pi * p / a2) ** 2
        lams = np.array([s.values[p - 1] for s in spectra])
        errs = np.abs(lams - limit)
        try:
            order, r2 = fit_order(list(zip(cfg.epsilons, errs)))
        except DegenerateFit:
            order, r2 = math.inf, 1.0
        quot = (lams - limit) / np.sqrt(np.array(cfg.epsilons))
        bands.append(ConvergenceBand(
            p=p, errors=tuple(float(e) for e in errs), order=order, r2=r2,
            half_power_seq=tuple(float(v) for v in quot),
            half_power_pred=lambda_half_1d(p, tau2, a2, mass),
            half_power_last=float(quot[-1]),
        ))
    return Convergence1DReport(tau2=tau2, epsilons=cfg.epsilons, bands=tuple(bands))
