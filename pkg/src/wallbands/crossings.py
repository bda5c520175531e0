"""Crossings of the strip dispersion branches and the inverse design problem.

A crossing is a quasimomentum tau0 where the (n, p=1) and (m, p=2) branches
of the Dirichlet-strip dispersion coincide; these points seed gap opening.
For n != m the coincidence equation is linear in tau0 and is solved in closed
form; no root-finding tolerances enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoAdmissibleRoot
from .model import Crossing, LatticeParams
from .numerics import HermitianMatrix

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ConditionReport:
    """The three admissibility inequalities with their raw values."""

    m12_nonzero_at_plus: bool
    m12_abs_plus: float
    m12_nonzero_at_minus: bool
    m12_abs_minus: float
    slopes_opposite: bool
    slope_product: float
    beta_order: bool
    beta_l: float | None
    beta_r: float | None

    @property
    def admissible(self) -> bool:
        return (self.m12_nonzero_at_plus and self.m12_nonzero_at_minus
                and self.slopes_opposite and self.beta_order)

    def summary(self) -> str:
        parts = [
            f"|M12(+tau0)|={self.m12_abs_plus:.3e} ({'ok' if self.m12_nonzero_at_plus else 'ZERO'})",
            f"|M12(-tau0)|={self.m12_abs_minus:.3e} ({'ok' if self.m12_nonzero_at_minus else 'ZERO'})",
            f"slope product={self.slope_product:.6g} ({'ok' if self.slopes_opposite else 'NOT OPPOSITE'})",
        ]
        if self.beta_l is None or self.beta_r is None:
            parts.append("beta order: unavailable")
        else:
            parts.append(f"beta_l={self.beta_l:.6g} vs beta_r={self.beta_r:.6g} "
                         f"({'ok' if self.beta_order else 'NOT ORDERED'})")
        return "; ".join(parts)


def _canonical(n: int, m: int, tau0: float):
    """Normalize to tau0 >= 0 via (tau0, n, m) -> (-tau0, -n, -m)."""
    if tau0 < 0.0 or (tau0 == 0.0 and (n, m) < (-n, -m)):
        return -n, -m, -tau0
    return n, m, tau0


def enumerate_crossings(lattice: LatticeParams, n_max: int) -> list[Crossing]:
    """All crossings with |n|, |m| <= n_max, normalized and sorted by energy.

    For each n != m the coincidence equation is linear in tau0; solutions are
    kept when tau0 lies in the zone and E0 in the admissible energy window,
    deduplicated after normalization to tau0 >= 0.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    a1, a2 = lattice.a1, lattice.a2
    u = 2 * math.pi / a1
    bz1 = math.pi / a1
    lo, hi = (math.pi / a2) ** 2, 9 * (math.pi / a2) ** 2
    seen: dict[tuple[int, int, int], Crossing] = {}
    for n in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            if n == m:
                continue
            tau0 = 0.5 * (3 * math.pi ** 2 / (a2 ** 2 * (n - m) * u) - (n + m) * u)
            if abs(tau0) > bz1 * (1 + BOUNDARY_TOL):
                continue
            nn, mm, tt = _canonical(n, m, tau0)
            e0 = (tt + nn * u) ** 2 + (math.pi / a2) ** 2
            if not (lo < e0 < hi):
                continue
            boundary = tt <= bz1 * BOUNDARY_TOL or abs(tt - bz1) <= bz1 * BOUNDARY_TOL
            key = (nn, mm, round(tt / bz1 * 1e12))
            if key not in seen:
                seen[key] = Crossing(n=nn, m=mm, tau0=min(tt, bz1), E0=e0,
                                     lattice=lattice, boundary=boundary)
    return sorted(seen.values(), key=lambda c: (c.E0, c.n, c.m))


def design_a1(E0_target: float, tau0_target: float, n: int, m: int, a2: float) -> float:
    """Period a1 > 0 placing a crossing of the (n, m) pair at (tau0_target, E0_target).

    Solves the quadratic in u = 2*pi/a1 obtained from the branch-difference
    equation, then keeps the root that also reproduces E0_target, keeps
    tau0_target inside the resulting zone, and lands in the energy window.
    """
    if n == m:
        raise ValueError("need n != m")
    if tau0_target < 0:
        raise ValueError("need tau0_target >= 0")
    gap23 = 3 * math.pi ** 2 / a2 ** 2
    # (2*tau0 + (n+m) u) (n-m) u = gap23
    aa = (n + m) * (n - m)
    bb = 2 * tau0_target * (n - m)
    roots: list[float] = []
    if aa == 0:
        if bb != 0.0:
            roots.append(gap23 / bb)
    else:
        disc = bb * bb + 4 * aa * gap23
        if disc >= 0:
            sq = math.sqrt(disc)
            roots.extend([(-bb + sq) / (2 * aa), (-bb - sq) / (2 * aa)])
    lo, hi = (math.pi / a2) ** 2, 9 * (math.pi / a2) ** 2
    admissible = []
    for u in roots:
        if u <= 0:
            continue
        e0 = (tau0_target + n * u) ** 2 + (math.pi / a2) ** 2
        if abs(e0 - E0_target) > 1e-10 * abs(E0_target):
            continue
        if tau0_target > u / 2 * (1 + BOUNDARY_TOL):  # zone is [-u/2, u/2]
            continue
        if not (lo < e0 < hi):
            continue
        admissible.append(u)
    if not admissible:
        raise NoAdmissibleRoot(
            f"no period a1 places crossing ({n},{m}) at tau0={tau0_target}, E0={E0_target}"
        )
    return 2 * math.pi / max(admissible)


def check_conditions(crossing: Crossing, M0_plus: HermitianMatrix, M0_minus: HermitianMatrix,
                     beta_l: float | None, beta_r: float | None) -> ConditionReport:
    """Evaluate the three admissibility inequalities with diagnostic values."""
    a1 = crossing.lattice.a1
    s = crossing.tau0 + 2 * math.pi * crossing.n / a1
    d = crossing.tau0 + 2 * math.pi * crossing.m / a1
    product = s * d

    def m12_flag(mat: HermitianMatrix) -> tuple[bool, float]:
        g = abs(mat.entries[0, 1])
        norm = float(np.linalg.norm(mat.entries))
        return g > 1e-10 * max(norm, 1e-300), float(g)

    ok_p, g_p = m12_flag(M0_plus)
    ok_m, g_m = m12_flag(M0_minus)
    beta_ok = beta_l is not None and beta_r is not None and beta_l < beta_r
    return ConditionReport(
        m12_nonzero_at_plus=ok_p, m12_abs_plus=g_p,
        m12_nonzero_at_minus=ok_m, m12_abs_minus=g_m,
        slopes_opposite=product < 0.0, slope_product=product,
        beta_order=beta_ok, beta_l=beta_l, beta_r=beta_r,
    )
