"""Closed-form asymptotic machinery: effective 2x2 matrices at a crossing,
branch extremization, gap-edge coefficients, wall corrections, and the full
gap prediction.

Conventions.  With s = tau1 + 2 pi n*/a1 and d = tau1 + 2 pi m*/a1 (the band
slopes at the crossing over 2), the effective pencil is

    M(t) = M0(tau1) - 2 t M1(tau1),      M1 = diag(s, d),

and the two branches lambda_-(t) <= lambda_+(t) are its eigenvalues.  The
closed-form extrema use

    k1 = -(s + d),   k3 = s - d = 2 pi (n* - m*)/a1,
    k2 = -(M0_11 + M0_22)/2,   k4 = (M0_22 - M0_11)/2,

an interior extremum exists iff k3^2 > k1^2 (equivalently s*d < 0), and

    t_+- = -+ k1 g / (|k3| sqrt(k3^2 - k1^2)) - k4/k3,
    beta_+- = +- (g/|k3|) sqrt(k3^2 - k1^2) - k1 k4 / k3 - k2,

with g = |M0_12|.  The constant term enters as -k2 = +(M0_11 + M0_22)/2: that
is what direct extremization of the M(t) eigenvalues gives, and agreement of
the closed form with the numerical extremum is enforced at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crossings import ConditionReport, check_conditions
from .errors import ClosedFormMismatch, ConditionsViolated, NoGapPredicted, ResolutionError, SlopeConditionViolated
from .model import Crossing, OperatorConfig, QuasiMomentum, wall_moments
from .numerics import HermitianMatrix, minimize_scalar, quad_periodic

Array = np.ndarray

#: default quadrature nodes per axis for the effective-matrix integrals
M0_RESOLUTION = 1024

TAU2_DEGENERATE_TOL = 1e-8
TIE_TOL = 1e-10


@dataclass(frozen=True)
class EffectiveMatrices:
    """Effective 2x2 data at a crossing for one sign of tau1.

    M0 is independent of tau2 by construction: the transverse phases of the
    strip eigenfunctions cancel identically in every inner product, so the
    assembly never sees tau2.
    """

    M0: HermitianMatrix
    slopes: tuple[float, float]  # diagonal of M1: (s, d)
    n_star: int
    m_star: int
    tau1: float

    @property
    def M1(self) -> Array:
        return np.diag(self.slopes)


@dataclass(frozen=True)
class GapCoefficients:
    """Everything Theorem-level gap asymptotics needs, both tau1 signs resolved."""

    beta_minus_at: dict
    beta_plus_at: dict
    beta_l: float
    beta_r: float
    tau1_l: float
    tau1_r: float
    t_l: float
    t_r: float
    e_l: Array
    e_r: Array
    lambda_l: float
    lambda_r: float
    degenerate_l: bool
    degenerate_r: bool
    mass: float
    a2: float
    conditions: ConditionReport
    tie_l: bool = False
    tie_r: bool = False


@dataclass(frozen=True)
class GapPrediction:
    """Predicted gap edges and extremum quasimomenta at one eps."""

    eps: float
    eta_l: float
    eta_r: float
    extremum_l: QuasiMomentum
    extremum_r: QuasiMomentum
    tau2_candidates_l: tuple[float, ...] | None
    tau2_candidates_r: tuple[float, ...] | None
    remainder_order: float
    eps_threshold: float


# ---- effective matrix assembly ----

def _pair_integral(cfg: OperatorConfig, name: str, n_a: int, p_a: int, n_b: int, p_b: int,
                   resolution: int) -> complex:
    """<phi_a, F phi_b> over the cell for strip modes phi_(n,p) (tau2 phase dropped)."""
    a1, a2 = cfg.lattice.a1, cfg.lattice.a2
    norm = 2.0 / (a1 * a2)

    def integrand(x1, x2):
        f = cfg.coeffs.evaluate(name, x1, x2, cfg.lattice)
        osc = np.exp(2j * np.pi * (n_b - n_a) * x1 / a1)
        sines = np.sin(np.pi * p_a * x2 / a2) * np.sin(np.pi * p_b * x2 / a2)
        return norm * f * osc * sines

    return complex(quad_periodic(integrand, (a1, a2), (resolution, resolution)))


def assemble_M0(cfg: OperatorConfig, crossing: Crossing, tau1: float,
                resolution: int = M0_RESOLUTION) -> EffectiveMatrices:
    """Effective matrix of the transformed perturbation on the crossing pair.

    Entry (a, b) is p_a p_b <A11>_ab + (p_a + p_b) <A1>_ab + <A0>_ab with
    p = tau1 + 2 pi n/a1; derivatives act on the explicit exponential basis
    analytically, so only field inner products are quadratures.  The sign
    convention of the first-order term matches the 2D assembly (fixed by the
    quadratic-form test, see the solver module).
    """
    n_star = crossing.n if tau1 >= 0 else -crossing.n
    m_star = crossing.m if tau1 >= 0 else -crossing.m
    a1 = cfg.lattice.a1
    modes = ((n_star, 1), (m_star, 2))
    p = [tau1 + 2 * math.pi * n / a1 for n, _ in modes]

    def block(name):
        out = np.zeros((2, 2), dtype=complex)
        if cfg.coeffs.spec(name).is_zero():
            return out
        for i, (na, pa) in enumerate(modes):
            for j, (nb, pb) in enumerate(modes):
                fine = _pair_integral(cfg, name, na, pa, nb, pb, resolution)
                coarse = _pair_integral(cfg, name, na, pa, nb, pb, resolution // 2)
                if abs(fine - coarse) > 1e-9 * (1.0 + abs(fine)):
                    raise ResolutionError(
                        f"effective-matrix integral of {name} not converged: "
                        f"{abs(fine - coarse):.3e} at resolutions {resolution}/{resolution // 2}"
                    )
                out[i, j] = fine
        return out

    i11, i1, i0 = block("A11"), block("A1"), block("A0")
    m = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            m[i, j] = p[i] * p[j] * i11[i, j] + (p[i] + p[j]) * i1[i, j] + i0[i, j]
    m = 0.5 * (m + m.conj().T)  # symmetrize roundoff; Hermiticity asserted below
    return EffectiveMatrices(M0=HermitianMatrix(m), slopes=(p[0], p[1]),
                             n_star=n_star, m_star=m_star, tau1=tau1)


# ---- branch values and extremization ----

def branch_values(mats: EffectiveMatrices, t: float) -> tuple[float, float]:
    """The two eigenvalues of M(t) = M0 - 2t M1, ascending."""
    m0 = mats.M0.entries
    s, d = mats.slopes
    a = m0[0, 0].real - 2 * t * s
    b = m0[1, 1].real - 2 * t * d
    g = abs(m0[0, 1])
    mean, half = 0.5 * (a + b), 0.5 * (a - b)
    root = math.hypot(half, g)
    return mean - root, mean + root


def _k_constants(mats: EffectiveMatrices) -> tuple[float, float, float, float, float]:
    m0 = mats.M0.entries
    s, d = mats.slopes
    k1 = -(s + d)
    k3 = s - d
    k2 = -0.5 * (m0[0, 0].real + m0[1, 1].real)
    k4 = 0.5 * (m0[1, 1].real - m0[0, 0].real)
    g = abs(m0[0, 1])
    return k1, k2, k3, k4, g


def branch_extrema(mats: EffectiveMatrices, rtol: float = 1e-8) -> tuple[float, float, float, float]:
    """(t_plus, beta_plus, t_minus, beta_minus): argmin/min of the upper branch
    and argmax/max of the lower branch of M(t).

    Computed both in closed form and by direct scalar extremization; the two
    must agree to `rtol` or ClosedFormMismatch is raised with both values.
    """
    k1, k2, k3, k4, g = _k_constants(mats)
    s, d = mats.slopes
    if k3 * k3 <= k1 * k1:
        raise SlopeConditionViolated(
            f"no interior branch extremum: slopes s={s:.6g}, d={d:.6g} not opposite "
            f"(k3^2 - k1^2 = {k3 * k3 - k1 * k1:.6g} = -4*s*d)"
        )
    root = math.sqrt(k3 * k3 - k1 * k1)
    t_plus = -k1 * g / (abs(k3) * root) - k4 / k3
    t_minus = +k1 * g / (abs(k3) * root) - k4 / k3
    beta_plus = g * root / abs(k3) - k1 * k4 / k3 - k2
    beta_minus = -g * root / abs(k3) - k1 * k4 / k3 - k2

    norm = float(np.linalg.norm(mats.M0.entries))
    half_width = 10.0 * (norm + 1.0) / abs(k3) + 2.0 * max(abs(t_plus), abs(t_minus)) + 1.0
    bracket = (-half_width, half_width)
    t_p_num, b_p_num = minimize_scalar(lambda t: branch_values(mats, t)[1], bracket, tol=1e-12)
    t_m_num, b_m_num = minimize_scalar(lambda t: -branch_values(mats, t)[0], bracket, tol=1e-12)
    b_m_num = -b_m_num

    checks = (("t_plus", t_plus, t_p_num), ("beta_plus", beta_plus, b_p_num),
              ("t_minus", t_minus, t_m_num), ("beta_minus", beta_minus, b_m_num))
    for what, closed, numeric in checks:
        if abs(closed - numeric) > rtol * (1.0 + abs(closed)):
            raise ClosedFormMismatch(what, closed, numeric)
    return t_plus, beta_plus, t_minus, beta_minus


def _extremal_eigvec(mats: EffectiveMatrices, t: float, which: str) -> tuple[Array, float]:
    """Unit eigenvector of M(t) for the smaller/greater eigenvalue.

    Phase normalized so the first component of largest modulus is real
    positive; downstream formulas only consume |components|^2.
    """
    m = mats.M0.entries - 2 * t * mats.M1.astype(complex)
    w, v = np.linalg.eigh(m)
    idx = 0 if which == "smaller" else 1
    vec = v[:, idx]
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    vec = vec / phase
    return vec, float(w[idx])


# ---- gap coefficients and prediction ----

def wall_correction(weight: float, a2: float, mass: float) -> float:
    return -8.0 * math.pi ** 2 / (a2 ** 3 * mass) * weight


def gap_coefficients(cfg: OperatorConfig, crossing: Crossing,
                     resolution: int = M0_RESOLUTION) -> GapCoefficients:
    """Full set of gap-edge coefficients for one crossing.

    Evaluates the effective matrices at tau1 = +tau0 and -tau0, extremizes
    both branches, picks the edge representatives (max of the lower-branch
    maxima, min of the upper-branch minima; ties resolved to +tau0), and
    derives the wall corrections from the extremal eigenvectors.
    """
    tau0 = crossing.tau0
    mats = {}
    extrema = {}
    slope_error = None
    for tau1 in (+tau0, -tau0):
        mats[tau1] = assemble_M0(cfg, crossing, tau1, resolution)
        try:
            extrema[tau1] = branch_extrema(mats[tau1])
        except SlopeConditionViolated as exc:
            slope_error = exc

    if slope_error is not None:
        report = check_conditions(crossing, mats[tau0].M0, mats[-tau0].M0, None, None)
        raise ConditionsViolated(report)

    beta_minus_at = {tau1: extrema[tau1][3] for tau1 in (+tau0, -tau0)}
    beta_plus_at = {tau1: extrema[tau1][1] for tau1 in (+tau0, -tau0)}

    def argbest(values: dict, pick_max: bool) -> tuple[float, bool]:
        v_plus, v_minus = values[tau0], values[-tau0]
        tie = abs(v_plus - v_minus) <= TIE_TOL * (1.0 + abs(v_plus))
        if tie:
            return tau0, True
        better = v_plus > v_minus if pick_max else v_plus < v_minus
        return (tau0 if better else -tau0), False

    tau1_l, tie_l = argbest(beta_minus_at, pick_max=True)
    tau1_r, tie_r = argbest(beta_plus_at, pick_max=False)
    beta_l = beta_minus_at[tau1_l]
    beta_r = beta_plus_at[tau1_r]

    report = check_conditions(crossing, mats[tau0].M0, mats[-tau0].M0, beta_l, beta_r)
    if not report.admissible:
        raise ConditionsViolated(report)

    t_l = extrema[tau1_l][2]
    t_r = extrema[tau1_r][0]
    e_l, _ = _extremal_eigvec(mats[tau1_l], t_l, "smaller")
    e_r, _ = _extremal_eigvec(mats[tau1_r], t_r, "greater")

    mass, _ = wall_moments(cfg.wall)
    a2 = cfg.lattice.a2
    w_l = (abs(e_l[0]) ** 2, abs(e_l[1]) ** 2)
    w_r = (abs(e_r[0]) ** 2, abs(e_r[1]) ** 2)
    return GapCoefficients(
        beta_minus_at=beta_minus_at, beta_plus_at=beta_plus_at,
        beta_l=beta_l, beta_r=beta_r, tau1_l=tau1_l, tau1_r=tau1_r,
        t_l=t_l, t_r=t_r, e_l=e_l, e_r=e_r,
        lambda_l=wall_correction(min(w_l), a2, mass),
        lambda_r=wall_correction(max(w_r), a2, mass),
        degenerate_l=abs(abs(e_l[0]) - abs(e_l[1])) < TAU2_DEGENERATE_TOL,
        degenerate_r=abs(abs(e_r[0]) - abs(e_r[1])) < TAU2_DEGENERATE_TOL,
        mass=mass, a2=a2, conditions=report, tie_l=tie_l, tie_r=tie_r,
    )


def _tau2_candidates(first_larger: bool | None, a2: float, edge: str) -> tuple[float, ...] | None:
    """Candidate transverse quasimomenta for the band extremum.

    None encodes the degenerate case (equal component moduli), where the
    leading asymptotics carries no localization information.
    """
    if first_larger is None:
        return None
    b2 = math.pi / a2
    # right edge: boundary/center set when the first component dominates;
    # left edge: the comparison is inverted
    wide = first_larger if edge == "r" else not first_larger
    if wide:
        return (0.0, b2, -b2)
    return (b2 / 2, -b2 / 2)


def predict_gap(coeffs: GapCoefficients, E0: float, alpha: float, eps: float) -> GapPrediction:
    """Gap edges and extremum quasimomenta at one eps.

    eta_{l/r} = E0 + eps^alpha beta_{l/r} + eps^(1/2) lambda_{l/r}; the edges
    order correctly for eps below the threshold where the half-power terms
    overtake the alpha-power splitting, and that threshold is reported.
    """
    if not coeffs.beta_l < coeffs.beta_r:
        raise NoGapPredicted(f"beta_l={coeffs.beta_l} >= beta_r={coeffs.beta_r}")
    eta_l = E0 + eps ** alpha * coeffs.beta_l + math.sqrt(eps) * coeffs.lambda_l
    eta_r = E0 + eps ** alpha * coeffs.beta_r + math.sqrt(eps) * coeffs.lambda_r
    dbeta = coeffs.beta_r - coeffs.beta_l
    dlam = coeffs.lambda_l - coeffs.lambda_r
    if dlam <= 0:
        threshold = math.inf
    else:
        threshold = (dbeta / dlam) ** (1.0 / (0.5 - alpha))

    def moduli(vec):
        return abs(vec[0]), abs(vec[1])

    m_l, m_r = moduli(coeffs.e_l), moduli(coeffs.e_r)
    first_larger_l = None if coeffs.degenerate_l else m_l[0] > m_l[1]
    first_larger_r = None if coeffs.degenerate_r else m_r[0] > m_r[1]
    cand_l = _tau2_candidates(first_larger_l, coeffs.a2, "l")
    cand_r = _tau2_candidates(first_larger_r, coeffs.a2, "r")
    tau1_l_pred = coeffs.tau1_l + eps ** alpha * coeffs.t_l
    tau1_r_pred = coeffs.tau1_r + eps ** alpha * coeffs.t_r
    return GapPrediction(
        eps=eps, eta_l=eta_l, eta_r=eta_r,
        extremum_l=QuasiMomentum(tau1_l_pred, cand_l[0] if cand_l else math.nan),
        extremum_r=QuasiMomentum(tau1_r_pred, cand_r[0] if cand_r else math.nan),
        tau2_candidates_l=cand_l, tau2_candidates_r=cand_r,
        remainder_order=2 * alpha, eps_threshold=threshold,
    )


# ---- wall-correction closed forms ----

def lambda_half_1d(p: int, tau2: float, a2: float, mass: float) -> float:
    """Half-power coefficient of the 1D transverse eigenvalue near pi^2 p^2/a2^2.

    -(2 pi^2 p^2 / (a2^3 mass)) |1 - (-1)^p exp(-i tau2 a2)|^2.  The parity
    factor is (-1)^p: the slope of sin(pi p x/a2) at the far wall alternates
    with p, which the matched boundary layer inherits.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if mass <= 0:
        raise ValueError("mass must be positive")
    z = 1.0 - (-1.0) ** p * np.exp(-1j * tau2 * a2)
    return float(-(2.0 * math.pi ** 2 * p ** 2) / (a2 ** 3 * mass) * abs(z) ** 2)


def lambda_half_pm(c, tau2: float, a2: float, mass: float) -> float:
    """Half-power wall correction of a hybridized crossing pair with weights c.

    -(8 pi^2/(a2^3 mass)) (|c1|^2 cos^2(tau2 a2) + |c2|^2 sin^2(tau2 a2)).
    """
    c = np.asarray(c)
    nrm = float(np.linalg.norm(c))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"need unit coefficient vector, got norm {nrm}")
    if mass <= 0:
        raise ValueError("mass must be positive")
    w = abs(c[0]) ** 2 * math.cos(tau2 * a2) ** 2 + abs(c[1]) ** 2 * math.sin(tau2 * a2) ** 2
    return wall_correction(w, a2, mass)
