"""Physical configuration types, validation of the structural hypotheses, and
Fourier data of the wall profile and coefficient fields.

Geometry: the periodicity cell is (0, a1) x (0, a2).  The narrow wall is a
compactly supported profile V(xi) on [-2*a3, 2*a3], raised along the lines
x2 in a2*Z after the scaling xi = x2/eps, with amplitude eps^(-3/2).  The
second-order perturbation fields A11, A1, A0 live on the cell and must vanish
within a declared margin of the cell boundary.

All types are immutable after validation and safe to share across workers;
Fourier caches are filled once under a lock and read concurrently afterwards.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import (
    AlphaOutOfRange,
    CoefficientViolation,
    EpsilonScheduleError,
    OverlapError,
    ResolutionError,
    WallViolation,
)

Array = np.ndarray

WALL_KINDS = ("trapezoid", "raised_cosine", "table", "callable")
FIELD_KINDS = ("zero", "constant", "bump_cos", "grid", "callable")

#: default validation grid sizes
WALL_GRID = 4097
COEFF_GRID = 512

#: default quadrature resolution for coefficient-field Fourier data
COEFF_FOURIER_RESOLUTION = 4096


def _sinc(y):
    """sin(y)/y with the removable singularity filled."""
    return np.sinc(np.asarray(y) / np.pi)


def smoothstep(u):
    """Quintic smoothstep: 0 for u<=0, 1 for u>=1, C^2 across the joints."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return u ** 3 * (10.0 + u * (-15.0 + 6.0 * u))


def boundary_bump(x, length: float, delta: float, ramp_lo: float, ramp_hi: float):
    """Plateau bump on (0, length) vanishing within `delta` of both ends.

    Rises over [delta, delta+ramp_lo], falls over [length-delta-ramp_hi,
    length-delta].  Different ramp widths break the midline symmetry, which
    matters for cross-couplings between transverse modes of opposite parity.
    """
    x = np.asarray(x, dtype=float)
    return smoothstep((x - delta) / ramp_lo) * smoothstep((length - delta - x) / ramp_hi)


# ---- lattice ----

@dataclass(frozen=True)
class LatticeParams:
    """Rectangular lattice periods."""

    a1: float
    a2: float

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError("lattice periods must be positive")

    @property
    def bz(self) -> tuple[float, float]:
        """Brillouin-zone half-widths (pi/a1, pi/a2)."""
        return (math.pi / self.a1, math.pi / self.a2)


@dataclass(frozen=True)
class QuasiMomentum:
    tau1: float
    tau2: float

    def folded(self, lattice: LatticeParams) -> "QuasiMomentum":
        """Fold into the closed Brillouin zone by 2*pi/a shifts."""
        b1, b2 = lattice.bz

        def fold(t, b):
            t = math.remainder(t, 2 * b)
            return t

        return QuasiMomentum(fold(self.tau1, b1), fold(self.tau2, b2))


# ---- wall profile ----

@dataclass(frozen=True)
class WallProfile:
    """Narrow-wall profile V on [-2*a3, 2*a3].

    kind "trapezoid": height on [-a3, a3], linear to zero at +-2*a3.
    kind "raised_cosine": height * cos^2(pi*xi/(4*a3)) on the support.
    kind "table": uniformly sampled values on [-2*a3, 2*a3], linear interpolation.
    kind "callable": arbitrary function of xi (validated numerically).
    """

    a3: float
    c0: float
    kind: str = "trapezoid"
    height: float = 1.0
    samples: tuple[float, ...] | None = None
    func: Callable[[Array], Array] | None = None

    def __post_init__(self):
        if self.kind not in WALL_KINDS:
            raise ValueError(f"unknown wall kind {self.kind!r}")
        if not (self.a3 > 0):
            raise ValueError("a3 must be positive")
        if not (self.c0 > 0):
            raise ValueError("c0 must be positive")
        if self.kind == "table":
            if self.samples is None or len(self.samples) < 3:
                raise ValueError("table wall needs at least 3 samples")
            object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))
        if self.kind == "callable" and self.func is None:
            raise ValueError("callable wall needs func")

    def evaluate(self, xi) -> Array:
        """V(xi), zero outside [-2*a3, 2*a3]; vectorized."""
        xi = np.asarray(xi, dtype=float)
        a3 = self.a3
        if self.kind == "trapezoid":
            r = np.abs(xi)
            out = np.where(r <= a3, self.height,
                           np.where(r < 2 * a3, self.height * (2 * a3 - r) / a3, 0.0))
            return out
        if self.kind == "raised_cosine":
            out = np.where(np.abs(xi) <= 2 * a3,
                           self.height * np.cos(np.pi * xi / (4 * a3)) ** 2, 0.0)
            return out
        if self.kind == "table":
            v = np.asarray(self.samples)
            out = np.interp(xi, self._table_nodes(), v, left=0.0, right=0.0)
            out = np.where(np.abs(xi) <= 2 * a3, out, 0.0)
            return out
        out = np.asarray(self.func(xi), dtype=float)
        return np.where(np.abs(xi) <= 2 * a3, out, 0.0)

    def _table_nodes(self) -> Array:
        return np.linspace(-2 * self.a3, 2 * self.a3, len(self.samples))


def wall_moments(wall: WallProfile) -> tuple[float, float]:
    """(mass, first moment) of V over its full support.

    mass = integral of V, first_moment = integral of xi*V(xi); for a valid
    wall mass >= 2*a3*c0 > 0.
    """
    if wall.kind == "trapezoid":
        return 3.0 * wall.a3 * wall.height, 0.0
    if wall.kind == "raised_cosine":
        return 2.0 * wall.a3 * wall.height, 0.0
    if wall.kind == "table":
        x = wall._table_nodes()
        v = np.asarray(wall.samples)
        # exact integrals of the linear interpolant
        h = np.diff(x)
        mass = float(np.sum(0.5 * h * (v[:-1] + v[1:])))
        m1 = float(np.sum(h * (v[:-1] * (2 * x[:-1] + x[1:]) + v[1:] * (x[:-1] + 2 * x[1:])) / 6.0))
        return mass, m1
    x = np.linspace(-2 * wall.a3, 2 * wall.a3, 32769)
    v = wall.evaluate(x)
    mass = float(np.trapezoid(v, x))
    m1 = float(np.trapezoid(x * v, x))
    return mass, m1


def _wall_transform(wall: WallProfile, omega) -> Array:
    """Fourier transform integral(V(xi) * exp(-i*omega*xi) dxi) over the support."""
    omega = np.asarray(omega, dtype=float)
    a3, h = wall.a3, wall.height
    if wall.kind == "trapezoid":
        # convolution of two rectangles of widths 3*a3 and a3
        return (3 * a3 * h * _sinc(1.5 * a3 * omega) * _sinc(0.5 * a3 * omega)).astype(complex)
    if wall.kind == "raised_cosine":
        length = 2 * a3
        val = _sinc(omega * length) + 0.5 * _sinc(omega * length - np.pi) + 0.5 * _sinc(omega * length + np.pi)
        return (h * length * val).astype(complex)
    if wall.kind == "table":
        return _piecewise_linear_transform(wall._table_nodes(), np.asarray(wall.samples), omega)
    return _oscillatory_quad(wall, omega)


def _piecewise_linear_transform(x: Array, v: Array, omega: Array) -> Array:
    """Exact transform of a piecewise-linear profile (extended by zero).

    Uses V'' = sum of slope jumps, so Vhat(omega) = -sum_j c_j e^{-i omega x_j} / omega^2,
    with a Taylor fallback near omega = 0.
    """
    slopes = np.diff(v) / np.diff(x)
    jumps = np.empty(len(x))
    jumps[0] = slopes[0]
    jumps[-1] = -slopes[-1]
    jumps[1:-1] = np.diff(slopes)
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty(om.shape, dtype=complex)
    span = x[-1] - x[0]
    small = np.abs(om) * span < 1e-5
    big = ~small
    if np.any(big):
        ob = om[big]
        phase = np.exp(-1j * np.outer(ob, x))
        out[big] = -(phase @ jumps) / ob ** 2
    if np.any(small):
        h = np.diff(x)
        m0 = np.sum(0.5 * h * (v[:-1] + v[1:]))
        m1 = np.sum(h * (v[:-1] * (2 * x[:-1] + x[1:]) + v[1:] * (x[:-1] + 2 * x[1:])) / 6.0)
        xl, xr = x[:-1], x[1:]
        m2 = np.sum(h / 12.0 * (v[:-1] * (3 * xl ** 2 + 2 * xl * xr + xr ** 2)
                                + v[1:] * (xl ** 2 + 2 * xl * xr + 3 * xr ** 2)))
        os = om[small]
        out[small] = m0 - 1j * os * m1 - 0.5 * os ** 2 * m2
    return out.reshape(np.shape(omega)) if np.ndim(omega) else out[0]


def _oscillatory_quad(wall: WallProfile, omega: Array) -> Array:
    """Panelled Gauss-Legendre quadrature for callable wall profiles."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    lo, hi = -2 * wall.a3, 2 * wall.a3
    out = np.empty(om.shape, dtype=complex)
    nodes0, weights0 = np.polynomial.legendre.leggauss(12)
    for i, w in enumerate(om):
        panels = max(32, int(np.ceil(abs(w) * (hi - lo) / np.pi)) + 8)
        edges = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        xs = (mid[:, None] + half[:, None] * nodes0[None, :]).ravel()
        ws = (half[:, None] * weights0[None, :]).ravel()
        out[i] = np.sum(wall.evaluate(xs) * np.exp(-1j * w * xs) * ws)
    return out.reshape(np.shape(omega)) if np.ndim(omega) else out[0]


def wall_fourier(wall: WallProfile, eps: float, a2: float, k) -> complex | Array:
    """k-th Fourier coefficient of the eps-scaled periodized wall on one period.

    Vhat_eps(k) = (1/a2) * integral over the cell of V_eps(x2) e^{-2 pi i k x2 / a2};
    combining the two wall pieces inside the cell reduces this to
    (eps/a2) * integral(V(xi) e^{-2 pi i k eps xi / a2} dxi).
    """
    if 4.0 * wall.a3 * eps >= a2:
        raise OverlapError(
            f"wall supports of adjacent periods intersect: 2*a3*eps = {2 * wall.a3 * eps} >= a2/2 = {a2 / 2}"
        )
    omega = 2.0 * np.pi * np.asarray(k, dtype=float) * eps / a2
    val = (eps / a2) * _wall_transform(wall, omega)
    if np.ndim(k) == 0:
        return complex(val)
    return val


# ---- coefficient fields ----

@dataclass(frozen=True)
class FieldSpec:
    """One coefficient field on the periodicity cell.

    kind "zero": identically zero.
    kind "constant": constant value (unit-test bypass; fails margin validation).
    kind "bump_cos": amplitude * B(x1) * (cos(2 pi j x1/a1) - comp) * B_asym(x2),
        where B vanishes within the margin of the cell edges; `asym` widens the
        falling x2 ramp to break midline symmetry; `compensate` subtracts the
        x1-mean of B*cos so diagonal couplings vanish.
    kind "grid": bilinear periodic interpolation of sampled values.
    kind "callable": arbitrary f(x1, x2).
    """

    kind: str = "zero"
    amplitude: float = 1.0
    harmonic: int = 1
    asym: float = 3.0
    compensate: bool = False
    values: tuple | None = None
    func: Callable | None = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "grid" and self.values is None:
            raise ValueError("grid field needs values")
        if self.kind == "callable" and self.func is None:
            raise ValueError("callable field needs func")

    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "constant" and self.amplitude == 0.0)

    def evaluate(self, x1, x2, lattice: LatticeParams, delta: float) -> Array:
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.kind == "zero":
            return np.zeros(np.broadcast_shapes(x1.shape, x2.shape))
        if self.kind == "constant":
            return np.full(np.broadcast_shapes(x1.shape, x2.shape), self.amplitude)
        if self.kind == "bump_cos":
            a1, a2 = lattice.a1, lattice.a2
            b1 = boundary_bump(np.mod(x1, a1), a1, delta, delta, delta)
            b2 = boundary_bump(np.mod(x2, a2), a2, delta, delta, self.asym * delta)
            osc = np.cos(2 * np.pi * self.harmonic * x1 / a1)
            if self.compensate:
                osc = osc - self._compensation(lattice, delta)
            return self.amplitude * b1 * osc * b2
        if self.kind == "grid":
            return self._interp_grid(x1, x2, lattice)
        return np.asarray(self.func(x1, x2), dtype=float) * np.ones(np.broadcast_shapes(x1.shape, x2.shape))

    def _compensation(self, lattice: LatticeParams, delta: float) -> float:
        """x1-mean of B*cos over x1-mean of B; makes the bump_cos x1-factor mean-free."""
        n = 1 << 14
        x = np.arange(n) * (lattice.a1 / n)
        b = boundary_bump(x, lattice.a1, delta, delta, delta)
        c = np.cos(2 * np.pi * self.harmonic * x / lattice.a1)
        return float(np.sum(b * c) / np.sum(b))

    def _interp_grid(self, x1, x2, lattice: LatticeParams) -> Array:
        vals = np.asarray(self.values, dtype=float)
        m1, m2 = vals.shape
        f1 = np.mod(np.asarray(x1) / lattice.a1, 1.0) * m1
        f2 = np.mod(np.asarray(x2) / lattice.a2, 1.0) * m2
        i1 = np.floor(f1).astype(int) % m1
        i2 = np.floor(f2).astype(int) % m2
        t1, t2 = f1 - np.floor(f1), f2 - np.floor(f2)
        j1, j2 = (i1 + 1) % m1, (i2 + 1) % m2
        return ((1 - t1) * (1 - t2) * vals[i1, i2] + t1 * (1 - t2) * vals[j1, i2]
                + (1 - t1) * t2 * vals[i1, j2] + t1 * t2 * vals[j1, j2])


FIELD_NAMES = ("A11", "A1", "A0")


@dataclass(frozen=True)
class CoefficientFields:
    """The three perturbation fields plus the declared boundary margin delta."""

    A11: FieldSpec = field(default_factory=FieldSpec)
    A1: FieldSpec = field(default_factory=FieldSpec)
    A0: FieldSpec = field(default_factory=FieldSpec)
    delta: float = 0.1

    def __post_init__(self):
        if not (self.delta > 0):
            raise ValueError("margin delta must be positive")
        object.__setattr__(self, "_fourier_cache", {})
        object.__setattr__(self, "_fourier_lock", threading.Lock())

    def spec(self, name: str) -> FieldSpec:
        if name not in FIELD_NAMES:
            raise ValueError(f"unknown field {name!r}")
        return getattr(self, name)

    def evaluate(self, name: str, x1, x2, lattice: LatticeParams) -> Array:
        return self.spec(name).evaluate(x1, x2, lattice, self.delta)

    # -- Fourier data --

    def fourier_box(self, name: str, jmax: int, qmax: int, lattice: LatticeParams,
                    resolution: int = COEFF_FOURIER_RESOLUTION, check: bool = True,
                    check_tol: float = 1e-9) -> Array:
        """Centered table of Fourier coefficients, indexed [j+jmax, q+qmax].

        Coefficients are (1/(a1*a2)) * integral(field * e^{-2 pi i (j x1/a1 + q x2/a2)})
        computed by tensor-product trapezoid quadrature at `resolution` nodes per
        axis; a half-resolution recomputation guards against under-resolution.
        Results are cached per field; the cache is filled under a lock and
        expanded when a larger box is requested.
        """
        if self.spec(name).is_zero():
            return np.zeros((2 * jmax + 1, 2 * qmax + 1), dtype=complex)
        key = (name, resolution, lattice.a1, lattice.a2)
        with self._fourier_lock:
            entry = self._fourier_cache.get(key)
            if entry is None or entry[0] < jmax or entry[1] < qmax:
                box = self._compute_box(name, jmax, qmax, lattice, resolution)
                if check:
                    half = self._compute_box(name, jmax, qmax, lattice, resolution // 2)
                    dev = float(np.max(np.abs(box - half)))
                    if dev > check_tol:
                        raise ResolutionError(
                            f"fourier coefficients of {name} not converged: "
                            f"resolutions {resolution}/{resolution // 2} differ by {dev:.3e}"
                        )
                self._fourier_cache[key] = (jmax, qmax, box)
                return box
            j0, q0, box = entry
            return box[j0 - jmax:j0 + jmax + 1, q0 - qmax:q0 + qmax + 1]

    def _compute_box(self, name: str, jmax: int, qmax: int, lattice: LatticeParams,
                     resolution: int) -> Array:
        r = resolution
        a1, a2 = lattice.a1, lattice.a2
        x2 = np.arange(r) * (a2 / r)
        js = np.arange(-jmax, jmax + 1)
        qs = np.arange(-qmax, qmax + 1)
        e2 = np.exp(-2j * np.pi * np.outer(x2 / a2, qs))
        acc = np.zeros((2 * jmax + 1, 2 * qmax + 1), dtype=complex)
        block = max(1, (1 << 22) // (16 * r))
        for start in range(0, r, block):
            stop = min(start + block, r)
            x1 = (np.arange(start, stop) * (a1 / r))[:, None]
            f = self.evaluate(name, x1, x2[None, :], lattice)
            e1 = np.exp(-2j * np.pi * np.outer(js, x1[:, 0] / a1))
            acc += e1 @ (f.astype(complex) @ e2)
        return acc / (r * r)


def coeff_fourier(coeffs: CoefficientFields, name: str, j: int, q: int,
                  lattice: LatticeParams, resolution: int = COEFF_FOURIER_RESOLUTION) -> complex:
    """Single 2D Fourier coefficient of a named field (cached per field)."""
    box = coeffs.fourier_box(name, abs(j), abs(q), lattice, resolution)
    return complex(box[j + abs(j), q + abs(q)])


# ---- crossings of the strip dispersion curves ----

@dataclass(frozen=True)
class Crossing:
    """A coincidence of the (p=1) and (p=2) strip dispersion branches.

    (tau0 + 2 pi n/a1)^2 + pi^2/a2^2 == (tau0 + 2 pi m/a1)^2 + 4 pi^2/a2^2 =: E0,
    normalized so tau0 >= 0.  `boundary` flags tau0 on the zone boundary
    {0, pi/a1}, where the interior-extremum statement does not apply.
    """

    n: int
    m: int
    tau0: float
    E0: float
    lattice: LatticeParams
    boundary: bool = False

    def __post_init__(self):
        a1, a2 = self.lattice.a1, self.lattice.a2
        if self.n == 0 and self.m == 0:
            raise ValueError("crossing needs at least one nonzero band index")
        if not (0.0 <= self.tau0 <= math.pi / a1 * (1 + 1e-12)):
            raise ValueError(f"tau0={self.tau0} outside [0, pi/a1]")
        e1 = (self.tau0 + 2 * math.pi * self.n / a1) ** 2 + (math.pi / a2) ** 2
        e2 = (self.tau0 + 2 * math.pi * self.m / a1) ** 2 + 4 * (math.pi / a2) ** 2
        if abs(e1 - self.E0) > 1e-12 * abs(self.E0) or abs(e2 - self.E0) > 1e-12 * abs(self.E0):
            raise ValueError(f"crossing equation violated: {e1} vs {e2} vs E0={self.E0}")
        lo, hi = (math.pi / a2) ** 2, 9 * (math.pi / a2) ** 2
        if not (lo < self.E0 < hi):
            raise ValueError(f"E0={self.E0} outside ({lo}, {hi})")


# ---- operator configuration ----

@dataclass(frozen=True)
class OperatorConfig:
    """Full physical configuration: lattice, wall, fields, exponent, schedule."""

    lattice: LatticeParams
    wall: WallProfile
    coeffs: CoefficientFields
    alpha: float
    epsilons: tuple[float, ...]
    validation: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))

    @property
    def validated(self) -> bool:
        return self.validation is not None


def _check_wall(wall: WallProfile, grid: int) -> dict:
    a3, c0 = wall.a3, wall.c0
    xi = np.linspace(-2 * a3, 2 * a3, grid)
    v = wall.evaluate(xi)
    if np.min(v) < -1e-12:
        raise WallViolation("positivity", f"min V = {np.min(v):.3e}")
    plateau = v[np.abs(xi) <= a3]
    if np.min(plateau) < c0 - 1e-12:
        raise WallViolation("plateau", f"min V on [-a3,a3] = {np.min(plateau):.6g} < c0 = {c0}")
    outside = wall.evaluate(np.array([-2.5 * a3, -2.01 * a3, 2.01 * a3, 2.5 * a3]))
    if np.max(np.abs(outside)) > 1e-12:
        raise WallViolation("support", "V nonzero outside [-2a3, 2a3]")
    if wall.kind == "table":
        s = np.asarray(wall.samples)
        scale = max(float(np.max(np.abs(s))), 1e-300)
        if abs(s[0]) > 1e-12 * scale or abs(s[-1]) > 1e-12 * scale:
            raise WallViolation("support", "table endpoints nonzero: profile jumps at the support edge")
    elif wall.kind == "callable":
        # refinement test: the max adjacent increment of a continuous profile
        # shrinks under grid refinement; a jump does not
        scale = max(float(np.max(np.abs(v))), 1e-300)
        xi2 = np.linspace(-2 * a3, 2 * a3, 2 * grid - 1)
        ext = np.concatenate(([0.0], wall.evaluate(xi2), [0.0]))
        d1 = float(np.max(np.abs(np.diff(np.concatenate(([0.0], v, [0.0]))))))
        d2 = float(np.max(np.abs(np.diff(ext))))
        if d1 > 1e-8 * scale and d2 > 0.75 * d1:
            raise WallViolation("continuity", f"adjacent increment {d1:.3e} does not shrink under refinement")
    return {"wall_grid": grid}


def _check_coeffs(coeffs: CoefficientFields, lattice: LatticeParams, grid: int) -> dict:
    a1, a2 = lattice.a1, lattice.a2
    x1 = np.linspace(0.0, a1, grid)
    x2 = np.linspace(0.0, a2, grid)
    for name in FIELD_NAMES:
        spec = coeffs.spec(name)
        if spec.is_zero():
            continue
        f = coeffs.evaluate(name, x1[:, None], x2[None, :], lattice)
        if not np.all(np.isreal(f)):
            raise CoefficientViolation("real-valued", float(np.max(np.abs(np.imag(f)))), name)
        scale = max(float(np.max(np.abs(f))), 1e-300)
        dev_per = max(float(np.max(np.abs(f[0, :] - f[-1, :]))),
                      float(np.max(np.abs(f[:, 0] - f[:, -1]))))
        if dev_per > 1e-10 * scale:
            raise CoefficientViolation("periodicity", dev_per, name)
        strip1 = (x1 < coeffs.delta) | (x1 > a1 - coeffs.delta)
        strip2 = (x2 < coeffs.delta) | (x2 > a2 - coeffs.delta)
        dev_margin = max(float(np.max(np.abs(f[strip1, :]))) if np.any(strip1) else 0.0,
                         float(np.max(np.abs(f[:, strip2]))) if np.any(strip2) else 0.0)
        if dev_margin > 1e-12 * scale:
            raise CoefficientViolation("margin", dev_margin, name)
    return {"coeff_grid": grid}


def validate_config(raw: OperatorConfig, wall_grid: int = WALL_GRID,
                    coeff_grid: int = COEFF_GRID) -> OperatorConfig:
    """Verify every structural hypothesis on a raw config.

    Returns the same config with a validation record attached.  Smoothness of
    sampled data cannot be certified numerically and remains the caller's
    responsibility; values are checked on the validation grids.
    """
    meta = {}
    meta.update(_check_wall(raw.wall, max(wall_grid, 1024)))
    meta.update(_check_coeffs(raw.coeffs, raw.lattice, coeff_grid))
    if not (1.0 / 3.0 < raw.alpha < 0.5):
        raise AlphaOutOfRange(f"alpha={raw.alpha} outside (1/3, 1/2)")
    eps = raw.epsilons
    if len(eps) == 0:
        raise EpsilonScheduleError("empty epsilon schedule")
    if any(not (0.0 < e < 1.0) for e in eps):
        raise EpsilonScheduleError(f"epsilons must lie in (0, 1): {eps}")
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
        raise EpsilonScheduleError(f"epsilons must be strictly decreasing: {eps}")
    bad = [e for e in eps if 2 * raw.wall.a3 * e >= raw.lattice.a2 / 2]
    if bad:
        raise EpsilonScheduleError(f"scaled wall too wide at eps={bad}: 2*a3*eps must stay below a2/2")
    mass, _ = wall_moments(raw.wall)
    meta["wall_mass"] = mass
    return replace(raw, validation=meta)
