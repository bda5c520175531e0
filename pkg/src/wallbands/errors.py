"""Exception hierarchy shared by all wallbands modules.

Validation errors mean the input violates a structural hypothesis; numerical
errors mean a computation could not be carried out reliably.  The CLI maps
the former to exit code 2 and the latter to exit code 3.
"""


class WallbandsError(Exception):
    """Base class for all package errors."""


# ---- validation errors (exit code 2) ----

class ValidationError(WallbandsError):
    """Input violates a structural hypothesis."""


class WallViolation(ValidationError):
    """Wall profile breaks a support / positivity / plateau / continuity clause."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"wall profile violates '{clause}' clause" + (f": {detail}" if detail else ""))


class CoefficientViolation(ValidationError):
    """Coefficient field breaks periodicity or the boundary-margin clause."""

    def __init__(self, clause: str, max_violation: float, field: str = ""):
        self.clause = clause
        self.max_violation = max_violation
        self.field = field
        super().__init__(
            f"coefficient field {field or '?'} violates '{clause}' (max violation {max_violation:.3e})"
        )


class AlphaOutOfRange(ValidationError):
    pass


class EpsilonScheduleError(ValidationError):
    pass


class ConfigParseError(ValidationError):
    """Config file could not be parsed; carries line/column when known."""


class ConditionsViolated(ValidationError):
    """The admissibility inequalities for gap opening fail; carries the report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"gap-opening conditions violated: {report.summary()}")


class NoAdmissibleRoot(ValidationError):
    """Inverse lattice design found no period satisfying all constraints."""


class NoGapPredicted(ValidationError):
    """Left edge coefficient is not below the right edge coefficient."""


# ---- numerical errors (exit code 3) ----

class NumericalError(WallbandsError):
    pass


class ConvergenceFailure(NumericalError):
    """Eigensolver backend failed on Hermitian input (should never happen)."""


class BracketError(NumericalError):
    pass


class DegenerateFit(NumericalError):
    """A log-log fit was requested on errors that are zero (exact agreement)."""


class ResolutionError(NumericalError):
    """Quadrature self-estimate at two resolutions disagrees beyond tolerance."""


class OverlapError(NumericalError):
    """Scaled wall supports of adjacent periods intersect."""


class SlopeConditionViolated(NumericalError):
    """Branch has no interior extremum (band slopes at the crossing not opposite)."""


class ClosedFormMismatch(NumericalError):
    """Closed-form branch extremum disagrees with direct numerical extremization."""

    def __init__(self, what: str, closed: float, numeric: float):
        self.what = what
        self.closed = closed
        self.numeric = numeric
        super().__init__(f"{what}: closed form {closed!r} vs numeric {numeric!r}")


class CutoffError(NumericalError):
    """Requested discretization is outside the permitted budget."""


class BandIdentificationError(NumericalError):
    """The energy window near the crossing is not occupied by exactly the tracked pair."""

    def __init__(self, tau, detail: str):
        self.tau = tau
        super().__init__(f"band identification failed at tau={tau}: {detail}")


class InsufficientData(NumericalError):
    """Too few usable measurements for the requested comparison."""
