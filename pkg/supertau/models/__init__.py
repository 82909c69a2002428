from supertau.models.errors import (
    SupertauError, ValidationError, NotATotalDerivative, NotInvertible,
    UnsupportedGenerators, DimensionMismatch, SolveError, DivisibilityError,
    UnsupportedOrder, TruncationTooSmall, WindowError, DegreeError,
)
from supertau.models.diffpoly import DiffPoly
from supertau.models.series import LaurentJet
from supertau.models.frobenius_spec import FrobeniusSpec
from supertau.models.report import CheckResult, Report
from supertau.models.virasoro_coefficients import VirasoroCoefficients
