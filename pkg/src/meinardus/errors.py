"""Exception taxonomy.

Three CLI exit-code categories: input errors (2) for anything wrong with a
model file or command configuration, domain errors (3) for requests the
model cannot satisfy, and numeric errors (4) for failed convergence or
precision loss.  Unexpected exceptions map to 1.
"""


class MeinardusError(Exception):
    exit_code = 1


class InputError(MeinardusError):
    exit_code = 2


class DomainError(MeinardusError):
    exit_code = 3


class NumericError(MeinardusError):
    exit_code = 4


# -- input --------------------------------------------------------------

class ParseError(InputError):
    """Malformed model file or unknown schema field."""


class ValidationError(InputError):
    """Model data violates an invariant (d_0 != 1, negative weight, ...)."""


class UnknownModel(InputError):
    """Requested builtin model name is not in the catalogue."""


# -- domain -------------------------------------------------------------

class NonUnitConstantTerm(DomainError):
    """Series logarithm requires a constant term equal to 1."""


class PoleAtOne(DomainError):
    """zeta(s) requested at its pole s = 1."""


class NotConvergent(DomainError):
    """Dirichlet sum requested outside its convergence half-plane."""


class MissingDeltaCoeffs(DomainError):
    """Profile does not carry enough D(-l) values for the requested depth."""


class UnsupportedForm(DomainError):
    """Euler-Maclaurin evaluation only handles the smooth weight form."""


class NoPositiveMass(DomainError):
    """All log-coefficients vanish; the tilt equation has no solution."""


class MissingProfile(DomainError):
    """Operation needs analytic pole/residue data the model does not carry."""


class OutOfRange(DomainError):
    """A probability left [0, 1] or an index exceeded the enumeration cap."""


class SeriesDivergence(DomainError):
    """Inner-series argument left the unit disk."""


class Unstabilized(DomainError):
    """Support gcd could not be certified within the scan bound."""


# -- numeric ------------------------------------------------------------

class PrecisionExhausted(NumericError):
    """Error tracking shows fewer than 10 significant bits in a result."""


class TruncationTooShallow(NumericError):
    """Tail bound of a truncated sum exceeds the requested tolerance."""


class QuadratureNotConverged(NumericError):
    """Adaptive refinement hit its depth limit before the tolerance."""
