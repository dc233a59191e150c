"""Exception hierarchy.  Every domain error maps to CLI exit code 3."""


class GeometryError(Exception):
    """Base class for domain errors raised by the library."""

    code = "geometry_error"


class NoPrincipalLog(GeometryError):
    code = "no_principal_log"


class SamePoint(GeometryError):
    code = "same_point"


class BadIndex(GeometryError):
    code = "bad_index"


class NotPingPong(GeometryError):
    code = "not_ping_pong"


class CoincidentPoints(GeometryError):
    code = "coincident_points"


class NoContraction(GeometryError):
    code = "no_contraction"


class MaxIterations(GeometryError):
    code = "max_iterations"


class NonHyperbolicBase(GeometryError):
    code = "non_hyperbolic_base"


class Infeasible(GeometryError):
    code = "infeasible"


class StripsOverlap(GeometryError):
    code = "strips_overlap"


class NotFilling(GeometryError):
    code = "not_filling"


class NotAdmissible(GeometryError):
    code = "not_admissible"


class NoPositiveSolution(GeometryError):
    code = "no_positive_solution"

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates or []
