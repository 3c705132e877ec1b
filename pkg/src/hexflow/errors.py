"""Exception hierarchy shared by all modules."""


class HexflowError(Exception):
    """Base class for every error raised by hexflow."""


class TopologyError(HexflowError, ValueError):
    pass


class NonManifold(TopologyError):
    """An ideal edge does not border exactly two faces."""


class RepeatedCorner(TopologyError):
    """A face uses the same boundary component twice."""


class NotHyperbolic(TopologyError):
    """The surface with boundary has nonnegative Euler characteristic."""


class SchemeError(HexflowError, ValueError):
    """Weights or variants violate the constraints of the chosen scheme."""


class CapabilityError(HexflowError):
    """The configuration is valid for evaluation but not for solving."""


class DomainError(HexflowError, ValueError):
    """A value lies outside the domain of a chart or formula."""


class NotAdmissible(HexflowError, ValueError):
    """Some edge length is not positive, or a factor is outside its chart.

    Attributes
    ----------
    edges : list of int
        Ids of the offending edges.
    boundaries : list of int
        Boundary components whose factor lies outside the chart domain.
    """

    def __init__(self, message, edges=(), boundaries=()):
        super().__init__(message)
        self.edges = list(edges)
        self.boundaries = list(boundaries)


class ChartAsymmetry(HexflowError):
    """The assembled curvature Jacobian is not symmetric."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class PathLeavesAdmissible(HexflowError):
    """A line-integration path exits the admissible region."""


class QuadratureNoConvergence(HexflowError):
    pass


class LinearSolveFailure(HexflowError):
    pass


class NoConvergence(HexflowError):
    pass
