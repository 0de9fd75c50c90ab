"""Exception hierarchy shared by all tetradlab modules."""


class TetradLabError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(TetradLabError):
    pass


class NotSymmetric(TetradLabError):
    pass


class UnknownAlgebra(TetradLabError):
    pass


class JacobiViolation(TetradLabError):
    pass


class SeriesNonConvergent(TetradLabError):
    pass


class DegenerateFrame(TetradLabError):
    pass


class CriticalRho(TetradLabError):
    pass


class DegenerateLagrangeTensor(TetradLabError):
    pass


class SingularMetric(TetradLabError):
    pass


class MissingField(TetradLabError):
    pass


class NotSemisimple(TetradLabError):
    pass


class ConfigError(TetradLabError):
    pass
