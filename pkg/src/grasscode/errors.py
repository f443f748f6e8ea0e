"""Exception and warning types raised across the package."""


class GrasscodeError(ValueError):
    """Base class for all input/contract errors raised by grasscode."""


class DimensionMismatch(GrasscodeError):
    pass


class RankDeficient(GrasscodeError):
    pass


class GeometryMismatch(GrasscodeError):
    """Channel width does not equal Mv * Mh."""


class InvalidMode(GrasscodeError):
    pass


class RankTooLarge(GrasscodeError):
    pass


class EmptyCluster(GrasscodeError):
    pass


class EmptyDataset(GrasscodeError):
    pass


class InsufficientData(GrasscodeError):
    """Fewer training points than requested codewords."""


class WrongPipeline(GrasscodeError):
    """E.g. a multi-antenna receiver fed to the beamforming (Mr = 1) pipeline."""


class NonFiniteInput(GrasscodeError):
    pass


class FormatError(GrasscodeError):
    """Bad magic number or unsupported version in a binary container."""


class CorruptFile(GrasscodeError):
    """Binary container is truncated or internally inconsistent."""


class DegenerateCentroidWarning(UserWarning):
    """The k-th and (k+1)-th eigenvalues of a centroid scatter matrix tie.

    The returned centroid is still a minimiser; only its uniqueness is lost.
    """
