"""Exception hierarchy shared by every module of the package."""


class MspcError(Exception):
    """Base class for all errors raised by batchmspc."""


# ingest
class MissingFileError(MspcError, FileNotFoundError):
    pass


class EmptyFileError(MspcError):
    pass


class NonNumericSampleError(MspcError, ValueError):
    def __init__(self, line: int, token: str = ""):
        self.line = line
        self.token = token
        super().__init__(f"non-numeric or non-finite sample on line {line}: {token!r}")


class IoFailureError(MspcError, OSError):
    pass


class ManifestError(MspcError, ValueError):
    pass


class InvalidSignalError(MspcError, ValueError):
    pass


# synth
class InvalidParamsError(MspcError, ValueError):
    pass


# spectral
class SignalTooShortError(MspcError, ValueError):
    pass


class BatchLengthTooSmallError(MspcError, ValueError):
    pass


class NonFiniteInputError(MspcError, ValueError):
    pass


class AsymmetricSpectrumError(MspcError, ValueError):
    pass


class TooManyComponentsError(MspcError, ValueError):
    pass


# features / pca / mspc
class TooFewBatchesError(MspcError, ValueError):
    pass


class DegenerateColumnError(MspcError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"feature column {name!r} has (near) zero spread")


class DimensionMismatchError(MspcError, ValueError):
    pass


class RankDeficientError(MspcError, ValueError):
    pass


class BadDimensionsError(MspcError, ValueError):
    pass


class DegenerateSpreadError(MspcError, ValueError):
    pass


# optimize
class InfeasibleBoundsError(MspcError, ValueError):
    pass


class EmptyFaultSetError(MspcError, ValueError):
    pass


class BaseModelInadequateError(MspcError):
    pass


# model_store
class VersionMismatchError(MspcError):
    pass


class CorruptModelError(MspcError):
    pass


# cli / report
class LabelError(MspcError):
    pass


class ConfigMismatchError(MspcError):
    pass


class EmptyChartError(MspcError):
    pass
