"""Exception hierarchy. Every error is also a ``ValueError`` so callers can catch broadly."""


class CvclError(ValueError):
    pass


class InvalidRangeError(CvclError):
    pass


class PacketClippedError(CvclError):
    pass


class GridMismatchError(CvclError):
    pass


class WeightSumError(CvclError):
    pass


class SizeCapError(CvclError):
    pass


class DomainError(CvclError):
    pass


class ResolutionError(CvclError):
    pass


class SingularKernelError(CvclError):
    pass


class ShiftTooLargeError(CvclError):
    pass


class EmptyIntervalError(CvclError):
    pass


class OverlapError(CvclError):
    pass


class OffLatticeError(CvclError):
    pass


class DegenerateKernelError(CvclError):
    pass


class InvalidStateError(CvclError):
    pass


class ConfigError(CvclError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class NumericalError(CvclError):
    pass
