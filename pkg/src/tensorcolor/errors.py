"""Exception hierarchy shared by every module."""


class TensorColorError(Exception):
    """Base class for all library errors."""


class InvalidParams(TensorColorError, ValueError):
    pass


class SizeCap(TensorColorError):
    """An exhaustive routine was asked to run above its size cap."""


class CapExceeded(TensorColorError):
    """A configurable safety cap (triangles, components) was hit."""


class GenerationFailed(TensorColorError):
    pass


class SizeMismatch(TensorColorError, ValueError):
    pass


class Fail(TensorColorError):
    """An algorithm declined its input (the FAIL outcome).

    ``stage`` names the check that rejected, e.g. ``"coloring"`` or ``"quality"``.
    """

    def __init__(self, stage: str, reason: str = ""):
        self.stage = stage
        self.reason = reason
        super().__init__(f"{stage}: {reason}" if reason else stage)


class IncompleteCover(TensorColorError):
    """The main reconstruction left vertices unclaimed."""

    def __init__(self, uncovered, partial=None):
        self.uncovered = uncovered
        self.partial = partial
        super().__init__(f"{len(uncovered)} vertices not covered by any accepted component")


class NotNearTensor(TensorColorError):
    pass


class UnsatisfiedAssignment(TensorColorError, ValueError):
    pass


class NotAProperColoring(TensorColorError, ValueError):
    pass


class Inconsistent(TensorColorError):
    pass
