"""Exception hierarchy shared by all blockent modules."""


class BlockEntError(Exception):
    """Base class for every error raised by blockent."""


class DimensionMismatch(BlockEntError, ValueError):
    pass


class NotHermitian(BlockEntError, ValueError):
    def __init__(self, max_deviation, tol):
        self.max_deviation = float(max_deviation)
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max |m - m^dagger| = {self.max_deviation:.3e} > {tol:.1e}"
        )


class ExpOverflow(BlockEntError, OverflowError):
    pass


class InvalidState(BlockEntError, ValueError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class PartitionInvalid(BlockEntError, ValueError):
    pass


class NotBlockDiagonal(BlockEntError, ValueError):
    pass


class NotIsometry(BlockEntError, ValueError):
    pass


class RankMismatch(BlockEntError, ValueError):
    pass


class EmptyBranch(BlockEntError, ValueError):
    """One branch of a superposition split carries (numerically) zero weight.

    The split that was computed is attached as ``split`` so callers can still
    treat the state as confined to a single block.
    """

    def __init__(self, message, split=None):
        self.split = split
        super().__init__(message)


class BudgetZero(BlockEntError, ValueError):
    pass


class DomainError(BlockEntError, ValueError):
    pass


class OutOfRange(BlockEntError, ValueError):
    pass


class NonPositiveTemperature(BlockEntError, ValueError):
    pass


class InfiniteModeUnsupported(BlockEntError, ValueError):
    pass
