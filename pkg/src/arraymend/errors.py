"""Exception types shared across the package."""


class InfeasibleError(RuntimeError):
    """No excitation correction satisfying the pattern constraint was found."""


class NumericalFailureError(RuntimeError):
    """A solve produced non-finite values and was aborted."""


class BudgetExceededError(RuntimeError):
    """An enumeration hit its configured solve budget before finishing."""


class DegenerateBroadsideError(ValueError):
    """The pattern is exactly zero at broadside, so levels cannot be normalized."""


class NoMainlobeError(ValueError):
    """The normalized pattern is below the threshold at broadside."""


class EmptyRegionError(ValueError):
    """The requested mainlobe exclusion leaves no sidelobe samples."""


class CorrectionMaskError(ValueError):
    """A correction vector carries a nonzero entry at a forbidden element."""
