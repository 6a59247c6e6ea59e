"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A linear-algebra or floating-point computation failed.

    Raised when a Gram matrix cannot be factorized, a posterior variance
    comes out negative beyond tolerance, or a likelihood evaluates to NaN.
    The message carries enough context (matrix size, sweep/interval, ...)
    to locate the failing step.
    """
