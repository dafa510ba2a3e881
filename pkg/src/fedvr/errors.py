"""Exception types shared across the solver."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (non-convergence, non-finite samples, instability)."""


class SingularPartitionError(NumericalError):
    """The reduced partition matrix is singular or hopelessly ill-conditioned.

    Usually means the partition supports a near-resonant homogeneous solution
    at this energy; a different partition length or order fixes it.
    """


class DegenerateMatchError(NumericalError):
    """Asymptotic matching failed because the wave function and its
    derivative both vanish at the match point."""


class ConfigError(Exception):
    """Invalid benchmark configuration (CLI flags or config file)."""
