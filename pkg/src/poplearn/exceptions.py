"""Exception types shared across the package."""


class DegeneracyError(RuntimeError):
    """Raised when particle weights, samples or moments collapse.

    Covers total weight underflow (every particle got zero likelihood),
    zero-variance samples handed to density or moment-matching routines,
    and chains that never accepted a proposal. Maps to exit code 2 in the
    command line interface.
    """
