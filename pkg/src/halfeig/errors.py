"""Exception taxonomy.

Two broad families: bad input (maps to CLI exit code 2) and numerical
failure (exit code 3). Verification failures are not exceptions; suites
report them and the CLI turns them into exit code 1.
"""


class HalfeigError(Exception):
    """Base class for everything raised on purpose by this package."""

    code = "error"

    def oneline(self) -> str:
        return f"{self.code}: {self}"


class InputError(HalfeigError):
    """Problem data, file contents, or arguments are unusable."""

    code = "input_error"


class HypothesisError(InputError):
    """Inputs do not satisfy the hypothesis a check needs."""

    code = "hypothesis_violated"


class WindowError(InputError):
    """A ratio or parameter falls outside the admissible window."""

    code = "window_violated"


class VanishingDenominatorError(InputError):
    """A comparison function vanishes where it must not."""

    code = "u2_vanishes"


class NumericalError(HalfeigError):
    """A solver or integrator failed to converge."""

    code = "numerical_error"


class StepFailureError(NumericalError):
    code = "step_failure"


class NoBracketError(NumericalError):
    code = "no_bracket"


class NoRootError(NumericalError):
    code = "no_root"


class DegenerateZeroError(NumericalError):
    code = "degenerate_zero"


class WrongNodalCountError(NumericalError):
    """Converged to a root whose nodal class is not the requested one."""

    code = "wrong_nodal_count"

    def __init__(self, msg: str, got: int | None = None, wanted: int | None = None):
        super().__init__(msg)
        self.got = got
        self.wanted = wanted


class ContinuationStalledError(NumericalError):
    code = "continuation_stalled"


class NoCrossingError(NumericalError):
    """A branch never crosses the target lambda level."""

    code = "no_crossing"

    def __init__(self, msg: str, branch=None):
        super().__init__(msg)
        self.branch = branch
