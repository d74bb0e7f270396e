"""Exception hierarchy shared by the library, the service and the CLI.

Errors fall into two families. ``InputError`` covers malformed user input
(parsing, configuration, violated preconditions); the CLI maps it to exit
code 2. ``NumericError`` covers failures of a numerical method that was
given valid input; the CLI maps it to exit code 3.
"""


class ExactWKBError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(ExactWKBError, ValueError):
    exit_code = 2


class ParseError(InputError):
    """Syntax or grammar error in a polynomial expression."""

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class ConfigError(InputError):
    pass


class NumericError(ExactWKBError, ArithmeticError):
    exit_code = 3


class ConvergenceError(NumericError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class TurningPointProximityError(NumericError):
    pass


class MultipleTurningPointError(InputError):
    pass


class StepCollapseError(NumericError):
    pass


class ToleranceNotMetError(NumericError):
    def __init__(self, message, achieved=None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved error {achieved:.3e})"
        super().__init__(message)


class SpectralResolutionError(NumericError):
    pass


class CanonicityError(NumericError):
    pass


class DegenerateSystemError(NumericError):
    pass


class PoleOnRayError(NumericError):
    def __init__(self, pole, ray_angle):
        self.pole = pole
        self.ray_angle = ray_angle
        super().__init__(
            f"pole-on-ray: Pade pole at s = {pole.real:.6g}{pole.imag:+.6g}j "
            f"lies on the ray with angle {ray_angle:.6g}"
        )


class DivergenceError(NumericError):
    pass


class StiffnessError(NumericError):
    pass


class IllConditionedError(NumericError):
    pass


class BracketExhaustedError(NumericError):
    pass


class ContourSingularityError(NumericError):
    pass
