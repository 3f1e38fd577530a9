"""Exception hierarchy.

Every library error carries a short ``code`` string so the batch runner can
map it to a stable diagnostic without parsing messages.
"""


class ToricStackError(Exception):
    code = "E_GENERIC"


class InfiniteCokernel(ToricStackError):
    code = "E_INFINITE_COKERNEL"


class NotInLambdaS(ToricStackError):
    code = "E_NOT_IN_LAMBDA_S"


class UnboundedCone(ToricStackError):
    code = "E_UNBOUNDED_CONE"


class NotAdjacent(ToricStackError):
    code = "E_NOT_ADJACENT"


class SingularCone(ToricStackError):
    code = "E_SINGULAR_CONE"


class FractionalPartMismatch(ToricStackError):
    code = "E_FRACTIONAL_PART_MISMATCH"


class DivisionByNilpotent(ToricStackError, ZeroDivisionError):
    code = "E_DIVISION_BY_NILPOTENT"


class PoleAtEvaluationPoint(ToricStackError):
    code = "E_POLE_AT_EVALUATION_POINT"


class HigherOrderPole(ToricStackError):
    code = "E_HIGHER_ORDER_POLE"


class NonLinearFactor(ToricStackError):
    code = "E_NON_LINEAR_FACTOR"


class ExpansionVariableAmbiguous(ToricStackError):
    code = "E_EXPANSION_VARIABLE_AMBIGUOUS"


class UnsupportedBase(ToricStackError):
    code = "E_UNSUPPORTED_BASE"


class LogResidue(ToricStackError):
    code = "E_LOG_RESIDUE"


class InvalidFan(ToricStackError):
    code = "E_INVALID_FAN"


class ParseError(ToricStackError):
    """Malformed problem file; ``field`` names the offending location."""

    code = "E_PARSE"

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class TaskError(ToricStackError):
    """A library precondition failed while running a task."""

    code = "E_TASK"

    def __init__(self, cause: ToricStackError, field: str = ""):
        super().__init__(f"{field}: {cause.code}: {cause}" if field else f"{cause.code}: {cause}")
        self.cause = cause
        self.field = field
