from typing import ClassVar, Final, Optional


class ImplicateError(Exception):
    error_code: ClassVar[str] = "IMPLICATE"


class StructuralInputError(ImplicateError):
    error_code = "STRUCTURAL_INPUT"


class EdgeListParseError(StructuralInputError):
    error_code = "EDGE_LIST_PARSE"

    def __init__(self, line_number: int, reason: str, text: str = ""):
        self.line_number = line_number
        self.reason = reason
        self.text = text
        super().__init__(f"line {line_number}: {reason}")


class DuplicateEdgeError(StructuralInputError):
    error_code = "DUPLICATE_EDGE"

    def __init__(self, line_number: int, source: str, target: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: duplicate edge {source} -> {target}")


class BudgetExceededError(ImplicateError):
    error_code = "BUDGET_EXCEEDED"

    def __init__(self, cap: str, limit: float, requested: float):
        self.cap = cap
        self.limit = limit
        self.requested = requested
        super().__init__(f"{cap} is {limit}, search needs {requested}")


class AmbiguityError(ImplicateError):
    error_code = "AMBIGUOUS"


class PreconditionError(ImplicateError):
    error_code = "PRECONDITION"


class NotAtEquilibriumError(PreconditionError):
    error_code = "NOT_AT_EQUILIBRIUM"


class InfeasibleError(ImplicateError):
    error_code = "INFEASIBLE"


class InvariantViolationError(ImplicateError):
    error_code = "INVARIANT_VIOLATION"


class ArtifactIntegrityError(ImplicateError):
    error_code = "ARTIFACT_INTEGRITY"


error_code_to_exception: Final[dict[str, type[ImplicateError]]] = {
    "IMPLICATE": ImplicateError,
    "STRUCTURAL_INPUT": StructuralInputError,
    "BUDGET_EXCEEDED": BudgetExceededError,
    "AMBIGUOUS": AmbiguityError,
    "PRECONDITION": PreconditionError,
    "NOT_AT_EQUILIBRIUM": NotAtEquilibriumError,
    "INFEASIBLE": InfeasibleError,
    "INVARIANT_VIOLATION": InvariantViolationError,
    "ARTIFACT_INTEGRITY": ArtifactIntegrityError,
}


def format_error_line(error: ImplicateError) -> str:
    """Render an error as the single machine-parsable line the CLI prints."""
    message = " ".join(str(error).split())
    return f"error: {error.error_code}: {message}"


def exception_from_error_line(line: str) -> Optional[ImplicateError]:
    """Rebuild an exception from a line produced by `format_error_line`.

    Codes whose exceptions need structured arguments (edge-list, duplicate and
    budget errors) come back as their nearest plain ancestor.
    """
    prefix, _, rest = line.strip().partition(": ")
    if prefix != "error" or not rest:
        return None

    code, _, message = rest.partition(": ")
    if code in ("EDGE_LIST_PARSE", "DUPLICATE_EDGE"):
        return StructuralInputError(message)
    if code == "BUDGET_EXCEEDED":
        return ImplicateError(message)

    subclass = error_code_to_exception.get(code, ImplicateError)
    return subclass(message)
