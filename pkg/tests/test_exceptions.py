import pytest

from implicate.exceptions import (
    AmbiguityError,
    BudgetExceededError,
    DuplicateEdgeError,
    EdgeListParseError,
    ImplicateError,
    NotAtEquilibriumError,
    StructuralInputError,
    error_code_to_exception,
    exception_from_error_line,
    format_error_line,
)


def test_codes_are_unique() -> None:
    codes = [cls.error_code for cls in error_code_to_exception.values()]
    assert len(codes) == len(set(codes))
    assert all(error_code_to_exception[cls.error_code] is cls for cls in error_code_to_exception.values())


def test_error_line_is_a_single_line() -> None:
    line = format_error_line(EdgeListParseError(7, "rating must be\nnonzero"))
    assert line == "error: EDGE_LIST_PARSE: line 7: rating must be nonzero"


@pytest.mark.parametrize(
    ("error", "expected"),
    [
        (AmbiguityError("two components tie"), AmbiguityError),
        (NotAtEquilibriumError("still moving"), NotAtEquilibriumError),
        (DuplicateEdgeError(3, "a", "b"), StructuralInputError),
        (BudgetExceededError("max_nodes_exact", 40, 41), ImplicateError),
    ],
)
def test_error_line_round_trip(error: ImplicateError, expected: type) -> None:
    rebuilt = exception_from_error_line(format_error_line(error))
    assert type(rebuilt) is expected
    assert str(rebuilt) == str(error)


def test_foreign_lines_are_ignored() -> None:
    assert exception_from_error_line("warning: something") is None
