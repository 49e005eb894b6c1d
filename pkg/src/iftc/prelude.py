"""Builtin function signatures.

``Tuple.length`` is not listed: it parses to the LengthOf special form.
``append`` (list concatenation) extends the minimal set so the flatten
example can be written without mutation.
"""

from __future__ import annotations

from .types import BOOLEAN, NUMBER, STRING, FuncT, ListT, TypeVar

PRELUDE_VERSION = "1"

_T = TypeVar("T")

# name -> (type parameters, signature)
PRELUDE: dict[str, tuple[tuple[str, ...], FuncT]] = {
    "String.length": ((), FuncT((STRING,), NUMBER, names=("s",))),
    "String.append": ((), FuncT((STRING, STRING), STRING, names=("s", "t"))),
    "sum": ((), FuncT((ListT(NUMBER),), NUMBER, names=("xs",))),
    "cons": (("T",), FuncT((_T, ListT(_T)), ListT(_T), names=("x", "xs"))),
    "append": (("T",), FuncT((ListT(_T), ListT(_T)), ListT(_T), names=("xs", "ys"))),
}

ARITH_SIG = ((NUMBER, NUMBER), NUMBER)
COMPARE_SIG = ((NUMBER, NUMBER), BOOLEAN)
