"""Tiny whitelisted expression language for closed-form coefficient pieces.

Expressions are ordinary Python arithmetic over the position variables
(``x`` in one dimension, ``x1, ..., xd`` in general) with a handful of
numpy functions. They are parsed with :mod:`ast`, validated against a
whitelist and compiled once; evaluation is vectorized.

>>> f = compile_expr("abs(12*x - 6) - 1", d=1)
>>> f(np.array([[0.5]]))
array([-1.+0.j])
"""

from __future__ import annotations

import ast
from functools import lru_cache

import numpy as np

from ._errors import DomainError

_FUNCS = {
    "sqrt": np.sqrt,
    "abs": np.abs,
    "exp": np.exp,
    "log": np.log,
    "cos": np.cos,
    "sin": np.sin,
    "tan": np.tan,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "floor": np.floor,
}
_CONSTS = {"pi": np.pi, "e": np.e, "i": 1j, "I": 1j}

_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
    ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


def _variables(d: int) -> tuple[str, ...]:
    names = tuple(f"x{k + 1}" for k in range(d))
    return ("x",) + names if d == 1 else names


def validate_expr(text: str, d: int) -> ast.Expression:
    """Parse `text` and reject anything outside the grammar."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse expression {text!r}: {exc.msg}") from None
    names = set(_variables(d)) | set(_CONSTS)
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise DomainError(f"construct {type(node).__name__} not allowed in {text!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise DomainError(f"unknown function in {text!r}")
            if node.keywords or len(node.args) != 1:
                raise DomainError(f"functions take exactly one argument: {text!r}")
        elif isinstance(node, ast.Name):
            if node.id not in names and node.id not in _FUNCS:
                raise DomainError(f"unknown name {node.id!r} in {text!r}")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, complex)) or isinstance(node.value, bool):
                raise DomainError(f"only numeric literals allowed in {text!r}")
    return tree


@lru_cache(maxsize=512)
def compile_expr(text: str, d: int):
    """Return a vectorized callable ``f(x) -> complex ndarray`` for `text`.

    ``x`` is an array of shape ``(n, d)``; the result has shape ``(n,)``.
    """
    tree = validate_expr(text, d)
    code = compile(tree, f"<expr {text}>", "eval")
    varnames = _variables(d)

    def func(x):
        x = np.asarray(x, dtype=float)
        env = dict(_FUNCS)
        env.update(_CONSTS)
        for k in range(d):
            env[f"x{k + 1}"] = x[:, k]
        if d == 1:
            env["x"] = x[:, 0]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = eval(code, {"__builtins__": {}}, env)  # noqa: S307 - whitelisted AST
        out = np.asarray(out, dtype=complex)
        return np.broadcast_to(out, (x.shape[0],)).copy()

    func.__doc__ = f"{text}  (variables: {', '.join(varnames)})"
    return func
