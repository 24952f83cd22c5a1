"""Expression trees shared by the program IR and the SMT encoding.

The language is quantifier-free linear integer arithmetic plus Booleans:
integer constants, variables, +, -, multiplication by a constant,
comparisons, not/and/or/implies, equality (on ints or bools) and ite.
Nonlinear products are rejected at construction time.

Expressions are immutable and hashable.  They can be evaluated under a
variable environment, type-checked, and printed as SMT-LIB s-expressions.
A small s-expression parser reads the prefix syntax used by the CFG
interchange format, e.g. ``(+ x_call 10)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

Value = Union[int, bool]


class ExprError(Exception):
    """Malformed, ill-typed or nonlinear expression."""


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Sub:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Mul:
    """Multiplication by an integer constant; the only product allowed."""

    coeff: int
    arg: "Expr"


@dataclass(frozen=True)
class Rel:
    """Comparison or equality.  op in {'<','<=','>','>=','=','!='}.

    '=' and '!=' also apply to Boolean operands.
    """

    op: str
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Ite:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


Expr = Union[
    IntConst, BoolConst, Var, Add, Sub, Mul, Rel, Not, And, Or, Implies, Ite
]

_REL_OPS = ("<", "<=", ">", ">=", "=", "!=")


def add(*args: Expr) -> Expr:
    flat = []
    for a in args:
        flat.extend(a.args if isinstance(a, Add) else (a,))
    if not flat:
        return IntConst(0)
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def conj(*args: Expr) -> Expr:
    if not args:
        return BoolConst(True)
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args: Expr) -> Expr:
    if not args:
        return BoolConst(False)
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def free_vars(e: Expr) -> set:
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        else:
            stack.extend(_children(n))
    return out


def _children(e: Expr) -> tuple:
    if isinstance(e, (IntConst, BoolConst, Var)):
        return ()
    if isinstance(e, (Add, And, Or)):
        return e.args
    if isinstance(e, Sub):
        return (e.a, e.b)
    if isinstance(e, Mul):
        return (e.arg,)
    if isinstance(e, Rel):
        return (e.a, e.b)
    if isinstance(e, Not):
        return (e.arg,)
    if isinstance(e, Implies):
        return (e.a, e.b)
    if isinstance(e, Ite):
        return (e.cond, e.then, e.other)
    raise ExprError(f"unknown expression node {e!r}")


def infer_type(e: Expr, env: Mapping[str, str]) -> str:
    """Return 'Int' or 'Bool'; env maps variable names to sorts."""
    if isinstance(e, IntConst):
        return "Int"
    if isinstance(e, BoolConst):
        return "Bool"
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"undeclared variable '{e.name}'") from None
    if isinstance(e, (Add, Sub, Mul)):
        for c in _children(e):
            if infer_type(c, env) != "Int":
                raise ExprError(f"arithmetic over non-integer operand in {to_sexpr(e)}")
        return "Int"
    if isinstance(e, Rel):
        ta, tb = infer_type(e.a, env), infer_type(e.b, env)
        if ta != tb:
            raise ExprError(f"comparison of {ta} with {tb} in {to_sexpr(e)}")
        if e.op not in ("=", "!=") and ta != "Int":
            raise ExprError(f"ordering comparison of Booleans in {to_sexpr(e)}")
        return "Bool"
    if isinstance(e, (Not, And, Or, Implies)):
        for c in _children(e):
            if infer_type(c, env) != "Bool":
                raise ExprError(f"Boolean operator over non-Boolean in {to_sexpr(e)}")
        return "Bool"
    if isinstance(e, Ite):
        if infer_type(e.cond, env) != "Bool":
            raise ExprError("ite condition must be Boolean")
        tt, to = infer_type(e.then, env), infer_type(e.other, env)
        if tt != to:
            raise ExprError("ite arms disagree on type")
        return tt
    raise ExprError(f"unknown expression node {e!r}")


def eval_expr(e: Expr, env: Mapping[str, Value]) -> Value:
    if isinstance(e, IntConst):
        return e.value
    if isinstance(e, BoolConst):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"unbound variable '{e.name}'") from None
    if isinstance(e, Add):
        return sum(eval_expr(a, env) for a in e.args)
    if isinstance(e, Sub):
        return eval_expr(e.a, env) - eval_expr(e.b, env)
    if isinstance(e, Mul):
        return e.coeff * eval_expr(e.arg, env)
    if isinstance(e, Rel):
        a, b = eval_expr(e.a, env), eval_expr(e.b, env)
        return {
            "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b,
            "=": a == b, "!=": a != b,
        }[e.op]
    if isinstance(e, Not):
        return not eval_expr(e.arg, env)
    if isinstance(e, And):
        return all(eval_expr(a, env) for a in e.args)
    if isinstance(e, Or):
        return any(eval_expr(a, env) for a in e.args)
    if isinstance(e, Implies):
        return (not eval_expr(e.a, env)) or eval_expr(e.b, env)
    if isinstance(e, Ite):
        return eval_expr(e.then if eval_expr(e.cond, env) else e.other, env)
    raise ExprError(f"unknown expression node {e!r}")


def _int_lit(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


def to_sexpr(e: Expr) -> str:
    if isinstance(e, IntConst):
        return _int_lit(e.value)
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return "(+ " + " ".join(to_sexpr(a) for a in e.args) + ")"
    if isinstance(e, Sub):
        return f"(- {to_sexpr(e.a)} {to_sexpr(e.b)})"
    if isinstance(e, Mul):
        return f"(* {_int_lit(e.coeff)} {to_sexpr(e.arg)})"
    if isinstance(e, Rel):
        op = "distinct" if e.op == "!=" else e.op
        return f"({op} {to_sexpr(e.a)} {to_sexpr(e.b)})"
    if isinstance(e, Not):
        return f"(not {to_sexpr(e.arg)})"
    if isinstance(e, And):
        return "(and " + " ".join(to_sexpr(a) for a in e.args) + ")"
    if isinstance(e, Or):
        return "(or " + " ".join(to_sexpr(a) for a in e.args) + ")"
    if isinstance(e, Implies):
        return f"(=> {to_sexpr(e.a)} {to_sexpr(e.b)})"
    if isinstance(e, Ite):
        return f"(ite {to_sexpr(e.cond)} {to_sexpr(e.then)} {to_sexpr(e.other)})"
    raise ExprError(f"unknown expression node {e!r}")


# --- s-expression parsing (prefix syntax of the CFG interchange format) ---

def tokenize_sexpr(text: str) -> Iterator[str]:
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            yield c
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j]
            i = j


def parse_sexpr(text: str) -> Expr:
    toks = list(tokenize_sexpr(text))
    expr, rest = _parse(toks, 0)
    if rest != len(toks):
        raise ExprError(f"trailing tokens after expression: {' '.join(toks[rest:])}")
    return expr


def _parse(toks, i):
    if i >= len(toks):
        raise ExprError("unexpected end of expression")
    t = toks[i]
    if t == ")":
        raise ExprError("unexpected ')'")
    if t != "(":
        return _atom(t), i + 1
    # compound form
    i += 1
    if i >= len(toks):
        raise ExprError("unterminated '('")
    head = toks[i]
    i += 1
    args = []
    while i < len(toks) and toks[i] != ")":
        a, i = _parse(toks, i)
        args.append(a)
    if i >= len(toks):
        raise ExprError("unterminated '('")
    i += 1  # consume ')'
    return _build(head, args), i


def _atom(t: str) -> Expr:
    if t == "true":
        return BoolConst(True)
    if t == "false":
        return BoolConst(False)
    try:
        return IntConst(int(t))
    except ValueError:
        return Var(t)


def _build(head: str, args: list) -> Expr:
    def arity(n):
        if len(args) != n:
            raise ExprError(f"'{head}' expects {n} argument(s), got {len(args)}")

    if head == "+":
        if not args:
            raise ExprError("'+' needs arguments")
        return add(*args)
    if head == "-":
        if len(args) == 1:
            if isinstance(args[0], IntConst):
                return IntConst(-args[0].value)
            return Sub(IntConst(0), args[0])
        arity(2)
        return Sub(args[0], args[1])
    if head == "*":
        arity(2)
        if isinstance(args[0], IntConst):
            return Mul(args[0].value, args[1])
        if isinstance(args[1], IntConst):
            return Mul(args[1].value, args[0])
        raise ExprError("nonlinear product: '*' needs a constant operand")
    if head in _REL_OPS or head == "distinct":
        arity(2)
        return Rel("!=" if head == "distinct" else head, args[0], args[1])
    if head == "not":
        arity(1)
        return Not(args[0])
    if head == "and":
        return conj(*args)
    if head == "or":
        return disj(*args)
    if head == "=>":
        arity(2)
        return Implies(args[0], args[1])
    if head == "ite":
        arity(3)
        return Ite(args[0], args[1], args[2])
    raise ExprError(f"unknown operator '{head}'")
