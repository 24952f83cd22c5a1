"""Mini-language front end.

A small structured imperative language for writing analyzer inputs by hand:

    x_old = nondet(-10000, 10000);   # range-constrained input
    x = nondet(-10000, 10000);
    if (x > x_old + 10) {
        cost 2;                      # cycles charged to this block
        x = x_old + 10;
    }
    if (x < x_old - 10) {
        x = x_old - 10;
    }
    return;

Statements are ';'-terminated, '#' starts a comment.  Supported statements:
assignments, `nondet(lo,hi)` inputs, `if`/`else`, `for v in a..b` with
constant bounds, `while`, `assume(cond)`, `cost k` and `return`.

`parse` builds a Program in SSA form: each `if`/`else` lowers to a decision
block, arm blocks and a merge block with phis for the variables assigned in
either arm.  Loops lower to a header with loop phis and a back edge; they
must be unrolled (`unroll`) before the program is analyzed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import exprs
from .exprs import (Add, And, BoolConst, Expr, IntConst, Ite, Mul, Not, Or,
                    Rel, Sub, Var)
from .ir import (Block, Branch, CostModel, Goto, HavocVar, LoopInfo, Phi,
                 Program, Return)


class MinilangError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


# --- tokens ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||&&|==|!=|<=|>=|\.\.|[-+*!<>=(){};,])
""", re.VERBOSE)

_KEYWORDS = {"if", "else", "for", "while", "in", "assume", "cost", "return",
             "nondet", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'ident' | 'op' | 'kw' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MinilangError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tk = kind
            if kind == "ident" and lexeme in _KEYWORDS:
                tk = "kw"
            toks.append(Token(tk, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


# --- AST ---------------------------------------------------------------------

@dataclass
class SAssign:
    var: str
    value: Expr


@dataclass
class SHavoc:
    var: str
    lo: Optional[int]
    hi: Optional[int]


@dataclass
class SIf:
    cond: Expr
    then_body: list
    else_body: list


@dataclass
class SFor:
    var: str
    lo: int
    hi: int
    body: list


@dataclass
class SWhile:
    cond: Expr
    body: list


@dataclass
class SAssume:
    cond: Expr


@dataclass
class SCost:
    amount: int


@dataclass
class SReturn:
    pass


@dataclass
class SourceProgram:
    name: str
    body: list = field(default_factory=list)


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0
        self.nondet_counter = 0
        self.pending: List[SHavoc] = []  # implicit havocs for nested nondet()

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None):
        t = tok or self.peek()
        raise MinilangError(msg, t.line, t.col)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.peek()
        if t.kind == "eof":
            self.error(f"unexpected end of input, expected {text or kind}")
        if t.kind != kind or (text is not None and t.text != text):
            self.error(f"expected {text or kind}, found {t.text!r}")
        return self.next()

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    # -- statements --

    def parse_program(self) -> List:
        body = self.parse_stmts(until_eof=True)
        self.expect("eof")
        return body

    def parse_stmts(self, until_eof=False) -> List:
        out = []
        while True:
            t = self.peek()
            if t.kind == "eof":
                if until_eof:
                    return out
                self.error("unexpected end of input, expected '}'")
            if t.kind == "op" and t.text == "}":
                if until_eof:
                    self.error("unmatched '}'")
                return out
            out.extend(self.parse_stmt())

    def parse_stmt(self) -> List:
        t = self.peek()
        if t.kind == "kw":
            if t.text == "if":
                return self.parse_if()
            if t.text == "for":
                return self.parse_for()
            if t.text == "while":
                return self.parse_while()
            if t.text == "assume":
                self.next()
                self.expect("op", "(")
                cond = self.parse_expr(boolean=True)
                self.expect("op", ")")
                self.expect("op", ";")
                return self.drain() + [SAssume(cond)]
            if t.text == "cost":
                self.next()
                amt = int(self.expect("int").text)
                self.expect("op", ";")
                return [SCost(amt)]
            if t.text == "return":
                self.next()
                self.expect("op", ";")
                return [SReturn()]
            self.error(f"unexpected keyword '{t.text}'")
        if t.kind == "ident":
            name = self.next().text
            self.expect("op", "=")
            if self.at("kw", "nondet"):
                lo, hi = self.parse_nondet_args()
                self.expect("op", ";")
                return [SHavoc(name, lo, hi)]
            value = self.parse_expr(boolean=False)
            self.expect("op", ";")
            return self.drain() + [SAssign(name, value)]
        self.error(f"unexpected token {t.text!r}")

    def drain(self) -> List:
        out, self.pending = self.pending, []
        return out

    def parse_nondet_args(self) -> Tuple[Optional[int], Optional[int]]:
        self.expect("kw", "nondet")
        self.expect("op", "(")
        if self.at("op", ")"):
            self.next()
            return None, None
        lo = self.parse_int_literal()
        self.expect("op", ",")
        hi = self.parse_int_literal()
        self.expect("op", ")")
        return lo, hi

    def parse_int_literal(self) -> int:
        neg = False
        if self.at("op", "-"):
            self.next()
            neg = True
        v = int(self.expect("int").text)
        return -v if neg else v

    def parse_if(self) -> List:
        self.expect("kw", "if")
        self.expect("op", "(")
        cond = self.parse_expr(boolean=True)
        self.expect("op", ")")
        pre = self.drain()
        then_body = self.parse_block()
        else_body: List = []
        if self.at("kw", "else"):
            self.next()
            if self.at("kw", "if"):
                else_body = self.parse_if()
            else:
                else_body = self.parse_block()
        return pre + [SIf(cond, then_body, else_body)]

    def parse_for(self) -> List:
        self.expect("kw", "for")
        var = self.expect("ident").text
        self.expect("kw", "in")
        lo = self.parse_int_literal()
        self.expect("op", "..")
        hi = self.parse_int_literal()
        body = self.parse_block()
        return [SFor(var, lo, hi, body)]

    def parse_while(self) -> List:
        self.expect("kw", "while")
        self.expect("op", "(")
        cond = self.parse_expr(boolean=True)
        self.expect("op", ")")
        pre = self.drain()
        body = self.parse_block()
        return pre + [SWhile(cond, body)]

    def parse_block(self) -> List:
        self.expect("op", "{")
        body = self.parse_stmts()
        self.expect("op", "}")
        return body

    # -- expressions (precedence climbing) --

    def parse_expr(self, boolean: bool) -> Expr:
        e = self.parse_or()
        if boolean and isinstance(e, Var) and e.name.startswith("$nd"):
            # bare nondet() used as a condition: nondeterministic test
            return Rel("!=", e, IntConst(0))
        return e

    def parse_or(self) -> Expr:
        e = self.parse_and()
        while self.at("op", "||"):
            self.next()
            e = exprs.disj(e, self.parse_and())
        return e

    def parse_and(self) -> Expr:
        e = self.parse_not()
        while self.at("op", "&&"):
            self.next()
            e = exprs.conj(e, self.parse_not())
        return e

    def parse_not(self) -> Expr:
        if self.at("op", "!"):
            self.next()
            return Not(self.parse_not())
        return self.parse_cmp()

    def parse_cmp(self) -> Expr:
        e = self.parse_sum()
        t = self.peek()
        if t.kind == "op" and t.text in ("<", "<=", ">", ">=", "==", "!="):
            self.next()
            op = "=" if t.text == "==" else t.text
            return Rel(op, e, self.parse_sum())
        return e

    def parse_sum(self) -> Expr:
        e = self.parse_term()
        while True:
            if self.at("op", "+"):
                self.next()
                e = exprs.add(e, self.parse_term())
            elif self.at("op", "-"):
                self.next()
                e = Sub(e, self.parse_term())
            else:
                return e

    def parse_term(self) -> Expr:
        e = self.parse_unary()
        while self.at("op", "*"):
            tok = self.next()
            rhs = self.parse_unary()
            if isinstance(e, IntConst):
                e = Mul(e.value, rhs)
            elif isinstance(rhs, IntConst):
                e = Mul(rhs.value, e)
            else:
                self.error("nonlinear product (one factor must be a constant)", tok)
        return e

    def parse_unary(self) -> Expr:
        if self.at("op", "-"):
            self.next()
            e = self.parse_unary()
            if isinstance(e, IntConst):
                return IntConst(-e.value)
            return Sub(IntConst(0), e)
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntConst(int(t.text))
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return BoolConst(t.text == "true")
        if t.kind == "kw" and t.text == "nondet":
            lo, hi = self.parse_nondet_args()
            self.nondet_counter += 1
            name = f"$nd{self.nondet_counter}"
            self.pending.append(SHavoc(name, lo, hi))
            return Var(name)
        if t.kind == "ident":
            self.next()
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            self.next()
            e = self.parse_or()
            self.expect("op", ")")
            return e
        if t.kind == "eof":
            self.error("unexpected end of input in expression")
        self.error(f"unexpected token {t.text!r} in expression")


# --- lowering to SSA CFG -----------------------------------------------------

class UnsupportedConstructError(Exception):
    pass


class _Lowerer:
    """Turns a statement list into a Program, renaming into SSA on the fly."""

    def __init__(self, name: str, allow_loops: bool):
        self.name = name
        self.allow_loops = allow_loops
        self.blocks: List[Block] = []
        self.block_costs: Dict[str, int] = {}
        self.inputs: List[HavocVar] = []
        self.loops: List[LoopInfo] = []
        self.env: Dict[str, str] = {}        # source var -> current SSA name
        self.versions: Dict[str, int] = {}   # source var -> next version number
        self.if_counter = 0
        self.loop_counter = 0
        self.current: Optional[Block] = None
        self.exit_block = Block("exit", term=Return())
        self.returned = False

    # -- naming --

    def fresh(self, src: str) -> str:
        k = self.versions.get(src, 0)
        self.versions[src] = k + 1
        return src if k == 0 else f"{src}.{k}"

    def new_block(self, bid: str) -> Block:
        b = Block(bid, term=Return())
        self.blocks.append(b)
        return b

    def seal(self, term) -> None:
        self.current.term = term

    # -- statement dispatch --

    def lower(self, body: List) -> Program:
        self.current = self.new_block("entry")
        self.lower_stmts(body)
        if not self.returned:
            self.seal(Goto("exit"))
        self.blocks.append(self.exit_block)
        exit_id = self._absorb_trivial_exit()
        return Program(self.name, self.blocks, "entry", exit_id,
                       self.inputs, loops=self.loops)

    def _absorb_trivial_exit(self) -> str:
        """Fold the dedicated exit block into its single Goto predecessor.

        Keeps straight-line programs at one block and makes the last merge
        of an if cascade the returning block; the separate exit block only
        survives when several returns actually need a join point.
        """
        preds = [b for b in self.blocks
                 if (isinstance(b.term, Goto) and b.term.target == "exit")
                 or (isinstance(b.term, Branch)
                     and "exit" in (b.term.then_id, b.term.else_id))]
        if len(preds) == 1 and isinstance(preds[0].term, Goto):
            preds[0].term = Return()
            self.blocks.remove(self.exit_block)
            return preds[0].id
        return "exit"

    def lower_stmts(self, stmts: List) -> None:
        for i, s in enumerate(stmts):
            if self.returned:
                raise UnsupportedConstructError("unreachable code after return")
            if isinstance(s, SAssign):
                value = self.rename(s.value)
                self.current.assigns.append((self.fresh(s.var), value))
                self.env[s.var] = self.current.assigns[-1][0]
            elif isinstance(s, SHavoc):
                name = self.fresh(s.var)
                self.inputs.append(HavocVar(name, s.lo, s.hi))
                self.env[s.var] = name
            elif isinstance(s, SAssume):
                self.current.assumes.append(self.rename(s.cond))
            elif isinstance(s, SCost):
                bid = self.current.id
                self.block_costs[bid] = self.block_costs.get(bid, 0) + s.amount
            elif isinstance(s, SReturn):
                self.seal(Goto("exit"))
                self.returned = True
            elif isinstance(s, SIf):
                self.lower_if(s)
            elif isinstance(s, (SFor, SWhile)):
                if not self.allow_loops:
                    raise UnsupportedConstructError("loop survived unrolling")
                self.lower_loop(s)
            else:
                raise UnsupportedConstructError(f"unknown statement {s!r}")

    def rename(self, e: Expr) -> Expr:
        if isinstance(e, Var):
            if e.name not in self.env:
                raise UnsupportedConstructError(f"use of undefined variable '{e.name}'")
            return Var(self.env[e.name])
        kids = exprs._children(e)
        if not kids:
            return e
        new = tuple(self.rename(k) for k in kids)
        if isinstance(e, Add):
            return Add(new)
        if isinstance(e, Sub):
            return Sub(*new)
        if isinstance(e, Mul):
            return Mul(e.coeff, new[0])
        if isinstance(e, Rel):
            return Rel(e.op, *new)
        if isinstance(e, Not):
            return Not(new[0])
        if isinstance(e, And):
            return And(new)
        if isinstance(e, Or):
            return Or(new)
        if isinstance(e, exprs.Implies):
            return exprs.Implies(*new)
        if isinstance(e, Ite):
            return Ite(*new)
        raise UnsupportedConstructError(f"unsupported expression node {e!r}")

    # -- structured control flow --

    def lower_if(self, s: SIf) -> None:
        self.if_counter += 1
        n = self.if_counter
        sfx = "" if n == 1 else str(n)
        cond = self.rename(s.cond)
        decision = self.current
        env_before = dict(self.env)

        then_blk = self.new_block(f"if.then{sfx}")
        self.current = then_blk
        self.lower_stmts(s.then_body)
        then_end, then_returned = self.current, self.returned
        env_then = dict(self.env)
        self.returned = False

        self.env = dict(env_before)
        if s.else_body:
            else_blk = self.new_block(f"if.else{sfx}")
            self.current = else_blk
            self.lower_stmts(s.else_body)
            else_end, else_returned = self.current, self.returned
            env_else = dict(self.env)
            self.returned = False
        else:
            else_blk = None
            else_end, else_returned = decision, False
            env_else = env_before

        merge = self.new_block(f"if.end{sfx}")
        decision.term = Branch(cond, then_blk.id, else_blk.id if else_blk else merge.id)
        if not then_returned:
            then_end.term = Goto(merge.id)
        if else_blk and not else_returned:
            else_end.term = Goto(merge.id)

        if then_returned and else_returned:
            # both arms leave; the merge block is unreachable
            self.blocks.remove(merge)
            self.returned = True
            return

        if then_returned:
            self.env = env_else
            self.current = merge
            return
        if else_returned:
            self.env = env_then
            self.current = merge
            return

        # both arms flow into the merge: phi for every variable whose SSA
        # name differs between the arms
        new_env = dict(env_else)
        for var in sorted(set(env_then) & set(env_else)):
            a, b = env_then[var], env_else[var]
            if a == b:
                continue
            target = self.fresh(var)
            merge.phis.append(Phi(target, ((then_end.id, Var(a)),
                                           (else_end.id, Var(b)))))
            new_env[var] = target
        # drop vars defined in only one arm: they do not survive the join
        for var in set(env_then) ^ set(env_else):
            new_env.pop(var, None)
        self.env = new_env
        self.current = merge

    def lower_loop(self, s) -> None:
        self.loop_counter += 1
        n = self.loop_counter
        is_for = isinstance(s, SFor)
        if is_for and s.var in self.env:
            raise UnsupportedConstructError(
                f"loop variable '{s.var}' shadows an existing variable")
        assigned = sorted(_assigned_vars(s.body) & set(self.env))
        if is_for and s.var in _assigned_vars(s.body):
            raise UnsupportedConstructError(
                f"loop variable '{s.var}' assigned inside the loop body")

        pre = self.current
        if is_for:
            init_name = self.fresh(s.var)
            pre.assigns.append((init_name, IntConst(s.lo)))
            self.env[s.var] = init_name

        header = self.new_block(f"loop.head{n}")
        after_id = f"loop.end{n}"
        pre.term = Goto(header.id)

        # loop phis: one per assigned var (plus the counter), latch value
        # patched once the body is lowered
        entry_env = dict(self.env)
        phi_targets: Dict[str, str] = {}
        carried = ([s.var] if is_for else []) + assigned
        for var in carried:
            phi_targets[var] = self.fresh(var)
            self.env[var] = phi_targets[var]
        header_env = dict(self.env)

        cond = (Rel("<", Var(self.env[s.var]), IntConst(s.hi)) if is_for
                else self.rename(s.cond))

        body_start = len(self.blocks)
        body_blk = self.new_block(f"loop.body{n}")
        header.term = Branch(cond, body_blk.id, after_id)
        self.current = body_blk
        self.lower_stmts(s.body)
        if self.returned:
            raise UnsupportedConstructError("return inside a loop body")
        latch = self.current
        if is_for:
            nxt = self.fresh(s.var)
            latch.assigns.append((nxt, Add((Var(self.env[s.var]), IntConst(1)))))
            self.env[s.var] = nxt
        latch.term = Goto(header.id)

        for var in carried:
            header.phis.append(Phi(phi_targets[var],
                                   ((pre.id, Var(entry_env[var])),
                                    (latch.id, Var(self.env[var])))))

        loop_block_ids = (header.id,) + tuple(b.id for b in self.blocks[body_start:])
        self.loops.append(LoopInfo(header.id, latch.id, loop_block_ids,
                                   (s.hi - s.lo) if is_for else None))

        after = self.new_block(after_id)
        self.env = {v: header_env.get(v, entry_env.get(v)) for v in entry_env}
        for var in carried:
            self.env[var] = phi_targets[var]
        self.current = after


def _assigned_vars(stmts: List) -> set:
    out = set()
    for s in stmts:
        if isinstance(s, (SAssign, SHavoc)):
            out.add(s.var)
        elif isinstance(s, SIf):
            out |= _assigned_vars(s.then_body) | _assigned_vars(s.else_body)
        elif isinstance(s, (SFor, SWhile)):
            out |= _assigned_vars(s.body)
            if isinstance(s, SFor):
                out.add(s.var)
    return out


def parse(text: str, name: str = "program") -> Tuple[Program, CostModel]:
    """Parse mini-language source into a Program and its CostModel.

    The cost model carries the `cost` statements as block costs; all edges
    cost zero.  Loops are kept in the graph (header phis and a back edge);
    run `unroll` before analysis.
    """
    body = _Parser(tokenize(text)).parse_program()
    lo = _Lowerer(name, allow_loops=True)
    try:
        program = lo.lower(body)
    except UnsupportedConstructError as e:
        raise MinilangError(str(e), 0, 0) from None
    program.source = SourceProgram(name, body)
    costs = CostModel({e.id: 0 for e in program.edges}, lo.block_costs)
    return program, costs


class UnrollError(Exception):
    pass


def unroll(p: Program, default_bound: Optional[int] = None, *,
           costs: Optional[CostModel] = None,
           limit: int = 1024) -> Tuple[Program, CostModel]:
    """Replace every loop by bounded copies of its body; returns a loop-free
    Program with freshly renamed SSA variables and the rebuilt cost model.

    `for` loops use their constant trip count; `while` loops take
    `default_bound` and get an unwinding assumption after the last copy.
    Programs without loops are returned unchanged, along with the caller's
    cost model (or a zero model when none is given).
    """
    if not p.loops:
        return p, (costs if costs is not None
                   else CostModel({e.id: 0 for e in p.edges}))
    if p.source is None:
        raise UnrollError("program has cycles but no structured source to unroll")

    counter = [max((int(m.group(1)) for m in
                    (re.match(r"\$nd(\d+)$", hv.name) for hv in p.inputs) if m),
                   default=0)]

    def freshen(e: Expr, mapping: Dict[str, str]) -> Expr:
        if isinstance(e, Var):
            return Var(mapping.get(e.name, e.name))
        kids = exprs._children(e)
        if not kids:
            return e
        new = tuple(freshen(k, mapping) for k in kids)
        cls = type(e)
        if isinstance(e, Add):
            return Add(new)
        if isinstance(e, (And, Or)):
            return cls(new)
        if isinstance(e, Mul):
            return Mul(e.coeff, new[0])
        if isinstance(e, Rel):
            return Rel(e.op, *new)
        return cls(*new)

    def clone(stmts: List) -> List:
        """Deep-copy statements, renaming implicit nondet inputs apart."""
        mapping: Dict[str, str] = {}
        return [_clone_stmt(s, mapping) for s in stmts]

    def _clone_stmt(s, mapping):
        if isinstance(s, SHavoc):
            if s.var.startswith("$nd"):
                counter[0] += 1
                mapping[s.var] = f"$nd{counter[0]}"
                return SHavoc(mapping[s.var], s.lo, s.hi)
            return SHavoc(s.var, s.lo, s.hi)
        if isinstance(s, SAssign):
            return SAssign(s.var, freshen(s.value, mapping))
        if isinstance(s, SAssume):
            return SAssume(freshen(s.cond, mapping))
        if isinstance(s, SCost):
            return SCost(s.amount)
        if isinstance(s, SReturn):
            return SReturn()
        if isinstance(s, SIf):
            return SIf(freshen(s.cond, mapping),
                       [_clone_stmt(x, mapping) for x in s.then_body],
                       [_clone_stmt(x, mapping) for x in s.else_body])
        if isinstance(s, SFor):
            return SFor(s.var, s.lo, s.hi, [_clone_stmt(x, mapping) for x in s.body])
        if isinstance(s, SWhile):
            return SWhile(freshen(s.cond, mapping),
                          [_clone_stmt(x, mapping) for x in s.body])
        raise UnrollError(f"unknown statement {s!r}")

    def expand(stmts: List) -> List:
        out = []
        for s in stmts:
            if isinstance(s, SIf):
                out.append(SIf(s.cond, expand(s.then_body), expand(s.else_body)))
            elif isinstance(s, SFor):
                trips = max(0, s.hi - s.lo)
                if trips > limit:
                    raise UnrollError(
                        f"loop bound {trips} exceeds the unroll limit {limit}")
                for j in range(trips):
                    out.append(SAssign(s.var, IntConst(s.lo + j)))
                    out.extend(expand(clone(s.body)))
                out.append(SAssign(s.var, IntConst(s.hi)))
            elif isinstance(s, SWhile):
                if default_bound is None:
                    raise UnrollError("unbounded loop (while with no default bound)")
                if default_bound > limit:
                    raise UnrollError(
                        f"bound {default_bound} exceeds the unroll limit {limit}")
                tail: List = [SAssume(Not(clone([SAssume(s.cond)])[0].cond))]
                for _ in range(default_bound):
                    copy = clone([s])[0]
                    tail = [SIf(copy.cond, expand(copy.body) + tail, [])]
                out.extend(tail)
            else:
                out.extend(clone([s]))
        return out

    body = expand(p.source.body)
    lo = _Lowerer(p.name, allow_loops=False)
    try:
        program = lo.lower(body)
    except UnsupportedConstructError as e:
        raise UnrollError(str(e)) from None
    program.source = SourceProgram(p.name, body)
    costs = CostModel({e.id: 0 for e in program.edges}, lo.block_costs)
    return program, costs
