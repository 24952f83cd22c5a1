"""Control-flow program representation.

A Program is an ordered collection of basic blocks with SSA-style integer
assignments, guarded edges derived from block terminators, phi joins at
merge blocks, and nondeterministic (havoc) inputs with optional ranges.
A CostModel attaches a nonnegative cycle cost to every edge and,
optionally, to blocks.

Programs may contain loops right after parsing; `check_loop_free` and
`validate` gate everything downstream, which assumes an acyclic graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .exprs import Expr, IntConst, Not, Var, free_vars, infer_type

EdgeId = Tuple[str, str]


class ProgramError(Exception):
    """Structural or SSA violation in a Program."""


@dataclass(frozen=True)
class HavocVar:
    """Nondeterministic input, optionally range-constrained (lo <= v <= hi)."""

    name: str
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ProgramError(f"havoc {self.name}: empty range [{self.lo},{self.hi}]")


@dataclass(frozen=True)
class Phi:
    """SSA join: target takes the value arriving over the taken incoming edge.

    sources maps predecessor block id -> Var or IntConst.
    """

    target: str
    sources: Tuple[Tuple[str, Expr], ...]


@dataclass(frozen=True)
class Branch:
    cond: Expr
    then_id: str
    else_id: str


@dataclass(frozen=True)
class Goto:
    target: str


@dataclass(frozen=True)
class Return:
    pass


Terminator = object  # Branch | Goto | Return


@dataclass
class Block:
    id: str
    phis: List[Phi] = field(default_factory=list)
    assigns: List[Tuple[str, Expr]] = field(default_factory=list)
    assumes: List[Expr] = field(default_factory=list)
    term: Terminator = field(default_factory=Return)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    guard: Optional[Expr]  # None on unconditional edges

    @property
    def id(self) -> EdgeId:
        return (self.src, self.dst)


@dataclass(frozen=True)
class LoopInfo:
    """A natural loop created by the mini-language front end."""

    header: str
    latch: str
    blocks: Tuple[str, ...]
    static_bound: Optional[int]  # trip count when syntactically constant


class Program:
    def __init__(self, name: str, blocks: List[Block], entry: str, exit: str,
                 inputs: List[HavocVar], loops: Optional[List[LoopInfo]] = None,
                 source=None):
        self.name = name
        self.blocks: Dict[str, Block] = {}
        for b in blocks:
            if b.id in self.blocks:
                raise ProgramError(f"duplicate block id '{b.id}'")
            self.blocks[b.id] = b
        self.entry = entry
        self.exit = exit
        self.inputs = list(inputs)
        self.loops = list(loops or [])
        self.source = source  # structured source, kept for unrolling
        if entry not in self.blocks:
            raise ProgramError(f"entry block '{entry}' not defined")
        if exit not in self.blocks:
            raise ProgramError(f"exit block '{exit}' not defined")
        self._edges: Optional[List[Edge]] = None

    # --- structure -------------------------------------------------------

    def block_ids(self) -> List[str]:
        return list(self.blocks.keys())

    def index_of(self, block_id: str) -> int:
        for i, b in enumerate(self.blocks):
            if b == block_id:
                return i
        raise ProgramError(f"unknown block '{block_id}'")

    @property
    def edges(self) -> List[Edge]:
        if self._edges is None:
            out = []
            for b in self.blocks.values():
                t = b.term
                if isinstance(t, Branch):
                    out.append(Edge(b.id, t.then_id, t.cond))
                    out.append(Edge(b.id, t.else_id, Not(t.cond)))
                elif isinstance(t, Goto):
                    out.append(Edge(b.id, t.target, None))
                elif isinstance(t, Return):
                    pass
                else:
                    raise ProgramError(f"block '{b.id}': unknown terminator {t!r}")
            self._edges = out
        return self._edges

    def edge(self, eid: EdgeId) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise ProgramError(f"no edge {eid[0]} -> {eid[1]}")

    def successors(self, block_id: str) -> List[str]:
        return [e.dst for e in self.edges if e.src == block_id]

    def predecessors(self, block_id: str) -> List[str]:
        return [e.src for e in self.edges if e.dst == block_id]

    def preds_map(self) -> Dict[str, List[str]]:
        m: Dict[str, List[str]] = {b: [] for b in self.blocks}
        for e in self.edges:
            m[e.dst].append(e.src)
        return m

    def succs_map(self) -> Dict[str, List[str]]:
        m: Dict[str, List[str]] = {b: [] for b in self.blocks}
        for e in self.edges:
            m[e.src].append(e.dst)
        return m

    # --- SSA definition table --------------------------------------------

    def definitions(self) -> Dict[str, str]:
        """Map each SSA variable to the block defining it ('' for inputs)."""
        defs: Dict[str, str] = {}

        def record(name, where):
            if name in defs:
                raise ProgramError(
                    f"duplicate SSA definition of '{name}' "
                    f"(in '{defs[name] or '<input>'}' and '{where or '<input>'}')")
            defs[name] = where

        for hv in self.inputs:
            record(hv.name, "")
        for b in self.blocks.values():
            for phi in b.phis:
                record(phi.target, b.id)
            for var, _ in b.assigns:
                record(var, b.id)
        return defs

    def var_sorts(self) -> Dict[str, str]:
        """All program variables are integers."""
        return {name: "Int" for name in self.definitions()}


@dataclass(frozen=True)
class CycleReport:
    """One cycle found in the edge relation, as an ordered block list."""

    blocks: Tuple[str, ...]


def check_loop_free(p: Program) -> Optional[CycleReport]:
    """Return None when the edge relation is acyclic, else one cycle.

    Iterative DFS with the usual white/grey/black coloring; the reported
    cycle is the grey segment of the stack when a back edge is found.
    """
    succs = p.succs_map()
    color = {b: 0 for b in p.blocks}  # 0 white, 1 grey, 2 black
    for root in p.blocks:
        if color[root] != 0:
            continue
        stack = [(root, iter(succs[root]))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            if color[nxt] == 1:
                cut = path.index(nxt)
                return CycleReport(tuple(path[cut:]))
            if color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succs[nxt])))
                path.append(nxt)
    return None


def validate(p: Program) -> None:
    """Check the Program invariants; raise ProgramError on violation.

    Requires a loop-free program (run check_loop_free first).  Verifies:
    exactly one entry/exit with the right degrees, reachability in both
    directions, phi sources covering exactly the incoming edges, single
    SSA assignment, and defs dominating uses (phi sources excepted).
    """
    if check_loop_free(p) is not None:
        raise ProgramError("program contains a cycle; unroll before validating")

    preds, succs = p.preds_map(), p.succs_map()
    if preds[p.entry]:
        raise ProgramError(f"entry '{p.entry}' has incoming edges")
    if succs[p.exit]:
        raise ProgramError(f"exit '{p.exit}' has outgoing edges")
    if not isinstance(p.blocks[p.exit].term, Return):
        raise ProgramError(f"exit '{p.exit}' does not end in a return")
    for b in p.blocks.values():
        if b.id != p.entry and not preds[b.id]:
            raise ProgramError(f"block '{b.id}' is unreachable from entry")
        if b.id != p.exit and not succs[b.id]:
            raise ProgramError(f"block '{b.id}' does not reach exit")
        if isinstance(b.term, Return) and b.id != p.exit:
            raise ProgramError(f"return outside the exit block (in '{b.id}')")

    # reachability both ways
    def reach(start, nbrs):
        seen = {start}
        work = [start]
        while work:
            for n in nbrs[work.pop()]:
                if n not in seen:
                    seen.add(n)
                    work.append(n)
        return seen

    fwd = reach(p.entry, succs)
    bwd = reach(p.exit, preds)
    for b in p.blocks:
        if b not in fwd:
            raise ProgramError(f"block '{b}' is unreachable from entry")
        if b not in bwd:
            raise ProgramError(f"block '{b}' does not reach exit")

    # phi sources biject with incoming edges
    for b in p.blocks.values():
        inc = set(preds[b.id])
        for phi in b.phis:
            srcs = [s for s, _ in phi.sources]
            if len(set(srcs)) != len(srcs):
                raise ProgramError(f"phi '{phi.target}': repeated source block")
            if set(srcs) != inc:
                raise ProgramError(
                    f"phi '{phi.target}' in '{b.id}': sources {sorted(srcs)} "
                    f"do not match incoming edges {sorted(inc)}")

    defs = p.definitions()  # raises on duplicate definition
    sorts = p.var_sorts()

    # type-check every expression in context
    for b in p.blocks.values():
        for _, e in b.assigns:
            if infer_type(e, sorts) != "Int":
                raise ProgramError(f"assignment in '{b.id}' is not integer-typed")
        for e in b.assumes:
            if infer_type(e, sorts) != "Bool":
                raise ProgramError(f"assume in '{b.id}' is not Boolean")
        if isinstance(b.term, Branch):
            if infer_type(b.term.cond, sorts) != "Bool":
                raise ProgramError(f"branch condition in '{b.id}' is not Boolean")

    # defs dominate uses (phi sources excepted)
    from .cfgkit import immediate_dominators  # deferred: cfgkit imports ir

    idom = immediate_dominators(p).idom

    def dominates(a: str, b: str) -> bool:
        while True:
            if a == b:
                return True
            if b == p.entry:
                return False
            b = idom[b]

    def check_use(name: str, where: str, what: str):
        db = defs.get(name)
        if db is None:
            raise ProgramError(f"use of undefined variable '{name}' in '{where}'")
        if db == "":
            return  # inputs dominate everything
        if db == where:
            return  # defined earlier in the same block (list order checked below)
        if not dominates(db, where):
            raise ProgramError(
                f"{what} in '{where}' reads '{name}' whose definition "
                f"in '{db}' does not dominate it")

    for b in p.blocks.values():
        local_defined = {phi.target for phi in b.phis}
        for var, e in b.assigns:
            for name in sorted(free_vars(e)):
                if defs.get(name) == b.id and name not in local_defined:
                    raise ProgramError(
                        f"'{var}' in '{b.id}' reads '{name}' before its definition")
                check_use(name, b.id, f"assignment to '{var}'")
            local_defined.add(var)
        for e in b.assumes:
            for name in sorted(free_vars(e)):
                check_use(name, b.id, "assume")
        if isinstance(b.term, Branch):
            for name in sorted(free_vars(b.term.cond)):
                check_use(name, b.id, "branch condition")
        for phi in b.phis:
            for src_block, val in phi.sources:
                for name in sorted(free_vars(val)):
                    # a phi source must be visible at the end of its edge's source
                    check_use(name, src_block, f"phi '{phi.target}' source")


class CostError(Exception):
    """Missing or negative cost."""


class CostModel:
    """Nonnegative cycle costs on edges and, optionally, on blocks."""

    def __init__(self, edge_costs: Dict[EdgeId, int], block_costs: Optional[Dict[str, int]] = None):
        for eid, c in edge_costs.items():
            if c < 0:
                raise CostError(f"negative cost on edge {eid[0]} -> {eid[1]}")
        for bid, c in (block_costs or {}).items():
            if c < 0:
                raise CostError(f"negative cost on block '{bid}'")
        self.edge_costs = dict(edge_costs)
        self.block_costs = dict(block_costs or {})

    @classmethod
    def zero(cls, p: Program) -> "CostModel":
        return cls({e.id: 0 for e in p.edges})

    def edge(self, eid: EdgeId) -> int:
        try:
            return self.edge_costs[eid]
        except KeyError:
            raise CostError(f"missing cost for edge {eid[0]} -> {eid[1]}") from None

    def block(self, block_id: str) -> int:
        return self.block_costs.get(block_id, 0)

    def check_total_on(self, p: Program) -> None:
        for e in p.edges:
            self.edge(e.id)

    def path_cost(self, blocks: List[str]) -> int:
        """Cost of a path given as a block sequence."""
        total = sum(self.block(b) for b in blocks)
        total += sum(self.edge((a, b)) for a, b in zip(blocks, blocks[1:]))
        return total


def phi_value_of(v) -> Expr:
    """Coerce a phi source value (var name or int) to an expression."""
    if isinstance(v, str):
        return Var(v)
    if isinstance(v, int):
        return IntConst(v)
    return v
