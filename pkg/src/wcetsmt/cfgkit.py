"""Graph algorithms over loop-free control-flow graphs.

Provides the deterministic topological order, immediate dominators
(iterative data-flow over reverse post order), discovery of portions
(the subgraph between a merge block and its immediate dominator),
hierarchical pairwise grouping of portions, and the longest-syntactic-path
bound, computed in one topological pass and restrictable to a portion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Tuple

from .ir import CostModel, EdgeId, Program, ProgramError


class GraphError(Exception):
    pass


def topo_order(p: Program) -> List[str]:
    """Topological order of the blocks; ties broken by block declaration order."""
    ids = p.block_ids()
    pos = {b: i for i, b in enumerate(ids)}
    indeg = {b: 0 for b in ids}
    for e in p.edges:
        indeg[e.dst] += 1
    succs = p.succs_map()
    ready = sorted((b for b in ids if indeg[b] == 0), key=pos.get)
    out: List[str] = []
    while ready:
        b = ready.pop(0)
        out.append(b)
        changed = False
        for s in succs[b]:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
                changed = True
        if changed:
            ready.sort(key=pos.get)
    if len(out) != len(ids):
        raise GraphError("cycle detected; the graph is not loop-free")
    return out


@dataclass(frozen=True)
class DomTree:
    """idom maps every block to its immediate dominator; entry maps to itself."""

    idom: Dict[str, str]
    entry: str

    def dominates(self, a: str, b: str) -> bool:
        while True:
            if a == b:
                return True
            if b == self.entry:
                return False
            b = self.idom[b]


def immediate_dominators(p: Program) -> DomTree:
    """Iterative immediate-dominator computation over reverse post order.

    For loop-free graphs the topological order is a reverse post order, so
    a block's predecessors are always processed before the block itself.
    """
    order = topo_order(p)
    preds = p.preds_map()
    reachable = {p.entry}
    for b in order:
        if b != p.entry and any(q in reachable for q in preds[b]):
            reachable.add(b)
    for b in order:
        if b not in reachable:
            raise ProgramError(f"block '{b}' unreachable from entry")

    rpo_index = {b: i for i, b in enumerate(order)}
    idom: Dict[str, str] = {p.entry: p.entry}

    def intersect(a: str, b: str) -> str:
        while a != b:
            while rpo_index[a] > rpo_index[b]:
                a = idom[a]
            while rpo_index[b] > rpo_index[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for b in order:
            if b == p.entry:
                continue
            new = None
            for q in preds[b]:
                if q in idom:
                    new = q if new is None else intersect(q, new)
            if new is not None and idom.get(b) != new:
                idom[b] = new
                changed = True
    return DomTree(idom, p.entry)


@dataclass
class Portion:
    """The subgraph strictly between a header and a merge block.

    `edges` are exactly the edges on header-to-merge paths; `blocks` the
    inner blocks (header and merge excluded); `charged` the blocks whose
    cost is attributed to this portion (inner blocks plus the merge).
    `bound` is a proved upper bound on the portion's contribution to any
    trace, filled in by `syntactic_bound` or by semantic refinement.
    """

    header: str
    merge: str
    edges: FrozenSet[EdgeId]
    blocks: FrozenSet[str]
    charged: FrozenSet[str]
    bound: Optional[int] = None
    children: Tuple["Portion", ...] = ()
    whole_program: bool = False

    @property
    def id(self) -> str:
        if self.whole_program:
            return "whole-program"
        return f"{self.header}..{self.merge}"


def _region(p: Program, header: str, merge: str):
    """Nodes and edges lying on some header-to-merge path."""
    succs, preds = p.succs_map(), p.preds_map()
    fwd = {header}
    work = [header]
    while work:
        n = work.pop()
        if n == merge:
            continue
        for s in succs[n]:
            if s not in fwd:
                fwd.add(s)
                work.append(s)
    bwd = {merge}
    work = [merge]
    while work:
        n = work.pop()
        if n == header:
            continue
        for q in preds[n]:
            if q not in bwd:
                bwd.add(q)
                work.append(q)
    nodes = fwd & bwd
    edges = frozenset(e.id for e in p.edges
                      if e.src in nodes and e.dst in nodes
                      and e.src != merge and e.dst != header)
    return nodes, edges


def _path_count(p: Program, nodes, edges, header: str, merge: str) -> int:
    order = [b for b in topo_order(p) if b in nodes]
    ways = {b: 0 for b in nodes}
    ways[header] = 1
    for b in order:
        for e in p.edges:
            if e.id in edges and e.src == b:
                ways[e.dst] += ways[b]
    return ways[merge]


def find_portions(p: Program, dt: DomTree) -> List[Portion]:
    """One portion per merge block with nontrivial control flow back to its
    immediate dominator (at least two distinct header-to-merge paths).
    Returned in program order (topological position of the header, then of
    the merge), outermost portions first among nested ones.
    """
    preds = p.preds_map()
    pos = {b: i for i, b in enumerate(topo_order(p))}
    out = []
    for m in p.blocks:
        if len(preds[m]) < 2:
            continue
        h = dt.idom[m]
        nodes, edges = _region(p, h, m)
        if _path_count(p, nodes, edges, h, m) < 2:
            continue
        inner = frozenset(nodes - {h, m})
        out.append(Portion(h, m, edges, inner, charged=frozenset(inner | {m})))
    out.sort(key=lambda por: (pos[por.header], pos[por.merge]))
    return out


def whole_program_portion(p: Program) -> Portion:
    all_edges = frozenset(e.id for e in p.edges)
    all_blocks = frozenset(p.blocks)
    return Portion(p.entry, p.exit, all_edges,
                   frozenset(all_blocks - {p.entry, p.exit}),
                   charged=all_blocks, whole_program=True)


@dataclass
class PortionTree:
    """Pairwise grouping of the outermost portions, rooted at the whole program.

    `nodes` lists every node bottom-up (leaves first, root last); sibling
    edge sets are disjoint by construction.
    """

    root: Portion
    leaves: List[Portion] = field(default_factory=list)
    nodes: List[Portion] = field(default_factory=list)


def group_portions(portions: List[Portion], p: Program) -> PortionTree:
    """Group adjacent outermost portions by two, recursively, and cap the
    tree with a whole-program root."""
    outer = [a for a in portions
             if not any(a is not b and a.edges < b.edges for b in portions)]
    nodes: List[Portion] = list(outer)
    level = list(outer)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            left, right = level[i], level[i + 1]
            if left.edges & right.edges:
                raise GraphError(
                    f"portions {left.id} and {right.id} overlap; cannot group")
            span_nodes, span_edges = _region(p, left.header, right.merge)
            merged = Portion(left.header, right.merge,
                             span_edges | left.edges | right.edges,
                             frozenset(span_nodes - {left.header, right.merge}),
                             charged=frozenset((span_nodes | left.charged
                                                | right.charged) - {left.header}),
                             children=(left, right))
            nodes.append(merged)
            nxt.append(merged)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt

    root = whole_program_portion(p)
    if level:
        only = level[0]
        if only.header == p.entry and only.merge == p.exit and not only.children:
            # a single leaf spanning everything still gets the explicit root
            root = replace(root, children=(only,))
        elif only.header == p.entry and only.merge == p.exit:
            root = replace(root, children=only.children)
            nodes.remove(only)
        else:
            root = replace(root, children=(only,))
    nodes.append(root)
    return PortionTree(root=root, leaves=list(outer), nodes=nodes)


def syntactic_bound(p: Program, costs: CostModel,
                    scope: Optional[Portion] = None) -> int:
    """Maximum structural-path cost, restricted to a portion when given.

    One pass over the blocks in topological order: w[b] is the largest
    in-scope cost of any entry-to-b prefix, where an edge contributes when
    it belongs to the scope and a block contributes (on leaving it) when
    the scope charges it.  The whole-program scope charges everything.
    """
    order = topo_order(p)
    preds = p.preds_map()
    if scope is None:
        scope = whole_program_portion(p)
    in_edges = scope.edges
    charged = scope.charged

    w: Dict[str, int] = {order[0]: 0}
    for b in order[1:]:
        best = None
        for q in preds[b]:
            if q not in w:
                continue
            c = w[q]
            if (q, b) in in_edges:
                c += costs.edge((q, b))
            if q in charged:
                c += costs.block(q)
            if best is None or c > best:
                best = c
        w[b] = 0 if best is None else best
    total = w[p.exit]
    if p.exit in charged:
        total += costs.block(p.exit)
    return total


def longest_path_table(p: Program, costs: CostModel,
                       scope: Optional[Portion] = None) -> Dict[str, int]:
    """The w map from `syntactic_bound`, exposed for inspection and tests."""
    order = topo_order(p)
    preds = p.preds_map()
    if scope is None:
        scope = whole_program_portion(p)
    w: Dict[str, int] = {order[0]: 0}
    for b in order[1:]:
        cands = []
        for q in preds[b]:
            c = w[q]
            if (q, b) in scope.edges:
                c += costs.edge((q, b))
            if q in scope.charged:
                c += costs.block(q)
            cands.append(c)
        w[b] = max(cands) if cands else 0
    return w


def fill_bounds(portions: List[Portion], p: Program, costs: CostModel) -> None:
    for por in portions:
        por.bound = syntactic_bound(p, costs, por)


def enumerate_paths(p: Program, limit: int = 100000) -> List[List[str]]:
    """All entry-to-exit block sequences; raises GraphError over the limit."""
    succs = p.succs_map()
    out: List[List[str]] = []
    stack: List[Tuple[str, List[str]]] = [(p.entry, [p.entry])]
    while stack:
        node, path = stack.pop()
        if node == p.exit:
            out.append(path)
            if len(out) > limit:
                raise GraphError(f"more than {limit} paths")
            continue
        for s in sorted(succs[node], reverse=True):
            stack.append((s, path + [s]))
    return out


def dump_analysis(p: Program, costs: CostModel) -> str:
    """Deterministic text dump of the dominator tree and the portions."""
    dt = immediate_dominators(p)
    portions = find_portions(p, dt)
    fill_bounds(portions, p, costs)
    lines = [f"program {p.name}"]
    lines.append("topo: " + " ".join(topo_order(p)))
    for b in p.blocks:
        lines.append(f"idom {b} = {dt.idom[b]}")
    for por in portions:
        edges = " ".join(f"{a}->{b}" for a, b in sorted(por.edges))
        lines.append(f"portion {por.id} bound={por.bound} edges[{edges}]")
    whole = syntactic_bound(p, costs)
    lines.append(f"whole-program bound={whole}")
    return "\n".join(lines) + "\n"
