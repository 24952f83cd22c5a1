"""CFG interchange format: load and save analyzer inputs produced elsewhere.

One JSON object per file:

    {
      "name":   "rate_limiter_step",
      "entry":  "entry",
      "exit":   "if.end6",
      "havocs": [{"name": "call", "lo": -10000, "hi": 10000}, ...],
      "blocks": [
        {"id": "entry",
         "assigns": [["add", "(+ call 10)"]],
         "phis":    [],
         "term":    {"type": "branch", "cond": "(> call1 add)",
                     "then": "if.then", "else": "if.end"}},
        ...
        {"id": "if.end6",
         "phis": [{"target": "x.1",
                   "sources": {"if.then4": "sub5", "if.end": "x.0"}}],
         "term": {"type": "return"}}
      ],
      "edges": [
        {"from": "entry", "to": "if.then", "cost": 15},
        ...
      ],
      "block_costs": {"if.end6": 4}
    }

Expressions use prefix notation (``(+ call 10)``).  Edge guards follow from
the source block's terminator; an edge may also carry an explicit "guard"
string, which must then agree with the terminator.  The "edges" list must
enumerate every edge implied by the terminators and carries the costs.
"""

from __future__ import annotations

import json
from typing import Dict, Tuple

from .exprs import ExprError, IntConst, Not, Var, parse_sexpr, to_sexpr
from .ir import (Block, Branch, CostModel, Edge, Goto, HavocVar, Phi, Program,
                 ProgramError, Return, validate)


class CfgFileError(Exception):
    """Schema violation or inconsistent document."""


def _need(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise CfgFileError(f"{where}: missing field '{key}'")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise CfgFileError(f"{where}: field '{key}' has the wrong type")
    return v


def _expr(text, where: str):
    if not isinstance(text, str):
        raise CfgFileError(f"{where}: expected an expression string")
    try:
        return parse_sexpr(text)
    except ExprError as e:
        raise CfgFileError(f"{where}: {e}") from None


def parse_cfg_file(text: str) -> Tuple[Program, CostModel]:
    """Parse an interchange document; returns the validated Program and costs."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CfgFileError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise CfgFileError("document root must be one object")

    name = _need(doc, "name", str, "document")
    entry = _need(doc, "entry", str, "document")
    exit_id = _need(doc, "exit", str, "document")
    raw_blocks = _need(doc, "blocks", list, "document")
    raw_edges = _need(doc, "edges", list, "document")
    if not raw_blocks:
        raise CfgFileError("document: empty block list")

    havocs = []
    for h in doc.get("havocs", []):
        hname = _need(h, "name", str, "havocs")
        lo, hi = h.get("lo"), h.get("hi")
        for bound in (lo, hi):
            if bound is not None and not isinstance(bound, int):
                raise CfgFileError(f"havoc '{hname}': bounds must be integers")
        havocs.append(HavocVar(hname, lo, hi))

    ids = []
    for rb in raw_blocks:
        ids.append(_need(rb, "id", str, "blocks"))
    known = set(ids)
    if len(known) != len(ids):
        raise CfgFileError("duplicate block id")

    def ref(bid: str, where: str) -> str:
        if bid not in known:
            raise CfgFileError(f"{where}: dangling block reference '{bid}'")
        return bid

    blocks = []
    for rb in raw_blocks:
        bid = rb["id"]
        where = f"block '{bid}'"
        assigns = []
        for pair in rb.get("assigns", []):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                raise CfgFileError(f"{where}: each assign must be [var, expr]")
            assigns.append((pair[0], _expr(pair[1], where)))
        phis = []
        for rp in rb.get("phis", []):
            target = _need(rp, "target", str, where)
            sources = _need(rp, "sources", dict, where)
            items = []
            for src, val in sources.items():
                ref(src, f"{where} phi '{target}'")
                if isinstance(val, int):
                    items.append((src, IntConst(val)))
                elif isinstance(val, str):
                    items.append((src, _expr(val, where) if val.startswith("(") else Var(val)))
                else:
                    raise CfgFileError(f"{where}: phi source must be a var or int")
            # deterministic order: by declaration order of the source blocks
            items.sort(key=lambda it: ids.index(it[0]))
            phis.append(Phi(target, tuple(items)))
        assumes = [_expr(a, where) for a in rb.get("assumes", [])]
        term = _parse_term(rb.get("term"), where, ref)
        blocks.append(Block(bid, phis=phis, assigns=assigns, assumes=assumes, term=term))

    try:
        program = Program(name, blocks, ref(entry, "entry"), ref(exit_id, "exit"), havocs)
    except ProgramError as e:
        raise CfgFileError(str(e)) from None

    derived: Dict[Tuple[str, str], Edge] = {e.id: e for e in program.edges}
    edge_costs: Dict[Tuple[str, str], int] = {}
    for re_ in raw_edges:
        src = ref(_need(re_, "from", str, "edges"), "edges")
        dst = ref(_need(re_, "to", str, "edges"), "edges")
        where = f"edge {src} -> {dst}"
        if (src, dst) not in derived:
            raise CfgFileError(f"{where}: not implied by any block terminator")
        if (src, dst) in edge_costs:
            raise CfgFileError(f"{where}: listed twice")
        cost = re_.get("cost", 0)
        if not isinstance(cost, int):
            raise CfgFileError(f"{where}: cost must be an integer")
        if cost < 0:
            raise CfgFileError(f"{where}: negative cost")
        if "guard" in re_ and re_["guard"] is not None:
            stated = _expr(re_["guard"], where)
            if stated != derived[(src, dst)].guard:
                raise CfgFileError(f"{where}: guard conflicts with the terminator")
        edge_costs[(src, dst)] = cost
    missing = set(derived) - set(edge_costs)
    if missing:
        a, b = sorted(missing)[0]
        raise CfgFileError(f"edge {a} -> {b} missing from the edges list")

    block_costs = {}
    for bid, c in (doc.get("block_costs") or {}).items():
        ref(bid, "block_costs")
        if not isinstance(c, int) or c < 0:
            raise CfgFileError(f"block_costs['{bid}']: must be a nonnegative integer")
        block_costs[bid] = c

    try:
        validate(program)
    except ProgramError as e:
        raise CfgFileError(str(e)) from None
    return program, CostModel(edge_costs, block_costs)


def _parse_term(raw, where: str, ref):
    if raw is None:
        raise CfgFileError(f"{where}: missing terminator")
    kind = _need(raw, "type", str, where)
    if kind == "branch":
        cond = _expr(_need(raw, "cond", str, where), where)
        return Branch(cond, ref(_need(raw, "then", str, where), where),
                      ref(_need(raw, "else", str, where), where))
    if kind == "goto":
        return Goto(ref(_need(raw, "target", str, where), where))
    if kind == "return":
        return Return()
    raise CfgFileError(f"{where}: unknown terminator type '{kind}'")


def emit_cfg_file(p: Program, costs: CostModel) -> str:
    """Serialize a Program and costs; parse_cfg_file(emit_cfg_file(p, c))
    reproduces an isomorphic pair."""
    doc = {
        "name": p.name,
        "entry": p.entry,
        "exit": p.exit,
        "havocs": [{"name": h.name, "lo": h.lo, "hi": h.hi} for h in p.inputs],
        "blocks": [],
        "edges": [],
    }
    for b in p.blocks.values():
        rb = {"id": b.id}
        if b.assigns:
            rb["assigns"] = [[v, to_sexpr(e)] for v, e in b.assigns]
        if b.phis:
            rb["phis"] = [{"target": phi.target,
                           "sources": {src: (val.name if isinstance(val, Var)
                                             else val.value)
                                       for src, val in phi.sources}}
                          for phi in b.phis]
        if b.assumes:
            rb["assumes"] = [to_sexpr(a) for a in b.assumes]
        t = b.term
        if isinstance(t, Branch):
            rb["term"] = {"type": "branch", "cond": to_sexpr(t.cond),
                          "then": t.then_id, "else": t.else_id}
        elif isinstance(t, Goto):
            rb["term"] = {"type": "goto", "target": t.target}
        else:
            rb["term"] = {"type": "return"}
        doc["blocks"].append(rb)
    for e in p.edges:
        doc["edges"].append({"from": e.src, "to": e.dst,
                             "cost": costs.edge(e.id)})
    if costs.block_costs:
        doc["block_costs"] = dict(sorted(costs.block_costs.items()))
    return json.dumps(doc, indent=2) + "\n"
