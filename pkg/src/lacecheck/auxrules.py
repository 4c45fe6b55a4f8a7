"""The five soundness conditions on auxiliary variables and registers.

Violations are data, not errors: deleting all auxiliary assignments from a
program must leave regular values, lacing and propagation unchanged, and
each condition polices one way that could fail.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import names
from .formulas import Reg, Var, free_vars, walk
from .program import (
    Assign,
    Command,
    DoUntil,
    If,
    LacedProgram,
    Thread,
    While,
    compose_orderings,
    iter_components,
)


@dataclass(frozen=True)
class AuxViolation:
    condition: int
    thread: int
    label: str
    message: str


def _is_aux_assignment(c) -> bool:
    return (
        isinstance(c, Command)
        and isinstance(c.payload, Assign)
        and c.payload.is_aux_only
    )


def validate_aux_discipline(prog: LacedProgram) -> list:
    out: list = []
    for t in prog.threads:
        out.extend(_check_thread(prog, t))
    return out


def _check_thread(prog: LacedProgram, t: Thread) -> list:
    out = []
    comps = {c.label: c for c in iter_components(t.body)}
    for c in iter_components(t.body):
        if isinstance(c, (If, While, DoUntil)):
            for n in walk(c.cond):
                if isinstance(n, Reg) and names.is_auxreg_name(n.name):
                    out.append(AuxViolation(
                        3, t.index, c.label,
                        f"condition 3: control expression {c.label} mentions"
                        f" auxiliary register {n.name}",
                    ))
            continue
        if not isinstance(c.payload, Assign):
            continue
        a = c.payload
        if a.kind == "read":
            src = a.rhs[0].name
            if names.is_auxvar_name(src):
                for r in a.lhs:
                    if r != "_" and not names.is_auxreg_name(r):
                        out.append(AuxViolation(
                            2, t.index, c.label,
                            f"condition 2: auxiliary variable {src} read into"
                            f" regular register {r}",
                        ))
        if a.kind in ("write", "calc"):
            regular_targets = [
                (i, n) for i, n in enumerate(a.lhs)
                if not names.is_aux_name(n) and n != "_"
            ]
            for (i, n) in regular_targets:
                if i < len(a.rhs):
                    for node in walk(a.rhs[i]):
                        if isinstance(node, Reg) and names.is_auxreg_name(node.name):
                            out.append(AuxViolation(
                                1, t.index, c.label,
                                f"condition 1: expression assigned to regular"
                                f" {n} mentions auxiliary register {node.name}",
                            ))
                        if isinstance(node, Var) and names.is_auxvar_name(node.name):
                            out.append(AuxViolation(
                                1, t.index, c.label,
                                f"condition 1: expression assigned to regular"
                                f" {n} mentions auxiliary variable {node.name}",
                            ))
    out.extend(_check_aux_constraints(prog, t, comps))
    return out


def _check_aux_constraints(prog: LacedProgram, t: Thread, comps: dict) -> list:
    """Conditions 4 and 5, on constraints whose source is an auxiliary

    assignment and whose target is regular: every (regular predecessor,
    target) pair must also be connected by a regular constraint path of at
    least the strength of the auxiliary one, and the embroidery may not
    mention regular variables."""
    out = []

    def knots(label):
        if label == "threadpost":
            return t.threadpost
        return comps[label].knot

    targets = []
    for c in iter_components(t.body):
        targets.append((c.label, c.knot, _is_aux_assignment(c)))
    if t.threadpost is not None:
        targets.append(("threadpost", t.threadpost, False))

    # regular edges: label -> list of (source label, ordering)
    reg_edges: dict = {}
    for (label, knot, is_aux) in targets:
        if is_aux:
            continue
        for s in knot.stitches():
            src = comps.get(s.source)
            if src is not None and _is_aux_assignment(src):
                continue
            reg_edges.setdefault(label, []).append((s.source, s.ordering))

    def regular_path_strength(frm: str, to: str, seen=None):
        """Strongest ordering achievable from frm to to over regular edges."""
        if seen is None:
            seen = set()
        best = None
        for (src, o) in reg_edges.get(to, []):
            if o == "go":
                continue
            if src == frm:
                cand = o
            elif src in seen:
                continue
            else:
                sub = regular_path_strength(frm, src, seen | {to})
                cand = compose_orderings(sub, o) if sub else None
            if cand and (best is None or
                         _rank(cand) > _rank(best)):
                best = cand
        return best

    for (label, knot, _) in targets:
        for s in knot.stitches():
            src = comps.get(s.source)
            if src is None or not _is_aux_assignment(src):
                continue
            tgt_comp = comps.get(label)
            tgt_is_aux = tgt_comp is not None and _is_aux_assignment(tgt_comp)
            if tgt_is_aux:
                continue
            # condition 5: embroidery of an aux-to-regular constraint
            regs = {
                n.name for n in walk(s.assertion)
                if isinstance(n, Var) and not names.is_auxvar_name(n.name)
            }
            if regs:
                out.append(AuxViolation(
                    5, t.index, label,
                    f"condition 5: embroidery on {s.source}->{label} mentions"
                    f" regular variables {', '.join(sorted(regs))}",
                ))
            # condition 4: regular predecessors of the aux command must
            # reach the target through regular constraints of matching strength
            for ps in src.knot.stitches():
                psrc = comps.get(ps.source)
                if psrc is not None and _is_aux_assignment(psrc):
                    continue
                need = s.ordering if s.ordering != "go" else "lo"
                if ps.ordering != "go":
                    need = compose_orderings(ps.ordering, need)
                got = regular_path_strength(ps.source, label)
                if got is None or _rank(got) < _rank(need):
                    out.append(AuxViolation(
                        4, t.index, label,
                        f"condition 4: auxiliary path {ps.source}->{s.source}"
                        f"->{label} ({need}) has no matching regular"
                        f" constraint path",
                    ))
    return out


def _rank(o: str) -> int:
    from .program import ORD_RANK

    return ORD_RANK[o]
