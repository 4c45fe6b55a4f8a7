"""Structural analysis of a thread: so-tree paths, constraint coverage,

lo/bo/uo parallelism and knot-derived preconditions.

Loops are unrolled to a configurable depth (default one extra unrolling) and
conditionals expanded, giving a finite set of instance paths.  Constraint
edges resolve to the nearest preceding instance of their source on each
path; parallelism facts are deduplicated back to program level, so reported
pairs are independent of which path exhibited them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import Formula, Not, Sat, conj, disj
from .program import (
    Assign,
    Command,
    DoUntil,
    If,
    Knot,
    ORD_RANK,
    Stitch,
    Thread,
    While,
    iter_components,
)

INIT = "__init__"
POST = "__post__"


class StructureError(Exception):
    pass


@dataclass
class Item:
    """One component instance on one so-tree path."""

    label: str
    comp: object  # Command/If/While/DoUntil, None for INIT/POST
    occ: int  # occurrence number of this label along the path
    arm: str | None = None  # control expressions: arm taken on this path
    pos: int = 0


@dataclass
class SoPath:
    items: list

    def render(self) -> str:
        bits = []
        for it in self.items:
            if it.label == INIT:
                bits.append("init")
            elif it.label == POST:
                bits.append("post")
            elif it.arm:
                bits.append(f"{it.label}_{it.arm}")
            else:
                bits.append(it.label)
        return " -> ".join(bits)


def _paths_of_seq(body, unroll: int):
    out = [[]]

    def extend(paths, suffixes):
        return [p + s for p in paths for s in suffixes]

    for c in body:
        if isinstance(c, Command):
            out = extend(out, [[(c.label, c, None)]])
        elif isinstance(c, If):
            t_paths = _paths_of_seq(c.then, unroll)
            f_paths = _paths_of_seq(c.els, unroll)
            alts = [[(c.label, c, "t")] + tp for tp in t_paths]
            alts += [[(c.label, c, "f")] + fp for fp in f_paths]
            out = extend(out, alts)
        elif isinstance(c, While):
            body_paths = _paths_of_seq(c.body, unroll)
            alts = [[(c.label, c, "f")]]
            prev = [[(c.label, c, "t")] + bp for bp in body_paths]
            for _ in range(unroll):
                alts += [p + [(c.label, c, "f")] for p in prev]
                prev = [
                    p + [(c.label, c, "t")] + bp for p in prev for bp in body_paths
                ]
            out = extend(out, alts)
        elif isinstance(c, DoUntil):
            body_paths = _paths_of_seq(c.body, unroll)
            once = [bp + [(c.label, c, "t")] for bp in body_paths]
            again = [bp + [(c.label, c, "f")] for bp in body_paths]
            alts = list(once)
            prev = again
            for _ in range(unroll - 1):
                alts += [p + q for p in prev for q in once]
                prev = [p + q for p in prev for q in again]
            out = extend(out, alts)
        else:
            raise StructureError(f"unexpected component {c!r}")
    return out


def build_so_paths(t: Thread, unroll: int = 2, cap: int = 5000) -> list:
    """Finite quotient of the so tree: one SoPath per unrolled branch,

    with the initial assertion first and the thread-post node appended."""
    raw = _paths_of_seq(list(t.body), unroll)
    if len(raw) > cap:
        raise StructureError(
            f"thread {t.index}: so-tree quotient too large ({len(raw)} paths);"
            " reduce --loop-unroll"
        )
    paths = []
    for rp in raw:
        items = [Item(INIT, None, 0, None, 0)]
        seen: dict = {}
        for (label, comp, arm) in rp:
            occ = seen.get(label, 0)
            seen[label] = occ + 1
            items.append(Item(label, comp, occ, arm, len(items)))
        if t.threadpost is not None:
            items.append(Item(POST, None, 0, None, len(items)))
        paths.append(SoPath(items))
    return paths


def loop_labels(t: Thread) -> set:
    """Labels that can repeat along an so-tree path."""
    out: set = set()

    def go(body, in_loop: bool):
        for c in body:
            if in_loop:
                out.add(c.label)
            if isinstance(c, If):
                go(c.then, in_loop)
                go(c.els, in_loop)
            elif isinstance(c, (While, DoUntil)):
                out.add(c.label)
                go(c.body, True)

    go(t.body, False)
    return out


# -------------------------------------------------------------- resolution


def resolve_stitch(path: SoPath, at: int, s: Stitch, init_label: str) -> int | None:
    """Index of the nearest preceding instance matching the stitch source."""
    for k in range(at - 1, -1, -1):
        it = path.items[k]
        if s.source == init_label:
            if it.label == INIT:
                return k
            continue
        if it.label != s.source:
            continue
        if s.arm is not None and it.arm != s.arm:
            continue
        if s.arm is None and it.arm is not None:
            continue
        return k
    return None


def knot_of(item: Item, t: Thread) -> Knot | None:
    if item.label == POST:
        return t.threadpost
    if item.label == INIT:
        return None
    return item.comp.knot


@dataclass
class PathFacts:
    path: SoPath
    edges: list  # (src_idx, dst_idx, ordering)
    lo_reach: list  # lo_reach[i]: set of j reachable from i over any edges
    bo_reach: list  # reachable with an edge >= bo on the way
    uo_reach: list  # reachable with a uo edge on the way
    covered: dict  # idx -> list of fully-resolved disjunct indices


def analyse_path(path: SoPath, t: Thread, init_label: str) -> PathFacts:
    n = len(path.items)
    edges = []
    covered: dict = {}
    # a component elaborates before its own next elaboration
    last_seen: dict = {}
    for i, it in enumerate(path.items):
        if it.label in last_seen:
            edges.append((last_seen[it.label], i, "lo"))
        last_seen[it.label] = i
    for i, it in enumerate(path.items):
        k = knot_of(it, t)
        if k is None:
            continue
        full = []
        for di, d in enumerate(k.disjuncts):
            srcs = [resolve_stitch(path, i, s, init_label) for s in d.stitches]
            if all(x is not None for x in srcs):
                full.append(di)
            for s, si in zip(d.stitches, srcs):
                if si is not None and s.ordering != "go":
                    edges.append((si, i, s.ordering))
        covered[i] = full
    lo = [set() for _ in range(n)]
    bo = [set() for _ in range(n)]
    uo = [set() for _ in range(n)]
    adj: list = [[] for _ in range(n)]
    for (a, b, o) in edges:
        adj[a].append((b, o))
    for i in range(n - 1, -1, -1):
        for (j, o) in adj[i]:
            lo[i].add(j)
            lo[i] |= lo[j]
            if ORD_RANK[o] >= ORD_RANK["bo"]:
                bo[i].add(j)
                bo[i] |= lo[j]
            bo[i] |= bo[j]
            if o == "uo":
                uo[i].add(j)
                uo[i] |= lo[j]
            uo[i] |= uo[j]
    return PathFacts(path, edges, lo, bo, uo, covered)


# ----------------------------------------------------------------- coverage


def check_constraint_coverage(t: Thread, init_label: str, unroll: int = 2):
    """Uncovered (component, path) witnesses; empty means ok."""
    seen = set()
    out = []
    for path in build_so_paths(t, unroll):
        facts = analyse_path(path, t, init_label)
        for i, it in enumerate(path.items):
            k = knot_of(it, t)
            if k is None or k.is_empty:
                continue
            if not facts.covered.get(i):
                name = "threadpost" if it.label == POST else it.label
                w = (name, path.render())
                if w not in seen:
                    seen.add(w)
                    out.append(w)
    return out


# ------------------------------------------------------------- parallelism


def _is_assignment(item: Item) -> bool:
    return isinstance(item.comp, Command) and isinstance(item.comp.payload, Assign)


def _is_var_write(item: Item) -> bool:
    return _is_assignment(item) and item.comp.payload.kind == "write"


@dataclass
class Parallelism:
    lo_parallel: list  # (interferer Command, target label, Stitch)
    bo_parallel: list  # (earlier Command, later Command): later overtakes
    uo_parallel: list  # (earlier Command, later Command); includes self pairs


def compute_parallelism(
    t: Thread, init_label: str, unroll: int = 2, screg: bool = False
) -> Parallelism:
    lo_pairs: dict = {}
    bo_pairs: dict = {}
    uo_pairs: dict = {}
    for c in iter_components(t.body):
        if isinstance(c, Command) and isinstance(c.payload, Assign):
            if c.payload.kind == "write":
                uo_pairs[(c.label, c.label)] = (c, c)  # uo self-parallelism
    for path in build_so_paths(t, unroll):
        facts = analyse_path(path, t, init_label)
        items = path.items
        for i, it in enumerate(items):
            k = knot_of(it, t)
            if k is None:
                continue
            for di, d in enumerate(k.disjuncts):
                for sj, s in enumerate(d.stitches):
                    if s.ordering == "go":
                        continue
                    si = resolve_stitch(path, i, s, init_label)
                    if si is None:
                        continue
                    for a, ai in enumerate(items):
                        if not _is_assignment(ai) or a == si or a == i:
                            continue
                        if screg and ai.comp.payload.kind in ("read", "calc"):
                            if not (si < a < i):
                                continue
                        if si in facts.lo_reach[a]:
                            continue  # elaborated before the source
                        if a in facts.lo_reach[i]:
                            continue  # elaborated after the target
                        tgt = "threadpost" if it.label == POST else it.label
                        key = (ai.comp.label, tgt, di, sj)
                        lo_pairs.setdefault(key, (ai.comp, tgt, s))
        writes = [i for i, x in enumerate(items) if _is_var_write(x)]
        for ax in range(len(writes)):
            for bx in range(ax + 1, len(writes)):
                a, b = writes[ax], writes[bx]
                ai, bi = items[a], items[b]
                va = set(ai.comp.payload.lhs)
                vb = set(bi.comp.payload.lhs)
                if not (va & vb) and b not in facts.bo_reach[a]:
                    bo_pairs.setdefault(
                        (ai.comp.label, bi.comp.label), (ai.comp, bi.comp)
                    )
                if b not in facts.uo_reach[a]:
                    uo_pairs.setdefault(
                        (ai.comp.label, bi.comp.label), (ai.comp, bi.comp)
                    )
    return Parallelism(
        sorted(lo_pairs.values(), key=lambda v: (v[0].label, v[1], str(v[2]))),
        sorted(bo_pairs.values(), key=lambda v: (v[0].label, v[1].label)),
        sorted(uo_pairs.values(), key=lambda v: (v[0].label, v[1].label)),
    )


# ------------------------------------------------------------ preconditions


@dataclass
class Preconditions:
    elaboration: Formula
    interference: Formula


def precondition_from_knot(knot: Knot, intfpre: Formula | None) -> Preconditions:
    """Per simple knot the overall precondition conjoins the embroideries.

    A go stitch constrains propagation, not elaboration: its embroidery
    reaches the interference precondition, while the elaboration
    precondition keeps only the non-go embroidery plus the satisfiability
    of the overall one.  Disjunctive knots disjoin per-knot results."""
    elabs = []
    overalls = []
    for d in knot.disjuncts:
        overall = conj([s.assertion for s in d.stitches])
        overalls.append(overall)
        gos = [s for s in d.stitches if s.ordering == "go"]
        if gos:
            non_go = conj([s.assertion for s in d.stitches if s.ordering != "go"])
            elabs.append(conj([non_go, Sat(overall)]))
        else:
            elabs.append(overall)
    elaboration = disj(elabs)
    return Preconditions(
        elaboration, intfpre if intfpre is not None else disj(overalls)
    )


def control_posts(cond: Formula, elab: Formula) -> dict:
    """Postconditions of the two arms of a control expression."""
    return {"t": conj([elab, cond]), "f": conj([elab, Not(cond)])}


# --------------------------------------------------------------- debug dump


def dump_structure(
    t: Thread, init_label: str, unroll: int = 2, screg: bool = False
) -> str:
    lines = [f"thread {t.index}"]
    paths = build_so_paths(t, unroll)
    lines.append(f"  so paths ({len(paths)}, unroll {unroll}):")
    for p in paths:
        lines.append(f"    {p.render()}")
    loops = loop_labels(t)
    if loops:
        lines.append(f"  looping components: {', '.join(sorted(loops))}")
    par = compute_parallelism(t, init_label, unroll, screg)
    lines.append("  lo-parallel:")
    for (cmd, tgt, s) in par.lo_parallel:
        lines.append(f"    {cmd.label} ~ {tgt}[{s.source_ref} {s.ordering}]")
    lines.append("  bo-parallel:")
    for (a, b) in par.bo_parallel:
        lines.append(f"    {b.label} overtakes {a.label}")
    lines.append("  uo-parallel:")
    for (a, b) in par.uo_parallel:
        lines.append(f"    {b.label} overtakes {a.label}")
    unc = check_constraint_coverage(t, init_label, unroll)
    lines.append("  coverage: " + ("ok" if not unc else f"{len(unc)} uncovered"))
    for (lbl, pr) in unc:
        lines.append(f"    {lbl} uncovered on {pr}")
    return "\n".join(lines)
