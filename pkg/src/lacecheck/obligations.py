"""Generation of the complete proof-obligation set for a program.

One obligation per (assertion, interference) pair, so failures localize the
way the narrative does.  Structural checks (coverage, auxiliary discipline,
B/U restriction) are obligations with a precomputed verdict; everything else
is a hypothesis/conclusion pair for the solver, with quotiented names left
free (universal quantification skolemized into the satisfiability side).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import names
from .formulas import (
    And,
    At,
    Cmp,
    Co,
    Formula,
    LogVar,
    Modal,
    Not,
    Quant,
    ReadEq,
    Reg,
    Sat,
    TRUE,
    Var,
    canon,
    children,
    coherence_vars,
    conj,
    disj,
    free_regs,
    free_vars,
    mentions_usofar,
    rebuild,
    render,
    walk,
)
from .modal import (
    double_hat,
    double_twiddle,
    down,
    hat,
    hook_all,
    restrict_BU,
    restrict_initial,
    sp,
    twiddle,
)
from .program import (
    Assign,
    AssertCmd,
    Command,
    DoUntil,
    If,
    Interference,
    LacedProgram,
    Skip,
    Thread,
    While,
    iter_components,
)
from .structure import (
    POST,
    check_constraint_coverage,
    compute_parallelism,
    control_posts,
    precondition_from_knot,
)
from .auxrules import validate_aux_discipline

STRIP_NONE = ()
STRIP_BO = ("B",)
STRIP_UO = ("B", "U")


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class Location:
    thread: int | None
    label: str | None
    detail: str = ""

    def render(self) -> str:
        parts = []
        if self.thread is None:
            parts.append("program")
        else:
            parts.append(f"t{self.thread}")
        if self.label:
            parts.append(self.label)
        s = ".".join(parts)
        if self.detail:
            s += f"[{self.detail}]"
        return s

    def __str__(self) -> str:
        return self.render()


@dataclass
class Obligation:
    kind: str
    loc: Location
    hypothesis: Formula
    conclusion: Formula
    quotient: tuple = ()
    trail: str = ""
    structural: str | None = None  # "ok" / failure text, set for data checks
    trivial: str | None = None  # "frame" when syntactically valid
    pms: bool = False

    @property
    def name(self) -> str:
        return f"{self.kind} {self.loc.render()}"


@dataclass
class Flags:
    screg: bool = False
    pms: str = "auto"  # auto | on | off
    unroll: int = 2


# ------------------------------------------------------------ sat resolution


def resolve_sats(f: Formula, resolver) -> Formula:
    """Replace sat(P) by its truth value via the solver callback."""
    if isinstance(f, Sat):
        if resolver is None:
            raise GenerationError(
                f"sat({render(f.body)}) requires a solver to resolve"
            )
        from .formulas import Const

        return Const(bool(resolver(f.body)))
    kids = tuple(resolve_sats(c, resolver) for c in children(f))
    return rebuild(f, kids)


# -------------------------------------------------------------- quotienting


class Freshener:
    """Deterministic fresh logical names for quotiented registers and for

    per-use instantiation of interference binders."""

    def __init__(self):
        self.counter = 0

    def instantiate(self, intf: Interference):
        """(pre, assign, names): binders and registers renamed apart."""
        self.counter += 1
        tag = self.counter
        mapping = {}
        for b in intf.bound:
            mapping[b] = LogVar(f"{b}_{tag}")
        qnames = [f"{b}_{tag}" for b in intf.bound]
        pre = _rename_logicals(intf.pre, mapping)
        rhs = tuple(_rename_logicals(e, mapping) for e in intf.rhs)
        pre, rhs, regnames = _quotient_regs(pre, rhs, tag)
        return pre, Assign("write", intf.lhs, rhs), tuple(qnames + regnames)

    def quotient_assignment(self, pre: Formula, a: Assign):
        """Internal interference: registers in the precondition and in the

        assigned expressions stand for unknowable physical registers."""
        self.counter += 1
        tag = self.counter
        pre2, rhs2, regnames = _quotient_regs(pre, a.rhs, tag, keep=set(a.lhs))
        return pre2, Assign(a.kind, a.lhs, rhs2), tuple(regnames)


def _rename_logicals(f: Formula, mapping: dict) -> Formula:
    if isinstance(f, LogVar) and f.name in mapping:
        return mapping[f.name]
    if isinstance(f, Quant):
        inner = {k: v for k, v in mapping.items() if k not in f.names}
        return Quant(f.kind, f.names, _rename_logicals(f.body, inner))
    kids = tuple(_rename_logicals(c, mapping) for c in children(f))
    return rebuild(f, kids)


def _quotient_regs(pre: Formula, rhs: tuple, tag: int, keep: set = frozenset()):
    regs = sorted(
        (free_regs(pre) | set().union(*[free_regs(e) for e in rhs]) if rhs
         else free_regs(pre))
        - set(keep)
    )
    mapping = {r: LogVar(f"R_{r}_{tag}") for r in regs}

    def ren(f: Formula) -> Formula:
        if isinstance(f, Reg) and f.name in mapping and f.accent is None:
            return mapping[f.name]
        kids = tuple(ren(c) for c in children(f))
        return rebuild(f, kids)

    return ren(pre), tuple(ren(e) for e in rhs), [f"R_{r}_{tag}" for r in regs]


# ------------------------------------------------------------- strip for bo/uo


def strip_wrappers(f: Formula, ops: tuple) -> Formula:
    """Remove B (and U) wrappers at positive boolean positions: the barrier

    of the constraint is what re-establishes them at the target."""
    from .formulas import Imp, Or

    if isinstance(f, Modal) and f.accent is None and f.op in ops:
        return strip_wrappers(f.body, ops)
    if isinstance(f, And):
        return conj([strip_wrappers(c, ops) for c in f.args])
    if isinstance(f, Or):
        return disj([strip_wrappers(c, ops) for c in f.args])
    if isinstance(f, Imp):
        return rebuild(f, (f.a, strip_wrappers(f.b, ops)))
    if isinstance(f, Quant):
        return rebuild(f, (strip_wrappers(f.body, ops),))
    return f


# ---------------------------------------------------------------- generation


class Generator:
    def __init__(self, prog: LacedProgram, flags: Flags, sat_resolver=None):
        self.prog = prog
        self.flags = flags
        self.fresh = Freshener()
        self.sat_resolver = sat_resolver
        self.obs: list = []
        self.coh_vars: set = self._coherence_vars()
        self.elab: dict = {}  # (thread, label) -> Formula
        self.intfpre: dict = {}  # (thread, label) -> Formula
        self.posts: dict = {}  # (thread, label[, arm]) -> Formula
        self.relies: dict = {}  # thread -> list of (src_thread|None, Interference)

    # ------------------------------------------------------------- helpers

    def emit(self, kind, loc, hyp, con, quotient=(), trail="", structural=None,
             trivial=None, pms=False):
        self.obs.append(
            Obligation(kind, loc, canon(hyp), canon(con), tuple(quotient),
                       trail, structural, trivial, pms)
        )

    def _coherence_vars(self) -> set:
        vs: set = set()
        p = self.prog
        for f in _all_assertions(p):
            vs |= coherence_vars(f)
        return vs

    # --------------------------------------------------------------- run

    def run(self) -> list:
        p = self.prog
        self._structural_checks()
        for t in p.threads:
            self._thread_preconditions(t)
        for t in p.threads:
            self._form_rely(t)
        for t in p.threads:
            self._thread_obligations(t)
        self._pms()
        return self.obs

    # ----------------------------------------------------- structural layer

    def _structural_checks(self):
        p = self.prog
        bad = restrict_initial(p.init)
        self.emit(
            "BU_RESTRICT", Location(None, p.init_label), TRUE, TRUE,
            trail="initial assertion restriction",
            structural="ok" if not bad else
            "; ".join(f"temporal coincidence {render(b)}" for b in bad),
        )
        for t in p.threads:
            for where, f in _thread_assertions(t):
                bad = restrict_BU(f)
                if bad:
                    self.emit(
                        "BU_RESTRICT", Location(t.index, where), TRUE, TRUE,
                        trail=f"B/U body restriction in {render(f)}",
                        structural="; ".join(
                            f"temporal coincidence {render(b)}" for b in bad
                        ),
                    )
        for t in p.threads:
            unc = check_constraint_coverage(t, p.init_label, self.flags.unroll)
            self.emit(
                "COVERAGE", Location(t.index, None), TRUE, TRUE,
                trail="constraint coverage",
                structural="ok" if not unc else "; ".join(
                    f"{lbl} uncovered on {path}" for (lbl, path) in unc
                ),
            )
        for v in validate_aux_discipline(self.prog):
            self.emit(
                "AUX", Location(v.thread, v.label), TRUE, TRUE,
                trail=v.message, structural=v.message,
            )
        if not any(o.kind == "AUX" for o in self.obs):
            self.emit("AUX", Location(None, None), TRUE, TRUE,
                      trail="auxiliary discipline", structural="ok")

    # ------------------------------------------------- preconditions, posts

    def _thread_preconditions(self, t: Thread):
        p = self.prog
        self.posts[(None, p.init_label)] = Modal("sofar", p.init)
        for c in iter_components(t.body):
            pre = precondition_from_knot(c.knot, getattr(c, "intfpre", None))
            elab = resolve_sats(pre.elaboration, self.sat_resolver)
            intf = resolve_sats(pre.interference, self.sat_resolver)
            self.elab[(t.index, c.label)] = elab
            self.intfpre[(t.index, c.label)] = intf
            if isinstance(c, (If, While, DoUntil)):
                posts = control_posts(c.cond, elab)
                self.posts[(t.index, c.label, "t")] = posts["t"]
                self.posts[(t.index, c.label, "f")] = posts["f"]
            elif isinstance(c.payload, Assign):
                self.posts[(t.index, c.label)] = sp(elab, c.payload)
            elif isinstance(c.payload, Skip):
                self.posts[(t.index, c.label)] = elab
            elif isinstance(c.payload, AssertCmd):
                self.posts[(t.index, c.label)] = c.payload.assertion

    def _post_of_source(self, t: Thread, stitch) -> Formula:
        p = self.prog
        if stitch.source == p.init_label:
            return self.posts[(None, p.init_label)]
        key = (t.index, stitch.source, stitch.arm) if stitch.arm else (
            t.index, stitch.source)
        if key not in self.posts:
            raise GenerationError(
                f"thread {t.index}: no postcondition for {stitch.source_ref}"
            )
        return self.posts[key]

    # ------------------------------------------------------------ the rely

    def _form_rely(self, t: Thread):
        p = self.prog
        if t.rely is not None:
            entries = [(None, i) for i in t.rely]
            self.relies[t.index] = entries
            # every other thread's interference must be included in the rely
            for u in p.threads:
                if u.index == t.index:
                    continue
                for gi, g in enumerate(u.guarantee):
                    self._include_obligation(
                        "RELY_INCLUDE",
                        Location(t.index, "rely", f"t{u.index}.guar{gi}"),
                        g, [i for (_, i) in entries],
                        trail=f"guarantee entry of thread {u.index} included"
                              f" in the declared rely of thread {t.index}",
                    )
            pairs = []
            for ai, (_, a) in enumerate(entries):
                for bi, (_, b) in enumerate(entries):
                    if ai == bi:
                        pairs.append((a, b, True))
                    else:
                        pairs.append((a, b, False))
            self._rely_merge_checks(t, pairs, "rely")
            return
        entries = []
        for u in p.threads:
            if u.index == t.index:
                continue
            for g in u.guarantee:
                if self._irrelevant(t, g):
                    continue
                entries.append((u.index, g))
        self.relies[t.index] = entries
        pairs = []
        for (ti, a) in entries:
            for (tj, b) in entries:
                if ti == tj:
                    continue
                pairs.append((a, b, False))
        self._rely_merge_checks(t, pairs, "rely-merge")

    def _irrelevant(self, t: Thread, g: Interference) -> bool:
        """Interference on variables a thread neither reads, writes nor

        mentions in any assertion may be dropped from its rely."""
        mentioned: set = set()
        for _, f in _thread_assertions(t):
            mentioned |= free_vars(f)
        for c in iter_components(t.body):
            if isinstance(c, Command) and isinstance(c.payload, Assign):
                a = c.payload
                if a.kind == "read":
                    mentioned.add(a.rhs[0].name)
                elif a.kind == "write":
                    mentioned |= set(a.lhs)
        return not (set(g.lhs) & mentioned)

    def _rely_merge_checks(self, t: Thread, pairs, where: str):
        """BO stability between interferences writing distinct variables,

        UO stability between all of them."""
        for (a, b, selfpair) in pairs:
            if not (set(a.lhs) & set(b.lhs)):
                self._bo_obligation(
                    t.index, Location(t.index, where,
                                      f"{_intf_tag(b)} overtakes {_intf_tag(a)}"),
                    a.pre, a.bound, b,
                    trail="bo-stable merge of other threads' guarantees",
                )
            self._uo_obligation(
                t.index, Location(t.index, where,
                                  f"{_intf_tag(b)} overtakes {_intf_tag(a)}"),
                a.pre, a.bound, b,
                trail="uo-stable merge of other threads' guarantees",
            )

    # ------------------------------------------------- per-thread obligations

    def _thread_obligations(self, t: Thread):
        p = self.prog
        rely = self.relies[t.index]
        par = compute_parallelism(t, p.init_label, self.flags.unroll,
                                  self.flags.screg)
        # inheritance: every stitch, plus explicit interference preconditions
        for where, knot in _knots_of(t):
            for d in knot.disjuncts:
                for s in d.stitches:
                    post = self._post_of_source(t, s)
                    self.emit(
                        "INHERIT",
                        Location(t.index, where, f"{s.source_ref} {s.ordering}"),
                        post,
                        _inherit_conclusion(s),
                        trail=f"embroidery inherited from post({s.source_ref})",
                    )
        for c in iter_components(t.body):
            if isinstance(c, Command) and c.intfpre is not None:
                self.emit(
                    "INHERIT", Location(t.index, c.label, "intfpre"),
                    self.elab[(t.index, c.label)],
                    self.intfpre[(t.index, c.label)],
                    trail="declared interference precondition implied by"
                          " the elaboration precondition",
                )
        # internal (lo) stability of embroidery
        for (cmd, tgt, s) in par.lo_parallel:
            self._lo_obligation(t, cmd, tgt, s)
        # in-flight (bo) and universal (uo) stability of interference
        for (a, b) in par.bo_parallel:
            if not self._is_effective(t, b):
                continue
            self._bo_obligation(
                t.index,
                Location(t.index, a.label, f"intf vs {b.label}"),
                self.intfpre[(t.index, a.label)], (),
                _cmd_intf(t, b, self.intfpre[(t.index, b.label)]),
                trail=f"{b.label} may propagate past {a.label}",
            )
        for (a, b) in par.uo_parallel:
            if not self._is_effective(t, b):
                continue
            self._uo_obligation(
                t.index,
                Location(t.index, a.label,
                         "intf self" if a.label == b.label
                         else f"intf vs {b.label}"),
                self.intfpre[(t.index, a.label)], (),
                _cmd_intf(t, b, self.intfpre[(t.index, b.label)]),
                trail=f"{b.label} may universally overtake {a.label}",
            )
        # external stability of every embroidery
        for where, knot in _knots_of(t):
            for d in knot.disjuncts:
                for s in d.stitches:
                    for (src, g) in rely:
                        tag = _intf_tag(g) if src is None else f"t{src}:{_intf_tag(g)}"
                        self._ext_obligation(t, where, s, g, tag)
                        if mentions_usofar(s.assertion):
                            self._uext_obligation(t, where, s, g, tag)
        # guarantee inclusion
        for c in iter_components(t.body):
            if not (isinstance(c, Command) and isinstance(c.payload, Assign)):
                continue
            if c.payload.kind != "write":
                continue
            self._include_obligation(
                "GUAR_INCLUDE", Location(t.index, c.label, "guar"),
                Interference((), self.intfpre[(t.index, c.label)],
                             c.payload.lhs, c.payload.rhs),
                list(t.guarantee),
                trail=f"interference of {c.label} included in the guarantee",
            )
        # coherence side conditions
        for c in iter_components(t.body):
            if not (isinstance(c, Command) and isinstance(c.payload, Assign)):
                continue
            a = c.payload
            if a.kind != "write":
                continue
            if len(a.lhs) == 1 and len(a.rhs) > 1:
                from .formulas import TupleLit

                targets = [(a.lhs[0], TupleLit(tuple(a.rhs)))]
            else:
                targets = list(zip(a.lhs, a.rhs))
            for v, e in targets:
                if v in self.coh_vars:
                    self.emit(
                        "UNIQUE_WRITE", Location(t.index, c.label, v),
                        self.elab[(t.index, c.label)],
                        Modal("sofar", Not(Cmp("=", Var(v), e))),
                        trail=f"coherence variable {v} needs unique writes",
                    )

    def _is_effective(self, t: Thread, c: Command) -> bool:
        from .formulas import FALSE

        return canon(self.intfpre[(t.index, c.label)]) != FALSE

    # -------------------------------------------------- stability obligations

    def _lo_obligation(self, t: Thread, cmd: Command, tgt: str, s):
        p = self.assn_pre(t, cmd)
        q, a, qnames = self.fresh.quotient_assignment(p, cmd.payload)
        emb = s.assertion
        if not _touches(a, emb):
            triv = "frame"
        else:
            triv = None
        hyp = sp(conj([emb, q]), a)
        self.emit(
            "LO", Location(t.index, tgt, f"{s.source_ref} {s.ordering}"
                                         f" vs {cmd.label}"),
            hyp, emb, qnames,
            trail=f"{cmd.label} may elaborate inside the {s.source_ref}"
                  f"->{tgt} window",
            trivial=triv,
        )

    def assn_pre(self, t: Thread, cmd: Command) -> Formula:
        # lo interference happens at elaboration, under the elaboration pre
        return self.elab[(t.index, cmd.label)]

    def _ext_obligation(self, t: Thread, where, s, g: Interference, tag: str):
        pre, a, qnames = self.fresh.instantiate(g)
        emb = s.assertion
        triv = "frame" if not _touches(a, emb) else None
        hyp = sp(conj([emb, hat(pre)]), a)
        self.emit(
            "EXT", Location(t.index, where, f"{s.source_ref} {s.ordering}"
                                            f" vs {tag}"),
            hyp, emb, qnames,
            trail="external stability of embroidery against the rely",
            trivial=triv,
        )

    def _uext_obligation(self, t: Thread, where, s, g: Interference, tag: str):
        pre, a, qnames = self.fresh.instantiate(g)
        emb = s.assertion
        tw = twiddle(emb)
        triv = "frame" if not _touches_usofar(a, emb) else None
        hyp = sp(conj([tw, pre]), a)
        self.emit(
            "UEXT", Location(t.index, where, f"{s.source_ref} {s.ordering}"
                                             f" vs {tag}"),
            hyp, tw, qnames,
            trail="stability against interference without propagation",
            trivial=triv,
        )

    def _bo_obligation(self, tidx, loc, p_pre, p_bound, q: Interference, trail):
        self.fresh.counter += 1
        tag = self.fresh.counter
        pmap = {b: LogVar(f"{b}_{tag}") for b in p_bound}
        p1 = _rename_logicals(p_pre, pmap)
        p1, _, pregs = _quotient_regs(p1, (), tag)
        q_pre, a, qnames = self.fresh.instantiate(q)
        hp = hat(p1)
        triv = "frame" if not _touches(a, p1) else None
        hyp = sp(conj([hp, double_hat(q_pre)]), a)
        self.emit(
            "BO", loc, hyp, hp,
            tuple([f"{b}_{tag}" for b in p_bound] + pregs) + qnames,
            trail=trail, trivial=triv,
        )

    def _uo_obligation(self, tidx, loc, p_pre, p_bound, q: Interference, trail):
        self.fresh.counter += 1
        tag = self.fresh.counter
        pmap = {b: LogVar(f"{b}_{tag}") for b in p_bound}
        p1 = _rename_logicals(p_pre, pmap)
        p1, _, pregs = _quotient_regs(p1, (), tag)
        q_pre, a, qnames = self.fresh.instantiate(q)
        tp = twiddle(p1)
        triv = None
        if not mentions_usofar(p1):
            triv = "twiddle"  # fully accented: substitution cannot touch it
        elif not _touches_usofar(a, p1):
            triv = "frame"
        hyp = sp(conj([tp, double_twiddle(q_pre)]), a)
        self.emit(
            "UO", loc, hyp, tp,
            tuple([f"{b}_{tag}" for b in p_bound] + pregs) + qnames,
            trail=trail, trivial=triv,
        )

    # --------------------------------------------------------- inclusion

    def _include_obligation(self, kind, loc, single: Interference,
                            entries: list, trail: str):
        universe = set(single.lhs)
        for e in entries:
            universe |= set(e.lhs)
        universe = sorted(universe)
        pre, a, qnames = self.fresh.instantiate(single)
        hyp = _effect(pre, a.lhs, a.rhs, universe)
        cases = [_nothing_changes(universe)]
        for e in entries:
            body = _effect(e.pre, e.lhs, e.rhs, universe)
            if e.bound:
                body = Quant("exists", e.bound, body)
            regs = sorted(free_regs(e.pre) | set().union(
                *[free_regs(x) for x in e.rhs]) if e.rhs else free_regs(e.pre))
            if regs:
                mapping = {r: LogVar(f"E_{r}") for r in regs}

                def ren(f, mapping=mapping):
                    if isinstance(f, Reg) and f.name in mapping:
                        return mapping[f.name]
                    return rebuild(f, tuple(ren(c, mapping) for c in children(f)))

                body = Quant("exists", tuple(f"E_{r}" for r in regs), ren(body))
            cases.append(body)
        self.emit(kind, loc, hyp, disj(cases), qnames, trail=trail)

    # --------------------------------------------------------------- PMS

    def _pms(self):
        p = self.prog
        mode = self.flags.pms
        if mode == "off":
            return
        if p.final is None:
            if mode == "on":
                raise GenerationError("PMS check requested but no final assertion")
            return
        k = len(p.threads)
        hyp_parts = []
        notes = []
        for t in p.threads:
            post = _thread_postcondition(t)
            hyp_parts.append(At(post, t.index))
            d = down(post)
            hyp_parts.append(At(d.formula, k))
            notes.extend(d.notes)
        _check_final_registers(p.final)
        con = At(p.final, k)
        trail = "thread postconditions and their propagatable weakenings in" \
                f" the controlling thread {k}"
        if notes:
            trail += "; " + "; ".join(notes)
        self.emit("PMS", Location(None, p.final_label or "final"),
                  conj(hyp_parts), con, trail=trail, pms=True)


# ------------------------------------------------------------------- helpers


def _all_assertions(p: LacedProgram):
    yield p.init
    if p.final is not None:
        yield p.final
    for t in p.threads:
        for _, f in _thread_assertions(t):
            yield f


def _thread_assertions(t: Thread):
    for i, g in enumerate(t.guarantee):
        yield f"guar{i}", g.pre
    for c in iter_components(t.body):
        for s in c.knot.stitches():
            yield c.label, s.assertion
        if isinstance(c, Command):
            if c.intfpre is not None:
                yield c.label, c.intfpre
            if c.sc_pre is not None:
                yield c.label, c.sc_pre
    if t.threadpost is not None:
        for s in t.threadpost.stitches():
            yield "threadpost", s.assertion
    if t.sc_post is not None:
        yield "threadpost", t.sc_post
    for i, g in enumerate(t.rely or ()):
        yield f"rely{i}", g.pre


def _knots_of(t: Thread):
    for c in iter_components(t.body):
        yield c.label, c.knot
    if t.threadpost is not None:
        yield "threadpost", t.threadpost


def _inherit_conclusion(s) -> Formula:
    if s.ordering == "bo":
        return strip_wrappers(s.assertion, STRIP_BO)
    if s.ordering == "uo":
        return strip_wrappers(s.assertion, STRIP_UO)
    return s.assertion


def _cmd_intf(t: Thread, c: Command, pre: Formula) -> Interference:
    return Interference((), pre, c.payload.lhs, c.payload.rhs)


def _intf_tag(g: Interference) -> str:
    return ",".join(g.lhs) + ":="


def _touches(a: Assign, f: Formula) -> bool:
    if a.kind == "write":
        return bool(set(a.lhs) & free_vars(f))
    return bool(set(a.lhs) & free_regs(f))


def _touches_usofar(a: Assign, f: Formula) -> bool:
    """Does the assignment touch a variable with a U/sofar-modal occurrence?

    Only those plain occurrences survive twiddling."""
    if a.kind != "write":
        return False
    target: set = set()

    def scan(g: Formula, inside: bool):
        if isinstance(g, Var) and inside:
            target.add(g.name)
        if isinstance(g, Modal) and g.op in ("U", "sofar", "fandw"):
            inside = True
        for c in children(g):
            scan(c, inside)

    scan(f, False)
    return bool(set(a.lhs) & target)


def _effect(pre: Formula, lhs: tuple, rhs: tuple, universe: list) -> Formula:
    """Two-state relation of one interference: precondition in the hooked

    pre-state, assigned variables take their expressions, the rest of the
    universe is unchanged."""
    parts = [hook_all(pre)]
    if len(lhs) == 1 and len(rhs) > 1:
        from .formulas import TupleLit

        parts.append(Cmp("=", Var(lhs[0]), TupleLit(tuple(rhs))))
    else:
        for v, e in zip(lhs, rhs):
            parts.append(Cmp("=", Var(v), e))
    for u in universe:
        if u not in lhs:
            parts.append(Cmp("=", Var(u), Var(u, "hook")))
    return conj(parts)


def _nothing_changes(universe: list) -> Formula:
    return conj([Cmp("=", Var(u), Var(u, "hook")) for u in universe])


def _thread_postcondition(t: Thread) -> Formula:
    if t.sc_post is not None:
        return t.sc_post
    if t.threadpost is None:
        return TRUE
    return disj(
        [conj([s.assertion for s in d.stitches]) for d in t.threadpost.disjuncts]
    )


def _check_final_registers(final: Formula):
    def go(f: Formula, tagged: bool):
        if isinstance(f, Reg) and not tagged and f.thread is None:
            raise GenerationError(
                f"final assertion register {f.name} must be thread-indexed"
                " with @@"
            )
        t2 = tagged or isinstance(f, At)
        for c in children(f):
            go(c, t2)

    go(final, False)


def generate(prog: LacedProgram, flags: Flags | None = None, sat_resolver=None):
    if prog.is_sc:
        return generate_sc(prog, flags or Flags())
    return Generator(prog, flags or Flags(), sat_resolver).run()


# --------------------------------------------------------------- SC programs


def generate_sc(prog: LacedProgram, flags: Flags) -> list:
    """The checklist under sequential consistency: assertions chain through

    strongest postconditions, stability is sp(P & Q, x:=E) => P against
    other threads' guarantees, interference lands in the guarantee."""
    gen = Generator(prog, flags)  # reused for emit/freshener/pms plumbing
    obs = gen.obs
    for t in prog.threads:
        for c in iter_components(t.body):
            if not isinstance(c, Command):
                raise GenerationError(
                    "SC-notation programs support straight-line threads only"
                )
    for t in prog.threads:
        prev_post = prog.init
        pres = {}
        for c in t.body:
            pre = c.sc_pre if c.sc_pre is not None else TRUE
            pres[c.label] = pre
            gen.emit(
                "INHERIT", Location(t.index, c.label, "pre"),
                prev_post, pre,
                trail="assertion implied by the preceding postcondition",
            )
            if isinstance(c.payload, Assign):
                prev_post = sp(pre, c.payload)
            elif isinstance(c.payload, AssertCmd):
                prev_post = c.payload.assertion
            else:
                prev_post = pre
            gen.posts[(t.index, c.label)] = prev_post
        if t.sc_post is not None:
            gen.emit(
                "INHERIT", Location(t.index, "threadpost", "pre"),
                prev_post, t.sc_post,
                trail="thread postcondition implied by the last command",
            )
        # stability against the other threads' guarantees
        rely = []
        if t.rely is not None:
            rely = [(None, g) for g in t.rely]
        else:
            for u in prog.threads:
                if u.index != t.index:
                    rely += [(u.index, g) for g in u.guarantee]
        assertions = [(c.label, pres[c.label]) for c in t.body]
        if t.sc_post is not None:
            assertions.append(("threadpost", t.sc_post))
        for (label, a) in assertions:
            for (src, g) in rely:
                pre_g, asg, qnames = gen.fresh.instantiate(g)
                tag = _intf_tag(g) if src is None else f"t{src}:{_intf_tag(g)}"
                triv = "frame" if not _touches(asg, a) else None
                gen.emit(
                    "EXT", Location(t.index, label, f"sc vs {tag}"),
                    sp(conj([a, pre_g]), asg), a, qnames,
                    trail="SC stability against interference",
                    trivial=triv,
                )
        # guarantee inclusion
        for c in t.body:
            if isinstance(c.payload, Assign) and c.payload.kind == "write":
                gen._include_obligation(
                    "GUAR_INCLUDE", Location(t.index, c.label, "guar"),
                    Interference((), pres[c.label], c.payload.lhs, c.payload.rhs),
                    list(t.guarantee),
                    trail=f"interference of {c.label} included in the guarantee",
                )
    gen._pms()
    return obs
