"""Translation of assertions into first-order problems over threads x instants.

Each program variable x becomes a function val_<x>(T, I); tuple-typed
variables get one function per component.  bev(I) is the boundary-event
predicate, with bev(himin) asserted; himin is a symbolic instant before all
others.  Accented occurrences shift to (1, hatI) / (2, dhatI); hooked ones
to (0, 0), the pre-assignment state; plain "now" is (0, 1) when the query
contains accents and (0, 0) otherwise.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import names
from .formulas import (
    And,
    At,
    Bin,
    Cmp,
    Co,
    Const,
    Cv,
    Formula,
    Iff,
    Imp,
    LogVar,
    Modal,
    Neg,
    Not,
    Or,
    Quant,
    ReadEq,
    Reg,
    Sat,
    Since,
    TupleLit,
    Var,
    render,
    walk,
)
from .modal import rewrite_modal


class EmbedError(Exception):
    pass


# ------------------------------------------------------------- symbol table


@dataclass
class SymbolTable:
    """Widths and sorts of program symbols, inferred from the program text."""

    var_width: dict = field(default_factory=dict)
    var_sort: dict = field(default_factory=dict)  # name -> tuple of 'Int'/'Bool'
    reg_sort: dict = field(default_factory=dict)
    log_sort: dict = field(default_factory=dict)
    coherence_vars: set = field(default_factory=set)

    def width(self, v: str) -> int:
        return self.var_width.get(v, 1)

    def sorts(self, v: str) -> tuple:
        return self.var_sort.get(v, ("Int",) * self.width(v))

    def regsort(self, r: str) -> str:
        return self.reg_sort.get(r, "Int")

    def logsort(self, n: str) -> str:
        return self.log_sort.get(n, "Int")


def _is_boolish(f: Formula) -> bool:
    return isinstance(f, Const) and isinstance(f.value, bool)


def infer_symbols(formulas, coherence_vars=()) -> SymbolTable:
    """One inference pass: tuple widths from literals and extended reads,

    Bool sorts from boolean constants and bare-atom positions."""
    st = SymbolTable()
    st.coherence_vars = set(coherence_vars)

    def set_width(v: str, w: int):
        old = st.var_width.get(v)
        if old is not None and old != w:
            raise EmbedError(f"variable {v} used with widths {old} and {w}")
        st.var_width[v] = w

    def mark_bool(f: Formula):
        if isinstance(f, Var):
            st.var_sort[f.name] = ("Bool",) * st.width(f.name)
        elif isinstance(f, Reg):
            st.reg_sort[f.name] = "Bool"
        elif isinstance(f, LogVar):
            st.log_sort[f.name] = "Bool"

    def scan(f: Formula, boolpos: bool):
        if isinstance(f, (Var, Reg, LogVar)):
            if boolpos:
                mark_bool(f)
            return
        if isinstance(f, Cmp):
            a, b = f.a, f.b
            if isinstance(a, Var) and isinstance(b, TupleLit):
                set_width(a.name, len(b.items))
                for i, item in enumerate(b.items):
                    if _is_boolish(item):
                        sorts = list(st.var_sort.get(a.name, ["Int"] * len(b.items)))
                        while len(sorts) < len(b.items):
                            sorts.append("Int")
                        sorts[i] = "Bool"
                        st.var_sort[a.name] = tuple(sorts)
            if isinstance(b, Var) and isinstance(a, TupleLit):
                scan(Cmp(f.op, b, a), False)
                return
            if _is_boolish(a):
                scan(b, True)
            if _is_boolish(b):
                scan(a, True)
            scan(a, False)
            scan(b, False)
            return
        if isinstance(f, ReadEq):
            if isinstance(f.var, Var):
                set_width(f.var.name, len(f.regs))
            for r in f.regs:
                if r is not None:
                    scan(r, False)
            return
        if isinstance(f, (And, Or)):
            for c in f.args:
                scan(c, True)
            return
        if isinstance(f, (Not, Imp, Iff)):
            for c in (f.a, f.b) if isinstance(f, (Imp, Iff)) else (f.a,):
                scan(c, True)
            return
        if isinstance(f, (Modal, Sat)):
            scan(f.body, True)
            return
        if isinstance(f, Since):
            scan(f.a, True)
            scan(f.b, True)
            return
        if isinstance(f, Quant):
            scan(f.body, True)
            return
        if isinstance(f, At):
            scan(f.body, True)
            return
        if isinstance(f, Co):
            st.coherence_vars.add(f.var)
            scan(f.a, False)
            scan(f.b, False)
            return
        for c in _children_safe(f):
            scan(c, False)

    for f in formulas:
        scan(f, True)
    return st


def _children_safe(f: Formula):
    from .formulas import children

    return children(f)


def infer_program_symbols(prog) -> SymbolTable:
    """Symbol table for a whole parsed program."""
    from .program import Assign, AssertCmd, Command, DoUntil, If, While, iter_components

    fs = [prog.init]
    if prog.final is not None:
        fs.append(prog.final)
    extended = []  # (var, width, rhs items) from assignments
    for t in prog.threads:
        for i in list(t.guarantee) + list(t.rely or ()):
            fs.append(i.pre)
            extended.append((i.lhs, i.rhs))
        for c in iter_components(t.body):
            for s in c.knot.stitches():
                fs.append(s.assertion)
            if isinstance(c, (If, While, DoUntil)):
                fs.append(c.cond)
                continue
            if c.intfpre is not None:
                fs.append(c.intfpre)
            if c.sc_pre is not None:
                fs.append(c.sc_pre)
            if isinstance(c.payload, AssertCmd):
                fs.append(c.payload.assertion)
            if isinstance(c.payload, Assign):
                a = c.payload
                for e in a.rhs:
                    fs.append(e)
                extended.append((a.lhs, a.rhs))
        if t.threadpost is not None:
            for s in t.threadpost.stitches():
                fs.append(s.assertion)
        if t.sc_post is not None:
            fs.append(t.sc_post)
    st = infer_symbols(fs)
    for lhs, rhs in extended:
        if len(lhs) == 1 and len(rhs) > 1 and names.classify(lhs[0]) in ("var", "auxvar"):
            w = st.var_width.get(lhs[0])
            if w is not None and w != len(rhs):
                raise EmbedError(f"variable {lhs[0]} used with widths {w} and {len(rhs)}")
            st.var_width[lhs[0]] = len(rhs)
            for i, e in enumerate(rhs):
                if _is_boolish(e):
                    sorts = list(st.var_sort.get(lhs[0], ["Int"] * len(rhs)))
                    while len(sorts) < len(rhs):
                        sorts.append("Int")
                    sorts[i] = "Bool"
                    st.var_sort[lhs[0]] = tuple(sorts)
        elif len(lhs) > 1 and names.classify(lhs[0]) in ("var", "auxvar"):
            for v, e in zip(lhs, rhs):
                if _is_boolish(e):
                    st.var_sort[v] = ("Bool",) * st.width(v)
        elif len(lhs) == 1 and len(rhs) == 1 and names.classify(lhs[0]).endswith("reg"):
            if _is_boolish(rhs[0]):
                st.reg_sort[lhs[0]] = "Bool"
        if (
            len(lhs) == 1
            and len(rhs) == 1
            and names.classify(lhs[0]) in ("var", "auxvar")
            and _is_boolish(rhs[0])
        ):
            st.var_sort[lhs[0]] = ("Bool",) * st.width(lhs[0])
    # reads copy the source's sort
    for t in prog.threads:
        for c in iter_components(t.body):
            from .program import Command as _C

            if isinstance(c, _C) and isinstance(c.payload, object):
                from .program import Assign as _A

                if isinstance(c.payload, _A) and c.payload.kind == "read":
                    src = c.payload.rhs[0]
                    if isinstance(src, Var):
                        sorts = st.sorts(src.name)
                        if len(c.payload.lhs) > 1:
                            if st.width(src.name) == 1:
                                st.var_width[src.name] = len(c.payload.lhs)
                                sorts = st.sorts(src.name)
                        for k, r in enumerate(c.payload.lhs):
                            if r != "_" and k < len(sorts) and sorts[k] == "Bool":
                                st.reg_sort[r] = "Bool"
    return st


# --------------------------------------------------------------------- grid


@dataclass(frozen=True)
class Grid:
    tn: int
    now: int  # 0 or 1
    has_hat: bool = False
    has_dhat: bool = False
    has_hook: bool = False
    has_at: bool = False

    @property
    def uses_hatI(self) -> bool:
        return self.has_hat

    @property
    def uses_dhatI(self) -> bool:
        return self.has_dhat


def select_grid(formulas) -> Grid:
    has_hook = has_hat = has_dhat = has_at = False
    max_at = -1
    has_usofar = False
    for f in formulas:
        for n in walk(f):
            acc = getattr(n, "accent", None)
            if isinstance(n, Var) and acc in ("hook", "hook2"):
                has_hook = True
            elif isinstance(n, (Modal, Since)) and acc in ("hook", "hook2"):
                has_hook = True
            if acc in ("hat", "tilde"):
                has_hat = True
            if acc in ("dhat", "dtilde"):
                has_dhat = True
            if isinstance(n, At):
                has_at = True
                max_at = max(max_at, n.thread)
            if isinstance(n, Modal) and n.op in ("U", "sofar", "fandw"):
                has_usofar = True
    accents = has_hook or has_hat or has_dhat
    if accents and has_at:
        raise EmbedError("accents and thread-indexed formulas in one obligation")
    if accents:
        tn = 3 if has_dhat else 2
        return Grid(tn, 1, has_hat, has_dhat, has_hook, False)
    if has_at:
        return Grid(max_at + 1, 0, False, False, False, True)
    if has_usofar:
        return Grid(2, 0)
    return Grid(1, 0)


# ----------------------------------------------------------------- emission


def smt_name(kind: str, name: str, extra: str = "") -> str:
    return f"{kind}_{name}{extra}"


class Emitter:
    def __init__(self, st: SymbolTable, grid: Grid, bounds=None):
        self.st = st
        self.grid = grid
        self.bounds = bounds  # (n_instants, dom) for bounded mode
        self.decls: dict = {}
        self.fresh_i = 0
        self.need_bev = False
        self.co_vars: set = set()
        self.cv_vars: set = set()

    def fresh(self, base: str) -> str:
        self.fresh_i += 1
        return f"{base}{self.fresh_i}"

    def declare(self, name: str, decl: str):
        if name not in self.decls:
            self.decls[name] = decl

    def val(self, v: str, comp: int, T: str, I: str) -> str:
        w = self.st.width(v)
        sort = self.st.sorts(v)[comp]
        fn = smt_name("val", v) if w == 1 else smt_name("val", v, f"_{comp}")
        self.declare(fn, f"(declare-fun {fn} (Int Int) {sort})")
        return f"({fn} {T} {I})"

    def reg(self, r: Reg) -> str:
        extra = ""
        if r.accent == "hook":
            extra += "_h"
        elif r.accent == "hook2":
            extra += "_h2"
        if r.thread is not None:
            extra += f"_t{r.thread}"
        nm = smt_name("reg", r.name, extra)
        self.declare(nm, f"(declare-const {nm} {self.st.regsort(r.name)})")
        return nm

    def logvar(self, n: str, bound: dict) -> str:
        if n in bound:
            return bound[n]
        nm = smt_name("log", n)
        self.declare(nm, f"(declare-const {nm} {self.st.logsort(n)})")
        return nm

    def bev(self, I: str) -> str:
        self.need_bev = True
        self.declare("bev", "(declare-fun bev (Int) Bool)")
        return f"(bev {I})"

    def co(self, v: str, a: str, b: str) -> str:
        fn = smt_name("co", v)
        self.declare(fn, f"(declare-fun {fn} (Int Int) Bool)")
        self.co_vars.add(v)
        return f"({fn} {a} {b})"

    def cv(self, v: str) -> str:
        nm = smt_name("cv", v)
        self.declare(nm, f"(declare-const {nm} Bool)")
        self.cv_vars.add(v)
        return nm

    def instant_const(self, name: str) -> str:
        self.declare(name, f"(declare-const {name} Int)")
        return name


@dataclass
class Ctx:
    T: str  # thread term
    I: str  # instant term
    static_T: int | None
    static_I: int | None
    reg_thread: int | None
    bound: dict  # logical name -> smt name


def _width_of(e, em: Emitter) -> int:
    if isinstance(e, Var):
        return em.st.width(e.name)
    if isinstance(e, TupleLit):
        return len(e.items)
    return 1


def _proj(e: Formula, k: int, em: Emitter, ctx: Ctx) -> str:
    """Component k of a possibly tuple-valued term."""
    if isinstance(e, Var):
        T, I = _viewpoint(e.accent, em, ctx)
        return em.val(e.name, k, T, I)
    if isinstance(e, TupleLit):
        return embed_term(e.items[k], em, ctx)
    if k == 0:
        return embed_term(e, em, ctx)
    raise EmbedError(f"component {k} of non-tuple {render(e)}")


def _viewpoint(accent: str | None, em: Emitter, ctx: Ctx):
    if accent is None:
        return ctx.T, ctx.I
    if accent == "hook":
        if em.grid.now != 1:
            raise EmbedError("hooked occurrence outside an assignment query")
        return "0", "0"
    if accent == "hook2":
        raise EmbedError("nested sp priming is not embeddable")
    if accent in ("hat", "tilde"):
        return "1", em.instant_const("hatI")
    if accent in ("dhat", "dtilde"):
        return "2", em.instant_const("dhatI")
    raise EmbedError(f"unknown accent {accent}")


def embed_term(e: Formula, em: Emitter, ctx: Ctx) -> str:
    if isinstance(e, Const):
        if e.value is True:
            return "true"
        if e.value is False:
            return "false"
        v = int(e.value)
        return str(v) if v >= 0 else f"(- {-v})"
    if isinstance(e, Var):
        if em.st.width(e.name) != 1:
            raise EmbedError(f"tuple variable {e.name} outside a comparison")
        T, I = _viewpoint(e.accent, em, ctx)
        return em.val(e.name, 0, T, I)
    if isinstance(e, Reg):
        r = e
        if ctx.reg_thread is not None and r.thread is None:
            r = Reg(r.name, r.accent, ctx.reg_thread)
        return em.reg(r)
    if isinstance(e, LogVar):
        return em.logvar(e.name, ctx.bound)
    if isinstance(e, Bin):
        op = {"%": "mod"}.get(e.op, e.op)
        return f"({op} {embed_term(e.a, em, ctx)} {embed_term(e.b, em, ctx)})"
    if isinstance(e, Neg):
        return f"(- {embed_term(e.a, em, ctx)})"
    raise EmbedError(f"not a term: {render(e)}")


def _conj(parts) -> str:
    parts = [p for p in parts if p != "true"]
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def _disj(parts) -> str:
    if not parts:
        return "false"
    if len(parts) == 1:
        return parts[0]
    return "(or " + " ".join(parts) + ")"


def embed(f: Formula, em: Emitter, ctx: Ctx) -> str:
    """[f]^T_I per the embedding rules."""
    if isinstance(f, Const):
        return embed_term(f, em, ctx)
    if isinstance(f, (Var, Reg, LogVar)):
        # boolean atom
        return embed_term(f, em, ctx)
    if isinstance(f, Cmp):
        wa, wb = _width_of(f.a, em), _width_of(f.b, em)
        w = max(wa, wb)
        if w > 1:
            if wa not in (w,) and not isinstance(f.a, (Var, TupleLit)):
                raise EmbedError(f"width mismatch in {render(f)}")
            eqs = [
                f"(= {_proj(f.a, k, em, ctx)} {_proj(f.b, k, em, ctx)})"
                for k in range(w)
            ]
            if f.op == "=":
                return _conj(eqs)
            if f.op == "!=":
                return f"(not {_conj(eqs)})"
            raise EmbedError(f"ordered comparison on tuples: {render(f)}")
        a, b = embed_term(f.a, em, ctx), embed_term(f.b, em, ctx)
        if f.op == "=":
            return f"(= {a} {b})"
        if f.op == "!=":
            return f"(not (= {a} {b}))"
        return f"({f.op} {a} {b})"
    if isinstance(f, ReadEq):
        parts = []
        for k, r in enumerate(f.regs):
            if r is None:
                continue
            parts.append(f"(= {embed_term(r, em, ctx)} {_proj(f.var, k, em, ctx)})")
        return _conj(parts)
    if isinstance(f, Not):
        return f"(not {embed(f.a, em, ctx)})"
    if isinstance(f, And):
        return _conj([embed(c, em, ctx) for c in f.args])
    if isinstance(f, Or):
        return _disj([embed(c, em, ctx) for c in f.args])
    if isinstance(f, Imp):
        return f"(=> {embed(f.a, em, ctx)} {embed(f.b, em, ctx)})"
    if isinstance(f, Iff):
        return f"(= {embed(f.a, em, ctx)} {embed(f.b, em, ctx)})"
    if isinstance(f, Quant):
        bound = dict(ctx.bound)
        decls = []
        for n in f.names:
            nm = em.fresh(f"q_{n}_")
            bound[n] = nm
            decls.append(f"({nm} {em.st.logsort(n)})")
        inner = embed(f.body, em, Ctx(ctx.T, ctx.I, ctx.static_T, ctx.static_I,
                                      ctx.reg_thread, bound))
        q = "exists" if f.kind == "exists" else "forall"
        return f"({q} ({' '.join(decls)}) {inner})"
    if isinstance(f, Sat):
        raise EmbedError(f"unresolved sat(...) at embedding time: {render(f)}")
    if isinstance(f, At):
        if ctx.static_I != 0:
            raise EmbedError("thread-indexed formula outside instant 0")
        sub = Ctx(str(f.thread), "0", f.thread, 0, f.thread, ctx.bound)
        return embed(f.body, em, sub)
    if isinstance(f, Co):
        a = embed_term(f.a, em, ctx)
        b = embed_term(f.b, em, ctx)
        return em.co(f.var, a, b)
    if isinstance(f, Cv):
        return em.cv(f.var)
    if isinstance(f, Since):
        T, I, sT, sI = _node_viewpoint(f.accent, em, ctx)
        return _embed_since(f.a, f.b, em, Ctx(T, I, sT, sI, ctx.reg_thread, ctx.bound))
    if isinstance(f, Modal):
        T, I, sT, sI = _node_viewpoint(f.accent, em, ctx)
        sub = Ctx(T, I, sT, sI, ctx.reg_thread, ctx.bound)
        if f.op == "B":
            return _embed_since(f.body, BEV, em, sub)
        if f.op == "U":
            return _embed_since(Modal("fandw", f.body), BEV, em, sub)
        if f.op == "sofar":
            j = em.fresh("i")
            inner = embed(Modal("fandw", f.body), em,
                          Ctx(T, j, sT, None, ctx.reg_thread, ctx.bound))
            em.instant_const("himin")
            return (f"(forall (({j} Int)) (=> (and (<= himin {j}) (<= {j} {I}))"
                    f" {inner}))")
        if f.op == "ouat":
            j = em.fresh("i")
            inner = embed(f.body, em, Ctx(T, j, sT, None, ctx.reg_thread, ctx.bound))
            em.instant_const("himin")
            return (f"(exists (({j} Int)) (and (<= himin {j}) (<= {j} {I})"
                    f" {inner}))")
        if f.op == "fandw":
            return _embed_fandw(f.body, em, sub)
    raise EmbedError(f"cannot embed {render(f)}")


class _Bev:
    pass


BEV = _Bev()


def _node_viewpoint(accent, em: Emitter, ctx: Ctx):
    if accent is None:
        return ctx.T, ctx.I, ctx.static_T, ctx.static_I
    if accent in ("hook", "hook2"):
        if accent == "hook2":
            raise EmbedError("nested sp priming is not embeddable")
        if em.grid.now != 1:
            raise EmbedError("hooked modality outside an assignment query")
        return "0", "0", 0, 0
    if accent in ("hat", "tilde"):
        return "1", em.instant_const("hatI"), 1, None
    if accent in ("dhat", "dtilde"):
        return "2", em.instant_const("dhatI"), 2, None
    raise EmbedError(f"unknown accent {accent}")


def _embed_since(p, q, em: Emitter, ctx: Ctx) -> str:
    j = em.fresh("i")
    k = em.fresh("i")
    if isinstance(q, _Bev):
        qs = em.bev(j)
    else:
        qs = embed(q, em, Ctx(ctx.T, j, ctx.static_T, None, ctx.reg_thread, ctx.bound))
    ps = embed(p, em, Ctx(ctx.T, k, ctx.static_T, None, ctx.reg_thread, ctx.bound))
    em.instant_const("himin")
    return (
        f"(exists (({j} Int)) (and (<= himin {j}) (<= {j} {ctx.I}) {qs}"
        f" (forall (({k} Int)) (=> (and (<= {j} {k}) (<= {k} {ctx.I})) {ps}))))"
    )


def _embed_fandw(p, em: Emitter, ctx: Ctx) -> str:
    """Fandw: local at the special (0, now=1) state, global elsewhere."""
    t = em.fresh("t")
    inner = embed(p, em, Ctx(t, ctx.I, None, ctx.static_I, ctx.reg_thread, ctx.bound))
    glob = (f"(forall (({t} Int)) (=> (and (<= 0 {t}) (< {t} {em.grid.tn}))"
            f" {inner}))")
    if em.grid.now != 1:
        return glob
    local = embed(p, em, ctx)
    if ctx.static_T == 0 and ctx.static_I == 1:
        return local
    if ctx.static_T not in (0, None):
        return glob
    if ctx.static_I is not None and ctx.static_I != 1:
        return glob
    guard = f"(and (= {ctx.T} 0) (= {ctx.I} 1))"
    return f"(ite {guard} {local} {glob})"


# -------------------------------------------------------------------- query


@dataclass
class SmtQuery:
    name: str
    text: str
    grid: Grid
    evals: tuple = ()  # ground terms evaluated for counter-model tables

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


def build_query(
    name: str,
    hypothesis: Formula,
    conclusion: Formula,
    st: SymbolTable,
    pms: bool = False,
    bounds=None,
    grid: Grid | None = None,
) -> SmtQuery:
    """Validity of hypothesis => conclusion as unsat of hyp & not concl.

    Quotiented names stay free (universal at the root is skolemized into
    the satisfiability side)."""
    hyp = rewrite_modal(hypothesis)
    con = rewrite_modal(conclusion)
    if grid is None:
        grid = select_grid([hyp, con])
    em = Emitter(st, grid, bounds)
    ctx = Ctx("0", str(grid.now), 0, grid.now, None, {})
    hs = embed(hyp, em, ctx)
    cs = embed(con, em, ctx)
    lines = ["(set-logic ALL)"]
    body = [f"(assert {hs})", f"(assert (not {cs}))"]
    axioms = _axioms(em, st, pms, bounds)
    decls = [em.decls[k] for k in sorted(em.decls)]
    lines += decls + axioms + body + ["(check-sat)"]
    evals = _eval_points(em, grid, bounds)
    return SmtQuery(name, "\n".join(lines) + "\n", grid, tuple(evals))


def build_sat_query(name: str, f: Formula, st: SymbolTable) -> SmtQuery:
    g = select_grid([f])
    em = Emitter(st, g, None)
    ctx = Ctx("0", str(g.now), 0, g.now, None, {})
    fs = embed(rewrite_modal(f), em, ctx)
    lines = ["(set-logic ALL)"]
    body = [f"(assert {fs})"]
    axioms = _axioms(em, st, False, None)
    decls = [em.decls[k] for k in sorted(em.decls)]
    lines += decls + axioms + body + ["(check-sat)"]
    return SmtQuery(name, "\n".join(lines) + "\n", g)


def _axioms(em: Emitter, st: SymbolTable, pms: bool, bounds) -> list:
    out = []
    grid = em.grid
    if "himin" in em.decls:
        out.append("(assert (< himin 0))")
        if "hatI" in em.decls:
            out.append("(assert (and (< himin hatI) (< hatI 0)))")
        if "dhatI" in em.decls:
            out.append("(assert (and (< himin dhatI) (< dhatI 0)))")
    elif "hatI" in em.decls:
        out.append("(assert (< hatI 0))")
        if "dhatI" in em.decls:
            out.append("(assert (< dhatI 0))")
    elif "dhatI" in em.decls:
        out.append("(assert (< dhatI 0))")
    if em.need_bev:
        em.instant_const("himin")
        if "(assert (< himin 0))" not in out:
            out.insert(0, "(assert (< himin 0))")
        out.append("(assert (bev himin))")
    # coherence axioms
    for v in sorted(em.co_vars):
        fn = smt_name("co", v)
        out.append(f"(assert (forall ((a Int)) (not ({fn} a a))))")
        out.append(
            f"(assert (forall ((a Int) (b Int) (c Int))"
            f" (=> (and ({fn} a b) ({fn} b c)) ({fn} a c))))"
        )
        out.append(
            f"(assert (forall ((a Int) (b Int)) (=> ({fn} a b) (not ({fn} b a)))))"
        )
        # observed: a thread that sees a then b certifies co(a, b)
        vw = st.width(v)
        if vw == 1 and _var_declared(em, v):
            em.instant_const("himin")
            vfn = smt_name("val", v)
            for t in range(grid.tn):
                hi = grid.now if t == 0 else min(grid.now, 0)
                out.append(
                    f"(assert (forall ((i Int) (j Int))"
                    f" (=> (and (<= himin i) (<= i j) (<= j {hi})"
                    f" (not (= ({vfn} {t} i) ({vfn} {t} j))))"
                    f" ({fn} ({vfn} {t} i) ({vfn} {t} j)))))"
                )
    for v in sorted(em.cv_vars):
        nm = smt_name("cv", v)
        if v in em.co_vars or v in st.coherence_vars:
            out.append(f"(assert {nm})")
        else:
            out.append(f"(assert (not {nm}))")
    if pms:
        out += _pms_axioms(em, st)
    if bounds is not None:
        out += _bound_axioms(em, st, bounds)
    return out


def _var_declared(em: Emitter, v: str) -> bool:
    return smt_name("val", v) in em.decls or smt_name("val", v, "_0") in em.decls


def _pms_axioms(em: Emitter, st: SymbolTable) -> list:
    """At termination every thread sees the same, coherence-maximal, last

    write to each variable."""
    out = []
    grid = em.grid
    for key in sorted(em.decls):
        if not key.startswith("val_"):
            continue
        for t in range(1, grid.tn):
            out.append(f"(assert (= ({key} 0 0) ({key} {t} 0)))")
    for v in sorted(em.co_vars):
        if not _var_declared(em, v) or st.width(v) != 1:
            continue
        vfn = smt_name("val", v)
        fn = smt_name("co", v)
        out.append(
            f"(assert (forall ((b Int)) (not ({fn} ({vfn} 0 0) b))))"
        )
    return out


def _bound_axioms(em: Emitter, st: SymbolTable, bounds) -> list:
    """Finite-grid mode for differential testing: consecutive instants from

    himin to now, values drawn from a small domain."""
    n_instants, dom = bounds
    grid = em.grid
    out = []
    em.instant_const("himin")
    lo = grid.now - (n_instants - 1)
    out.append(f"(assert (= himin {lo if lo >= 0 else f'(- {-lo})'}))")
    for key in sorted(em.decls):
        if not key.startswith("val_"):
            continue
        decl = em.decls[key]
        if decl.endswith("Bool)"):
            continue
        for t in range(grid.tn):
            hi = grid.now if t == 0 else min(grid.now, 0)
            for i in range(lo, hi + 1):
                ii = str(i) if i >= 0 else f"(- {-i})"
                out.append(
                    f"(assert (and (<= 0 ({key} {t} {ii}))"
                    f" (< ({key} {t} {ii}) {dom})))"
                )
    return out


def _eval_points(em: Emitter, grid: Grid, bounds) -> list:
    """Ground terms for counter-model rendering."""
    if bounds is None:
        pts = ["himin"] + [str(i) for i in range(0, grid.now + 1)]
        if "hatI" in em.decls:
            pts.append("hatI")
        if "dhatI" in em.decls:
            pts.append("dhatI")
    else:
        lo = grid.now - (bounds[0] - 1)
        pts = [str(i) if i >= 0 else f"(- {-i})" for i in range(lo, grid.now + 1)]
    out = []
    if "himin" in em.decls:
        out.append("himin")
    for key in sorted(em.decls):
        if key.startswith("val_"):
            for t in range(grid.tn):
                for p in pts:
                    if p in ("himin",) and "himin" not in em.decls:
                        continue
                    out.append(f"({key} {t} {p})")
        elif key.startswith("reg_") or key.startswith("log_"):
            out.append(key)
    return out
