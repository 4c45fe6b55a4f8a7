"""Assertion AST for the modal proof language.

Nodes are frozen dataclasses; formulas are immutable values, freely shared.
Accents record viewpoint shifts: 'hook' (pre-assignment state), 'hat'/'dhat'
(interfering-thread viewpoints), 'tilde'/'dtilde' (same shift, B moves with
the viewpoint).  User-written assertions are always accent-free; accents are
introduced only by the checker.
"""

from __future__ import annotations

from dataclasses import dataclass

ACCENTS = ("hook", "hook2", "hat", "dhat", "tilde", "dtilde")

ACCENT_SUFFIX = {
    None: "",
    "hook": "'",
    "hook2": "'2",
    "hat": "^",
    "dhat": "^^",
    "tilde": "~",
    "dtilde": "~~",
}


class Formula:
    """Base class for all assertion nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: object  # int or bool


@dataclass(frozen=True, slots=True)
class Var(Formula):
    """Shared program variable (regular or auxiliary)."""

    name: str
    accent: str | None = None


@dataclass(frozen=True, slots=True)
class Reg(Formula):
    """Thread-local register; `thread` is set only in PMS contexts."""

    name: str
    accent: str | None = None  # None or hook/hook2
    thread: int | None = None


@dataclass(frozen=True, slots=True)
class LogVar(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class TupleLit(Formula):
    items: tuple


@dataclass(frozen=True, slots=True)
class Bin(Formula):
    op: str  # + - * %
    a: Formula
    b: Formula


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    a: Formula


@dataclass(frozen=True, slots=True)
class Cmp(Formula):
    op: str  # = != < <= > >=
    a: Formula
    b: Formula


@dataclass(frozen=True, slots=True)
class Not(Formula):
    a: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True, slots=True)
class Quant(Formula):
    kind: str  # exists | forall
    names: tuple
    body: Formula


@dataclass(frozen=True, slots=True)
class Modal(Formula):
    """B, U, sofar, ouat or the embedding-internal fandw."""

    op: str
    body: Formula
    accent: str | None = None


@dataclass(frozen=True, slots=True)
class Since(Formula):
    a: Formula  # holds continuously
    b: Formula  # held at the start
    accent: str | None = None


@dataclass(frozen=True, slots=True)
class Co(Formula):
    """Coherence-order assertion var_c(A, B)."""

    var: str
    a: Formula
    b: Formula


@dataclass(frozen=True, slots=True)
class Cv(Formula):
    var: str


@dataclass(frozen=True, slots=True)
class Sat(Formula):
    """Meta-level satisfiability of the body; resolved before discharge."""

    body: Formula


@dataclass(frozen=True, slots=True)
class At(Formula):
    """P @@ n: P evaluated in thread n (PMS assertions only)."""

    body: Formula
    thread: int


@dataclass(frozen=True, slots=True)
class ReadEq(Formula):
    """Componentwise equality for an extended read r, raux, _ := x."""

    regs: tuple  # Reg or None per component
    var: Formula


TRUE = Const(True)
FALSE = Const(False)

MODAL_OPS = ("B", "U", "sofar", "ouat", "fandw")


def conj(parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        elif p == TRUE:
            continue
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.args)
        elif p == FALSE:
            continue
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def children(f: Formula) -> tuple:
    if isinstance(f, (Const, Var, Reg, LogVar, Cv)):
        return ()
    if isinstance(f, ReadEq):
        return tuple(r for r in f.regs if r is not None) + (f.var,)
    if isinstance(f, TupleLit):
        return f.items
    if isinstance(f, (Bin, Cmp)):
        return (f.a, f.b)
    if isinstance(f, (Neg, Not)):
        return (f.a,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Imp, Iff)):
        return (f.a, f.b)
    if isinstance(f, Quant):
        return (f.body,)
    if isinstance(f, Modal):
        return (f.body,)
    if isinstance(f, Since):
        return (f.a, f.b)
    if isinstance(f, Co):
        return (f.a, f.b)
    if isinstance(f, (Sat, At)):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, ReadEq):
        out, i = [], 0
        for r in f.regs:
            if r is None:
                out.append(None)
            else:
                out.append(kids[i])
                i += 1
        return ReadEq(tuple(out), kids[i])
    if isinstance(f, TupleLit):
        return TupleLit(kids)
    if isinstance(f, Bin):
        return Bin(f.op, *kids)
    if isinstance(f, Cmp):
        return Cmp(f.op, *kids)
    if isinstance(f, Neg):
        return Neg(kids[0])
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(kids)
    if isinstance(f, Or):
        return Or(kids)
    if isinstance(f, Imp):
        return Imp(*kids)
    if isinstance(f, Iff):
        return Iff(*kids)
    if isinstance(f, Quant):
        return Quant(f.kind, f.names, kids[0])
    if isinstance(f, Modal):
        return Modal(f.op, kids[0], f.accent)
    if isinstance(f, Since):
        return Since(kids[0], kids[1], f.accent)
    if isinstance(f, Co):
        return Co(f.var, *kids)
    if isinstance(f, Sat):
        return Sat(kids[0])
    if isinstance(f, At):
        return At(kids[0], f.thread)
    return f


def walk(f: Formula):
    """Yield every node of f, preorder."""
    yield f
    for c in children(f):
        yield from walk(c)


def free_vars(f: Formula) -> set:
    """Names of program variables occurring in f, regardless of accent."""
    return {n.name for n in walk(f) if isinstance(n, Var)}


def plain_vars(f: Formula) -> set:
    """Variables with at least one unaccented occurrence outside accented

    modal nodes (the occurrences a substitution would touch)."""
    out: set = set()

    def go(g, shielded):
        if isinstance(g, Var):
            if g.accent is None and not shielded:
                out.add(g.name)
            return
        sh = shielded or (isinstance(g, (Modal, Since)) and g.accent is not None)
        for c in children(g):
            go(c, sh)

    go(f, False)
    return out


def free_regs(f: Formula) -> set:
    return {n.name for n in walk(f) if isinstance(n, Reg)}


def free_logicals(f: Formula) -> set:
    bound_stack: list = []
    out: set = set()

    def go(g):
        if isinstance(g, LogVar):
            if not any(g.name in b for b in bound_stack):
                out.add(g.name)
            return
        if isinstance(g, Quant):
            bound_stack.append(set(g.names))
            go(g.body)
            bound_stack.pop()
            return
        for c in children(g):
            go(c)

    go(f)
    return out


def has_node(f: Formula, pred) -> bool:
    return any(pred(n) for n in walk(f))


def is_temporal(f: Formula) -> bool:
    return has_node(f, lambda n: isinstance(n, (Modal, Since)))


def mentions_usofar(f: Formula) -> bool:
    return has_node(
        f, lambda n: isinstance(n, Modal) and n.op in ("U", "sofar")
    )


def coherence_vars(f: Formula) -> set:
    return {n.var for n in walk(f) if isinstance(n, Co)}


# ---------------------------------------------------------------- rendering

_PREC = {
    "iff": 1,
    "imp": 2,
    "since": 3,
    "or": 4,
    "and": 5,
    "not": 6,
    "cmp": 7,
    "add": 8,
    "mul": 9,
    "neg": 10,
    "atom": 11,
}


def render(f: Formula, prec: int = 0) -> str:
    def wrap(s, p):
        return f"({s})" if p < prec else s

    if isinstance(f, Const):
        if f.value is True:
            return "true"
        if f.value is False:
            return "false"
        return str(f.value)
    if isinstance(f, Var):
        return f.name + ACCENT_SUFFIX[f.accent]
    if isinstance(f, Reg):
        s = f.name + ACCENT_SUFFIX[f.accent]
        if f.thread is not None:
            s = f"({s} @@ {f.thread})"
        return s
    if isinstance(f, LogVar):
        return f.name
    if isinstance(f, TupleLit):
        return "(" + ", ".join(render(x) for x in f.items) + ")"
    if isinstance(f, Bin):
        p = _PREC["mul"] if f.op in ("*", "%") else _PREC["add"]
        return wrap(f"{render(f.a, p)} {f.op} {render(f.b, p + 1)}", p)
    if isinstance(f, Neg):
        return wrap(f"-{render(f.a, _PREC['neg'])}", _PREC["neg"])
    if isinstance(f, Cmp):
        p = _PREC["cmp"]
        return wrap(f"{render(f.a, p + 1)} {f.op} {render(f.b, p + 1)}", p)
    if isinstance(f, Not):
        return wrap(f"!{render(f.a, _PREC['not'])}", _PREC["not"])
    if isinstance(f, And):
        p = _PREC["and"]
        return wrap(" & ".join(render(x, p + 1) for x in f.args), p)
    if isinstance(f, Or):
        p = _PREC["or"]
        return wrap(" | ".join(render(x, p + 1) for x in f.args), p)
    if isinstance(f, Imp):
        p = _PREC["imp"]
        return wrap(f"{render(f.a, p + 1)} => {render(f.b, p)}", p)
    if isinstance(f, Iff):
        p = _PREC["iff"]
        return wrap(f"{render(f.a, p + 1)} <=> {render(f.b, p + 1)}", p)
    if isinstance(f, Quant):
        return wrap(
            f"{f.kind} {', '.join(f.names)} ({render(f.body)})", _PREC["not"]
        )
    if isinstance(f, Modal):
        return f"{f.op}({render(f.body)})" + ACCENT_SUFFIX[f.accent]
    if isinstance(f, Since):
        s = f"({render(f.a)} since {render(f.b)})"
        return s + ACCENT_SUFFIX[f.accent]
    if isinstance(f, Co):
        return f"{f.var}_c({render(f.a)}, {render(f.b)})"
    if isinstance(f, ReadEq):
        names = ", ".join("_" if r is None else render(r) for r in f.regs)
        return wrap(f"({names}) = {render(f.var)}", _PREC["cmp"])
    if isinstance(f, Cv):
        return f"cv({f.var})"
    if isinstance(f, Sat):
        return f"sat({render(f.body)})"
    if isinstance(f, At):
        return wrap(f"{render(f.body, _PREC['atom'])} @@ {f.thread}", _PREC["cmp"])
    raise TypeError(f"not a formula: {f!r}")


def canon(f: Formula) -> Formula:
    """Canonical form: flattened, sorted, deduplicated conjunctions and

    disjunctions, constants folded.  Used for fixed-point rewriting and
    structural equality modulo AC."""
    kids = tuple(canon(c) for c in children(f))
    f = rebuild(f, kids)
    if isinstance(f, And):
        flat: list = []
        for a in f.args:
            if isinstance(a, And):
                flat.extend(a.args)
            elif a == TRUE:
                continue
            elif a == FALSE:
                return FALSE
            else:
                flat.append(a)
        uniq = sorted(set(flat), key=render)
        return conj(uniq)
    if isinstance(f, Or):
        flat = []
        for a in f.args:
            if isinstance(a, Or):
                flat.extend(a.args)
            elif a == FALSE:
                continue
            elif a == TRUE:
                return TRUE
            else:
                flat.append(a)
        uniq = sorted(set(flat), key=render)
        return disj(uniq)
    if isinstance(f, Not):
        if f.a == TRUE:
            return FALSE
        if f.a == FALSE:
            return TRUE
    if isinstance(f, Imp):
        if f.a == TRUE:
            return f.b
        if f.a == FALSE:
            return TRUE
        if f.b == TRUE:
            return TRUE
    return f
