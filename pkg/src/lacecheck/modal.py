"""Substitution, strongest postconditions, accents and modal rewrites.

The substitution rules for modalities: for M in {B, U, sofar, since},
M(P)[x\\x'] = hooked(M(P)) & P[x\\x'], while ouat(P)[x\\x'] = hooked(ouat(P)).
Register substitution passes through every modality.  Accented nodes are
other-viewpoint snapshots and are never touched by variable substitution.
"""

from __future__ import annotations

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
    canon,
    children,
    conj,
    free_vars,
    is_temporal,
    plain_vars,
    rebuild,
    render,
)
from .program import Assign


class AccentError(Exception):
    """Raised when an accent would be stacked on an accented position."""


def _hook_level(accent: str | None) -> str:
    if accent is None:
        return "hook"
    if accent == "hook":
        return "hook2"
    raise AccentError(f"cannot hook a {accent}-accented occurrence")


def hook_node(f: Formula) -> Formula:
    """Whole-node shift to the pre-assignment state."""
    if isinstance(f, (Modal, Since)):
        lvl = _hook_level(f.accent)
        if isinstance(f, Modal):
            return Modal(f.op, f.body, lvl)
        return Since(f.a, f.b, lvl)
    raise AccentError(f"only modal nodes are hooked whole: {render(f)}")


def subst_var(f: Formula, x: str) -> Formula:
    """f[x\\x']: replace plain occurrences of variable x by its hooked form,

    hooking modal nodes that mention x per the modality table."""
    if isinstance(f, Var):
        if f.name == x and f.accent is None:
            return Var(x, "hook")
        return f
    if isinstance(f, (Modal, Since)):
        if f.accent is not None:
            return f  # other viewpoint: decoupled
        if x not in plain_vars(f):
            return f
        if isinstance(f, Modal) and f.op == "ouat":
            return hook_node(f)
        if isinstance(f, Modal):  # B, U, sofar, fandw
            return conj([hook_node(f), subst_var(f.body, x)])
        # since: hooked(P since Q) & P[x\x']
        return conj([hook_node(f), subst_var(f.a, x)])
    if isinstance(f, Sat):
        return f  # satisfiability is state-independent
    kids = tuple(subst_var(c, x) for c in children(f))
    return rebuild(f, kids)


def subst_reg(f: Formula, r: str) -> Formula:
    """f[r\\r']: registers are invisible to modalities, so this distributes

    through everything."""
    if isinstance(f, Reg):
        if f.name == r and f.accent is None:
            return Reg(r, _hook_level(None), f.thread)
        return f
    kids = tuple(subst_reg(c, r) for c in children(f))
    return rebuild(f, kids)


# ------------------------------------------------------------------ accents


def _accent(f: Formula, single: str, double: str, twiddling: bool, dbl: bool) -> Formula:
    acc = double if dbl else single
    if isinstance(f, Var):
        if f.accent is not None:
            raise AccentError(f"accent on accented variable {render(f)}")
        return Var(f.name, acc)
    if isinstance(f, (Reg, LogVar, Const, Cv, Sat)):
        return f
    if isinstance(f, Modal):
        if f.accent is not None:
            raise AccentError(f"accent on accented node {render(f)}")
        if f.op == "sofar":
            return f
        if f.op == "ouat":
            return Modal("ouat", f.body, acc)
        if f.op == "B":
            if twiddling:
                return Modal("B", f.body, acc)
            return conj([f, _accent(f.body, single, double, twiddling, dbl)])
        if f.op in ("U", "fandw"):
            return conj([f, _accent(f.body, single, double, twiddling, dbl)])
    if isinstance(f, Since):
        if f.accent is not None:
            raise AccentError(f"accent on accented node {render(f)}")
        return Since(f.a, f.b, acc)
    if isinstance(f, Co):
        return Co(
            f.var,
            _accent(f.a, single, double, twiddling, dbl),
            _accent(f.b, single, double, twiddling, dbl),
        )
    if isinstance(f, At):
        raise AccentError("thread-indexed formulas cannot be accented")
    kids = tuple(_accent(c, single, double, twiddling, dbl) for c in children(f))
    return rebuild(f, kids)


def hat(f: Formula) -> Formula:
    return _accent(f, "hat", "dhat", twiddling=False, dbl=False)


def double_hat(f: Formula) -> Formula:
    return _accent(f, "hat", "dhat", twiddling=False, dbl=True)


def twiddle(f: Formula) -> Formula:
    return _accent(f, "tilde", "dtilde", twiddling=True, dbl=False)


def double_twiddle(f: Formula) -> Formula:
    return _accent(f, "tilde", "dtilde", twiddling=True, dbl=True)


def hook_all(f: Formula) -> Formula:
    """Shift a whole state formula to the pre-state (interference effects)."""
    if isinstance(f, Var):
        return Var(f.name, _hook_level(f.accent))
    if isinstance(f, (Modal, Since)):
        return hook_node(f)
    if isinstance(f, (Reg, LogVar, Const, Cv, Sat)):
        return f
    kids = tuple(hook_all(c) for c in children(f))
    return rebuild(f, kids)


# ------------------------------------------------------- strongest postcondition


def sp(p: Formula, assign: Assign) -> Formula:
    """Floyd assignment rule adapted to writes, reads and calculations,

    with the frame conjuncts for temporal assertions."""
    conjuncts: list = []
    if assign.kind == "write":
        if len(assign.lhs) != len(assign.rhs) and len(assign.rhs) > 1 and len(assign.lhs) > 1:
            raise ValueError("composite write arity mismatch")
        q = p
        for v in assign.lhs:
            q = subst_var(q, v)
        conjuncts.append(q)
        if len(assign.lhs) == 1 and len(assign.rhs) > 1:
            # extended write x := E, Eaux, ...
            conjuncts.append(Cmp("=", Var(assign.lhs[0]), TupleLit(tuple(assign.rhs))))
        else:
            for v, e in zip(assign.lhs, assign.rhs):
                conjuncts.append(Cmp("=", Var(v), e))
        if is_temporal(p):
            assigned = set(assign.lhs)
            for y in sorted(free_vars(p) - assigned):
                conjuncts.append(Cmp("=", Var(y, "hook"), Var(y)))
    elif assign.kind == "read":
        q = p
        for r in assign.lhs:
            if r != "_":
                q = subst_reg(q, r)
        conjuncts.append(q)
        src = Var(assign.rhs[0].name) if isinstance(assign.rhs[0], Var) else assign.rhs[0]
        if len(assign.lhs) == 1:
            conjuncts.append(Cmp("=", Reg(assign.lhs[0]), src))
        else:
            regs = tuple(Reg(r) if r != "_" else None for r in assign.lhs)
            conjuncts.append(ReadEq(regs, src))
    elif assign.kind == "calc":
        r = assign.lhs[0]
        q = subst_reg(p, r)
        conjuncts.append(q)
        conjuncts.append(Cmp("=", Reg(r), subst_reg(assign.rhs[0], r)))
    else:
        raise ValueError(f"unknown assignment kind {assign.kind}")
    return conj(conjuncts)


# ------------------------------------------------------------- modal rewrites


def rewrite_modal(f: Formula) -> Formula:
    """Left-to-right application of the modality equations to a fixed point.

    Keeps formulas embedding-equivalent while reducing quantifier
    alternation in the eventual SMT query."""

    def step(g: Formula) -> Formula:
        kids = tuple(step(c) for c in children(g))
        g = rebuild(g, kids)
        if isinstance(g, Modal) and g.accent is None:
            b = g.body
            if g.op in ("B", "U", "sofar") and isinstance(b, And):
                return conj([Modal(g.op, x) for x in b.args])
            if isinstance(b, Const) and isinstance(b.value, bool):
                if g.op in ("B", "U", "sofar", "ouat", "fandw"):
                    return b
            if isinstance(b, Modal) and b.accent is None:
                if g.op == b.op:
                    return b
                if g.op == "U" and b.op == "B":
                    return Modal("U", b.body)
                if g.op == "B" and b.op == "U":
                    return b
                if g.op == "U" and b.op == "sofar":
                    return b
                if g.op == "sofar" and b.op in ("U", "B"):
                    return Modal("sofar", b.body)
            if g.op == "U" and isinstance(b, Since) and b.accent is None:
                fa = Modal("fandw", b.a)
                return Since(fa, conj([fa, b.b]))
        if isinstance(g, Since) and g.accent is None:
            if isinstance(g.a, Since) and g.a.accent is None:
                # (P since Q) since R = P since ((P since Q) & R)
                return Since(g.a.a, conj([g.a, g.b]))
            if isinstance(g.a, Modal) and g.a.op == "sofar" and g.a.accent is None:
                return conj([g.a, Modal("ouat", g.b)])
        return g

    prev = None
    cur = canon(f)
    for _ in range(50):
        if cur == prev:
            break
        prev = cur
        cur = canon(step(cur))
    return cur


# --------------------------------------------------------------- restrictions


def restrict_BU(f: Formula) -> list:
    """Check the B/U body restriction: no temporal coincidence over two or

    more distinct variables inside a B or U body (sofar bodies exempt).
    Returns the offending subformulas; empty means ok."""
    bad: list = []

    def scan_body(g: Formula):
        if isinstance(g, Modal) and g.op == "sofar":
            return
        if isinstance(g, (Since,)) or (isinstance(g, Modal) and g.op == "ouat"):
            inner = children(g)
            vs: set = set()
            for c in inner:
                vs |= free_vars(c)
            if len(vs) >= 2:
                bad.append(g)
        for c in children(g):
            scan_body(c)

    def scan(g: Formula):
        if isinstance(g, Modal) and g.op in ("B", "U"):
            scan_body(g.body)
        for c in children(g):
            scan(c)

    scan(f)
    return bad


def restrict_initial(f: Formula) -> list:
    """The initial assertion obeys the same coincidence restriction."""
    bad: list = []

    def scan(g: Formula):
        if isinstance(g, Modal) and g.op == "sofar":
            return
        if isinstance(g, Since) or (isinstance(g, Modal) and g.op == "ouat"):
            vs: set = set()
            for c in children(g):
                vs |= free_vars(c)
            if len(vs) >= 2:
                bad.append(g)
        for c in children(g):
            scan(c)

    scan(f)
    return bad


# ------------------------------------------------------------------- down(P)


class DownResult:
    """Propagatable weakening of a thread postcondition."""

    def __init__(self, formula: Formula, fresh: list, notes: list):
        self.formula = formula
        self.fresh = fresh  # fresh boolean names, existentially bound
        self.notes = notes  # which subformulas were replaced


def down(f: Formula) -> DownResult:
    """The controlling-thread consequence of a thread-local postcondition:

    final-state atoms and global modalities survive, local history survives
    only where single-location coherence guarantees it, and anything else
    becomes an unconstrained fresh boolean."""
    fresh: list = []
    notes: list = []
    counter = [0]

    def fresh_sym(g: Formula) -> Formula:
        counter[0] += 1
        name = f"Down{counter[0]}"
        fresh.append(name)
        notes.append(f"{name} replaces {render(g)}")
        return LogVar(name)

    def single_var(g: Formula) -> bool:
        return len(free_vars(g)) <= 1

    def go(g: Formula, pos: bool) -> Formula:
        if isinstance(g, (Const, Var, Reg, LogVar, Cv, Sat, Co, Cmp, Bin, Neg, TupleLit)):
            return g
        if isinstance(g, Not):
            return Not(go(g.a, not pos))
        if isinstance(g, Imp):
            return Imp(go(g.a, not pos), go(g.b, pos))
        if isinstance(g, Iff):
            # P <=> Q as (P => Q) & (Q => P)
            return go(And((Imp(g.a, g.b), Imp(g.b, g.a))), pos)
        if isinstance(g, (And, Or, Quant)):
            kids = tuple(go(c, pos) for c in children(g))
            return rebuild(g, kids)
        if isinstance(g, Modal):
            if g.accent is not None:
                return fresh_sym(g)
            if g.op in ("U", "sofar", "fandw"):
                return g  # thread-independent
            if g.op == "B":
                if pos:
                    return go(g.body, pos)
                return fresh_sym(g)
            if g.op == "ouat":
                if not pos:
                    return fresh_sym(g)
                if single_var(g.body):
                    return g
                if isinstance(g.body, And):
                    return conj([go(Modal("ouat", c), pos) for c in g.body.args])
                return fresh_sym(g)
        if isinstance(g, Since):
            if g.accent is None and pos:
                return conj([go(g.a, pos), go(Modal("ouat", g.b), pos)])
            return fresh_sym(g)
        if isinstance(g, At):
            raise ValueError("down applies to thread-local postconditions")
        raise TypeError(f"down: unhandled node {g!r}")

    body = go(canon(f), True)
    return DownResult(body, fresh, notes)
