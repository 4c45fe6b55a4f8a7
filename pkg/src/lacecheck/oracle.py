"""Brute-force semantic oracle over tiny threads x instants grids.

Models are enumerated exhaustively and the embedding semantics evaluated
directly, vectorized over the model axis with numpy.  The oracle gates the
solver pipeline in tests; it never produces production verdicts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .embedding import EmbedError, SymbolTable
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
    Since,
    TupleLit,
    Var,
    render,
    walk,
)

MODEL_CAP = 10_000_000


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class Bounds:
    tn: int = 2
    n_instants: int = 3  # himin .. now inclusive, consecutive
    dom: int = 2  # values 0 .. dom-1
    now: int = 0

    @property
    def himin(self) -> int:
        return self.now - (self.n_instants - 1)

    def instants(self):
        return range(self.himin, self.now + 1)


def _strict_relations(dom: int):
    """All irreflexive, transitive, antisymmetric relations on 0..dom-1."""
    pairs = [(a, b) for a in range(dom) for b in range(dom) if a != b]
    rels = []
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = {p for p, on in zip(pairs, bits) if on}
        if any((b, a) in rel for (a, b) in rel):
            continue
        ok = True
        for (a, b) in rel:
            for (c, d) in rel:
                if b == c and (a, d) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            rels.append(rel)
    return rels, pairs


class ModelSpace:
    """Every free symbol of a formula becomes an enumeration axis; cell

    values are numpy arrays over the flattened model index."""

    def __init__(self, f: Formula, bounds: Bounds, st: SymbolTable | None = None):
        self.b = bounds
        self.st = st or SymbolTable()
        self.dims: list = []  # (key, size)
        self._index: dict = {}
        vars_seen: dict = {}
        regs = set()
        logs = set()
        self.co_vars = set()
        self.need_bev = False
        self.need_hatI = False
        self.need_dhatI = False
        for n in walk(f):
            if isinstance(n, Var):
                vars_seen[n.name] = self.st.width(n.name)
                if n.accent in ("hat", "tilde"):
                    self.need_hatI = True
                if n.accent in ("dhat", "dtilde"):
                    self.need_dhatI = True
            elif isinstance(n, Reg):
                regs.add((n.name, n.thread))
                if n.accent in ("hook", "hook2"):
                    regs.add((n.name + "'", n.thread))
            elif isinstance(n, LogVar):
                logs.add(n.name)
            elif isinstance(n, Modal):
                if n.op in ("B", "U"):
                    self.need_bev = True
                if n.accent in ("hat", "tilde"):
                    self.need_hatI = True
                if n.accent in ("dhat", "dtilde"):
                    self.need_dhatI = True
            elif isinstance(n, Since):
                if n.accent in ("hat", "tilde"):
                    self.need_hatI = True
                if n.accent in ("dhat", "dtilde"):
                    self.need_dhatI = True
            elif isinstance(n, Co):
                self.co_vars.add(n.var)
        if (self.need_hatI or self.need_dhatI) and bounds.n_instants < 3:
            raise OracleError("accented formulas need at least 3 instants")
        bound_logs = set()
        for n in walk(f):
            if isinstance(n, Quant):
                bound_logs |= set(n.names)
        logs -= bound_logs
        for v in sorted(vars_seen):
            for comp in range(vars_seen[v]):
                for t in range(bounds.tn):
                    for i in bounds.instants():
                        self.dims.append((("val", v, comp, t, i), bounds.dom))
        for r, th in sorted(regs, key=str):
            self.dims.append((("reg", r, th), bounds.dom))
        for l in sorted(logs):
            size = 2 if self.st.logsort(l) == "Bool" else bounds.dom
            self.dims.append((("log", l), size))
        if self.need_bev:
            for i in bounds.instants():
                if i != bounds.himin:
                    self.dims.append((("bev", i), 2))
        if self.need_hatI:
            self.dims.append((("hatI",), bounds.n_instants - 2))
        if self.need_dhatI:
            self.dims.append((("dhatI",), bounds.n_instants - 2))
        self.rels, self.rel_pairs = (None, None)
        if self.co_vars:
            self.rels, self.rel_pairs = _strict_relations(bounds.dom)
            for v in sorted(self.co_vars):
                self.dims.append((("co", v), len(self.rels)))
        self.size = 1
        for _, s in self.dims:
            self.size *= s
            if self.size > MODEL_CAP:
                raise OracleError(f"model space exceeds cap ({self.size})")
        self.idx = np.arange(self.size, dtype=np.int64)
        stride = 1
        self.cells: dict = {}
        for key, s in self.dims:
            self.cells[key] = (self.idx // stride) % s
            stride *= s

    def cell(self, key):
        try:
            return self.cells[key]
        except KeyError:
            # unconstrained symbol: behaves as 0 everywhere
            return np.zeros(self.size, dtype=np.int64)

    def val(self, v, comp, t, i):
        return self.cell(("val", v, comp, t, i))

    def bev(self, i):
        if i == self.b.himin:
            return np.ones(self.size, dtype=bool)
        if ("bev", i) in self.cells:
            return self.cells[("bev", i)].astype(bool)
        return np.ones(self.size, dtype=bool)

    def hatI(self):
        return self.b.himin + 1 + self.cells[("hatI",)]

    def dhatI(self):
        return self.b.himin + 1 + self.cells[("dhatI",)]

    def co(self, v, a, b):
        """Truth array of co_v(a, b) for value arrays a, b."""
        choice = self.cells[("co", v)]
        out = np.zeros(self.size, dtype=bool)
        for ridx, rel in enumerate(self.rels):
            mask = choice == ridx
            if not mask.any():
                continue
            hit = np.zeros(self.size, dtype=bool)
            for (x, y) in rel:
                hit |= (a == x) & (b == y)
            out |= mask & hit
        return out

    def admissible(self) -> np.ndarray:
        """Models whose co relations include everything observed."""
        ok = np.ones(self.size, dtype=bool)
        for v in sorted(self.co_vars):
            if self.st.width(v) != 1:
                continue
            choice = self.cells.get(("co", v))
            observed = {}
            for (a, b) in self.rel_pairs:
                obs = np.zeros(self.size, dtype=bool)
                for t in range(self.b.tn):
                    hi = self.b.now if t == 0 else min(self.b.now, 0)
                    insts = [i for i in self.b.instants() if i <= hi]
                    for ii in range(len(insts)):
                        for jj in range(ii + 1, len(insts)):
                            va = self.val(v, 0, t, insts[ii])
                            vb = self.val(v, 0, t, insts[jj])
                            obs |= (va == a) & (vb == b)
                observed[(a, b)] = obs
            for ridx, rel in enumerate(self.rels):
                mask = choice == ridx
                if not mask.any():
                    continue
                for (a, b) in self.rel_pairs:
                    if (a, b) not in rel:
                        ok &= ~(mask & observed[(a, b)])
        return ok


def _hooked_instant(b: Bounds) -> int:
    if b.now != 1:
        raise OracleError("hooked occurrence in a now=0 grid")
    return 0


def _viewpoint(accent, ms: ModelSpace, T, I):
    """Concrete or per-model (thread, instant) of an accented occurrence."""
    b = ms.b
    if accent is None:
        return T, I
    if accent == "hook":
        return 0, _hooked_instant(b)
    if accent == "hook2":
        raise OracleError("nested priming not supported")
    if accent in ("hat", "tilde"):
        return 1, ms.hatI()
    if accent in ("dhat", "dtilde"):
        return 2, ms.dhatI()
    raise OracleError(f"accent {accent}")


def _sel(arr_by_instant, i):
    """arr_by_instant: callable instant -> array; i may be scalar or array."""
    if np.isscalar(i) or isinstance(i, int):
        return arr_by_instant(int(i))
    out = None
    for inst in np.unique(i):
        a = arr_by_instant(int(inst))
        if out is None:
            out = np.array(a, copy=True)
        m = i == inst
        out[m] = a[m]
    return out


def eval_term(e: Formula, ms: ModelSpace, env: dict, T: int, I):
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return np.full(ms.size, e.value, dtype=bool)
        return np.full(ms.size, int(e.value), dtype=np.int64)
    if isinstance(e, Var):
        t, i = _viewpoint(e.accent, ms, T, I)
        return _sel(lambda inst: ms.val(e.name, 0, t, inst), i)
    if isinstance(e, Reg):
        name = e.name + ("'" if e.accent in ("hook", "hook2") else "")
        arr = ms.cell(("reg", name, e.thread))
        if ms.st.regsort(e.name) == "Bool":
            return arr.astype(bool)
        return arr
    if isinstance(e, LogVar):
        if e.name in env:
            v = env[e.name]
            if isinstance(v, bool):
                return np.full(ms.size, v, dtype=bool)
            return np.full(ms.size, v, dtype=np.int64)
        arr = ms.cell(("log", e.name))
        if ms.st.logsort(e.name) == "Bool":
            return arr.astype(bool)
        return arr
    if isinstance(e, Bin):
        a, b = eval_term(e.a, ms, env, T, I), eval_term(e.b, ms, env, T, I)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "%":
            return np.mod(a, b)
    if isinstance(e, Neg):
        return -eval_term(e.a, ms, env, T, I)
    raise OracleError(f"not a term: {render(e)}")


def _proj_term(e: Formula, k: int, ms: ModelSpace, env, T, I):
    if isinstance(e, Var):
        t, i = _viewpoint(e.accent, ms, T, I)
        return _sel(lambda inst: ms.val(e.name, k, t, inst), i)
    if isinstance(e, TupleLit):
        return eval_term(e.items[k], ms, env, T, I)
    if k == 0:
        return eval_term(e, ms, env, T, I)
    raise OracleError(f"component of non-tuple {render(e)}")


def evaluate(f: Formula, ms: ModelSpace, env: dict, T: int, I) -> np.ndarray:
    """[f]^T_I as a boolean array over the model axis."""
    b = ms.b
    if isinstance(f, Const):
        return np.full(ms.size, bool(f.value), dtype=bool)
    if isinstance(f, (Var, Reg, LogVar)):
        return eval_term(f, ms, env, T, I).astype(bool)
    if isinstance(f, Cmp):
        wa = ms.st.width(f.a.name) if isinstance(f.a, Var) else (
            len(f.a.items) if isinstance(f.a, TupleLit) else 1)
        wb = ms.st.width(f.b.name) if isinstance(f.b, Var) else (
            len(f.b.items) if isinstance(f.b, TupleLit) else 1)
        w = max(wa, wb)
        if w > 1:
            eq = np.ones(ms.size, dtype=bool)
            for k in range(w):
                eq &= _proj_term(f.a, k, ms, env, T, I) == _proj_term(
                    f.b, k, ms, env, T, I
                )
            return eq if f.op == "=" else ~eq
        a = eval_term(f.a, ms, env, T, I)
        c = eval_term(f.b, ms, env, T, I)
        if f.op == "=":
            return a == c
        if f.op == "!=":
            return a != c
        if f.op == "<":
            return a < c
        if f.op == "<=":
            return a <= c
        if f.op == ">":
            return a > c
        if f.op == ">=":
            return a >= c
    if isinstance(f, ReadEq):
        out = np.ones(ms.size, dtype=bool)
        for k, r in enumerate(f.regs):
            if r is None:
                continue
            out &= eval_term(r, ms, env, T, I) == _proj_term(f.var, k, ms, env, T, I)
        return out
    if isinstance(f, Not):
        return ~evaluate(f.a, ms, env, T, I)
    if isinstance(f, And):
        out = np.ones(ms.size, dtype=bool)
        for c in f.args:
            out &= evaluate(c, ms, env, T, I)
        return out
    if isinstance(f, Or):
        out = np.zeros(ms.size, dtype=bool)
        for c in f.args:
            out |= evaluate(c, ms, env, T, I)
        return out
    if isinstance(f, Imp):
        return ~evaluate(f.a, ms, env, T, I) | evaluate(f.b, ms, env, T, I)
    if isinstance(f, Iff):
        return evaluate(f.a, ms, env, T, I) == evaluate(f.b, ms, env, T, I)
    if isinstance(f, Quant):
        doms = []
        for n in f.names:
            if ms.st.logsort(n) == "Bool":
                doms.append([False, True])
            else:
                doms.append(range(b.dom))
        acc = None
        for combo in itertools.product(*doms):
            e2 = dict(env)
            e2.update(zip(f.names, combo))
            v = evaluate(f.body, ms, e2, T, I)
            if acc is None:
                acc = v.copy()
            elif f.kind == "exists":
                acc |= v
            else:
                acc &= v
        return acc if acc is not None else np.ones(ms.size, dtype=bool)
    if isinstance(f, At):
        if I != 0:
            raise OracleError("@@ outside instant 0")
        return evaluate(f.body, ms, env, f.thread, 0)
    if isinstance(f, Co):
        a = eval_term(f.a, ms, env, T, I)
        c = eval_term(f.b, ms, env, T, I)
        return ms.co(f.var, a, c)
    if isinstance(f, Cv):
        on = f.var in ms.co_vars or f.var in ms.st.coherence_vars
        return np.full(ms.size, on, dtype=bool)
    if isinstance(f, Since):
        t, i = _node_view(f.accent, ms, T, I)
        return _eval_since(f.a, f.b, ms, env, t, i)
    if isinstance(f, Modal):
        t, i = _node_view(f.accent, ms, T, I)
        if f.op == "B":
            return _eval_since(f.body, None, ms, env, t, i)
        if f.op == "U":
            return _eval_since(Modal("fandw", f.body), None, ms, env, t, i)
        if f.op == "sofar":
            return _inst_fold(
                ms, i,
                lambda j: evaluate(Modal("fandw", f.body), ms, env, t, j),
                all_of=True,
            )
        if f.op == "ouat":
            return _inst_fold(
                ms, i, lambda j: evaluate(f.body, ms, env, t, j), all_of=False
            )
        if f.op == "fandw":
            return _eval_fandw(f.body, ms, env, t, i)
    raise OracleError(f"cannot evaluate {render(f)}")


def _node_view(accent, ms: ModelSpace, T, I):
    if accent is None:
        return T, I
    if accent == "hook":
        return 0, _hooked_instant(ms.b)
    if accent in ("hat", "tilde"):
        return 1, ms.hatI()
    if accent in ("dhat", "dtilde"):
        return 2, ms.dhatI()
    raise OracleError(f"accent {accent}")


def _inst_fold(ms: ModelSpace, I, per_instant, all_of: bool):
    """forall/exists j in [himin, I]: per_instant(j)."""
    b = ms.b
    if all_of:
        acc = np.ones(ms.size, dtype=bool)
    else:
        acc = np.zeros(ms.size, dtype=bool)
    for j in b.instants():
        in_range = (
            np.full(ms.size, j <= I, dtype=bool)
            if np.isscalar(I) or isinstance(I, int)
            else (j <= I)
        )
        v = per_instant(j)
        if all_of:
            acc &= ~in_range | v
        else:
            acc |= in_range & v
    return acc


def _eval_since(p, q, ms: ModelSpace, env, T, I):
    """exists j in [himin, I]: q@j and forall k in [j, I]: p@k.

    q=None means the boundary event bev."""
    b = ms.b
    out = np.zeros(ms.size, dtype=bool)
    scalar_I = np.isscalar(I) or isinstance(I, int)
    for j in b.instants():
        in_range = (
            np.full(ms.size, j <= I, dtype=bool) if scalar_I else (j <= I)
        )
        qv = ms.bev(j) if q is None else evaluate(q, ms, env, T, j)
        hold = np.ones(ms.size, dtype=bool)
        for k in b.instants():
            if k < j:
                continue
            k_in = (
                np.full(ms.size, k <= I, dtype=bool) if scalar_I else (k <= I)
            )
            pv = evaluate(p, ms, env, T, k)
            hold &= ~k_in | pv
        out |= in_range & qv & hold
    return out


def _eval_fandw(p, ms: ModelSpace, env, T, I):
    b = ms.b
    glob = np.ones(ms.size, dtype=bool)
    for t in range(b.tn):
        glob &= evaluate(p, ms, env, t, I)
    if b.now != 1 or T != 0:
        return glob
    if np.isscalar(I) or isinstance(I, int):
        if int(I) == 1:
            return evaluate(p, ms, env, 0, 1)
        return glob
    loc = evaluate(p, ms, env, 0, 1)
    return np.where(I == 1, loc, glob)


def check_validity(f: Formula, bounds: Bounds, st: SymbolTable | None = None):
    """(True, None) if f holds in every admissible model; else a countermodel."""
    ms = ModelSpace(f, bounds, st)
    ok = evaluate(f, ms, {}, 0, bounds.now)
    adm = ms.admissible() if ms.co_vars else np.ones(ms.size, dtype=bool)
    bad = adm & ~ok
    if not bad.any():
        return True, None
    return False, render_model(ms, int(np.argmax(bad)))


def render_model(ms: ModelSpace, m: int) -> str:
    """One model as a thread x instant table."""
    b = ms.b
    lines = [f"model #{m}: tn={b.tn} instants {b.himin}..{b.now} dom={b.dom}"]
    names = sorted({k[1] for k in ms.cells if k[0] == "val"})
    for v in names:
        comps = sorted({k[2] for k in ms.cells if k[0] == "val" and k[1] == v})
        for c in comps:
            tag = v if len(comps) == 1 else f"{v}#{c}"
            for t in range(b.tn):
                row = [int(ms.val(v, c, t, i)[m]) for i in b.instants()]
                lines.append(f"  {tag}[t{t}] = {row}")
    if ms.need_bev:
        lines.append(f"  bev = {[bool(ms.bev(i)[m]) for i in b.instants()]}")
    if ms.need_hatI:
        lines.append(f"  hatI = {int(ms.hatI()[m])}")
    if ms.need_dhatI:
        lines.append(f"  dhatI = {int(ms.dhatI()[m])}")
    for key in ms.cells:
        if key[0] == "reg":
            lines.append(f"  {key[1]} = {int(ms.cells[key][m])}")
        elif key[0] == "log":
            lines.append(f"  {key[1]} = {int(ms.cells[key][m])}")
        elif key[0] == "co":
            lines.append(f"  co_{key[1]} = {sorted(ms.rels[int(ms.cells[key][m])])}")
    return "\n".join(lines)
