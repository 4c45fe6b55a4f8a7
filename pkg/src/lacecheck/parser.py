"""Parser for laced-program source text.

One program per file.  Knot brackets are {* *}, interference-precondition
brackets [* *], comments run from # to end of line.  Macros are textual,
expanded on the token stream before anything is classified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    Quant,
    Reg,
    Sat,
    Since,
    TupleLit,
    Var,
    conj,
    disj,
)
from .program import (
    EMPTY_KNOT,
    Assign,
    AssertCmd,
    Command,
    DoUntil,
    If,
    Interference,
    Knot,
    LacedProgram,
    ORDERINGS,
    SimpleKnot,
    Skip,
    Span,
    Stitch,
    Thread,
    While,
    iter_components,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    kind: str  # NAME INT PUNCT EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<punct>\{\*|\*\}|\[\*|\*\]|\|>|:=|<=>|=>|!=|<=|>=|@@|\|\||[{}()\[\],;:|&!<>=+\-*%._])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    toks, line, col, i = [], 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        s = m.group(0)
        kind = m.lastgroup
        if kind == "ws" or kind == "comment":
            pass
        elif kind == "int":
            toks.append(Tok("INT", s, line, col))
        elif kind == "name":
            toks.append(Tok("NAME", s, line, col))
        else:
            toks.append(Tok("PUNCT", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    toks.append(Tok("EOF", "", line, col))
    return toks


# ----------------------------------------------------------------- macros

_MACRO_RE = re.compile(r"^[ \t]*macro[ \t]+(\w+)(\(([\w, \t]*)\))?[ \t]*=(.*)$")


def strip_macros(text: str):
    """Pull macro definitions out of the source; bodies run to end of line,

    with backslash continuation."""
    macros = {}
    out_lines = []
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        m = _MACRO_RE.match(lines[i])
        if m and not lines[i].lstrip().startswith("#"):
            name = m.group(1)
            params = tuple(
                p.strip() for p in (m.group(3) or "").split(",") if p.strip()
            )
            body = m.group(4)
            blanks = 1
            while body.rstrip().endswith("\\"):
                body = body.rstrip()[:-1] + " " + lines[i + blanks]
                blanks += 1
            macros[name] = (params, body)
            for _ in range(blanks):
                out_lines.append("")
            i += blanks
        else:
            out_lines.append(lines[i])
            i += 1
    return macros, "\n".join(out_lines)


def expand_macros(toks: list, macros: dict, depth: int = 0) -> list:
    if not macros:
        return toks
    if depth > 20:
        raise ParseError("macro expansion too deep (cycle?)")
    out: list = []
    changed = False
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.kind == "NAME" and t.text in macros:
            params, body = macros[t.text]
            args: list = []
            j = i + 1
            if params:
                if j >= len(toks) or toks[j].text != "(":
                    raise ParseError(
                        f"macro {t.text} expects arguments", t.line, t.col
                    )
                j += 1
                depth_p, cur = 0, []
                while True:
                    tj = toks[j]
                    if tj.kind == "EOF":
                        raise ParseError("unterminated macro call", t.line, t.col)
                    if tj.text == "(" :
                        depth_p += 1
                    elif tj.text == ")":
                        if depth_p == 0:
                            args.append(cur)
                            break
                        depth_p -= 1
                    elif tj.text == "," and depth_p == 0:
                        args.append(cur)
                        cur = []
                        j += 1
                        continue
                    cur.append(tj)
                    j += 1
                j += 1
                if len(args) != len(params):
                    raise ParseError(
                        f"macro {t.text} expects {len(params)} args", t.line, t.col
                    )
            body_toks = tokenize(body)[:-1]
            sub = {p: a for p, a in zip(params, args)}
            for bt in body_toks:
                if bt.kind == "NAME" and bt.text in sub:
                    out.extend(
                        Tok(a.kind, a.text, t.line, t.col) for a in sub[bt.text]
                    )
                else:
                    out.append(Tok(bt.kind, bt.text, t.line, t.col))
            changed = True
            i = j if params else i + 1
        else:
            out.append(t)
            i += 1
    if changed:
        return expand_macros(out, macros, depth + 1)
    return out


# ------------------------------------------------------------ assertion parser


class _P:
    def __init__(self, toks: list, pos: int = 0):
        self.toks = toks
        self.pos = pos

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def error(self, msg: str):
        t = self.peek()
        raise ParseError(msg + f" (at {t.text!r})", t.line, t.col)


CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


def _parse_assertion(p: _P) -> Formula:
    return _parse_iff(p)


def _parse_iff(p: _P) -> Formula:
    a = _parse_imp(p)
    while p.at("<=>"):
        p.next()
        a = Iff(a, _parse_imp(p))
    return a


def _parse_imp(p: _P) -> Formula:
    a = _parse_since(p)
    if p.at("=>"):
        p.next()
        return Imp(a, _parse_imp(p))
    return a


def _parse_since(p: _P) -> Formula:
    a = _parse_or(p)
    while p.peek().text == "since":
        p.next()
        a = Since(a, _parse_or(p))
    return a


def _parse_or(p: _P) -> Formula:
    a = _parse_and(p)
    parts = [a]
    while p.at("|"):
        p.next()
        parts.append(_parse_and(p))
    return disj(parts) if len(parts) > 1 else a


def _parse_and(p: _P) -> Formula:
    a = _parse_not(p)
    parts = [a]
    while p.at("&"):
        p.next()
        parts.append(_parse_not(p))
    return conj(parts) if len(parts) > 1 else a


def _parse_not(p: _P) -> Formula:
    if p.at("!"):
        p.next()
        return Not(_parse_not(p))
    return _parse_cmp(p)


def _parse_cmp(p: _P) -> Formula:
    a = _parse_sum(p)
    if p.peek().text not in CMP_OPS:
        return a
    terms = [a]
    ops = []
    while p.peek().text in CMP_OPS:
        ops.append(p.next().text)
        terms.append(_parse_sum(p))
    pairs = [Cmp(op, x, y) for op, x, y in zip(ops, terms, terms[1:])]
    return conj(pairs) if len(pairs) > 1 else pairs[0]


def _parse_sum(p: _P) -> Formula:
    a = _parse_term(p)
    while p.peek().text in ("+", "-"):
        op = p.next().text
        a = Bin(op, a, _parse_term(p))
    return a


def _parse_term(p: _P) -> Formula:
    a = _parse_unary(p)
    while p.peek().text in ("*", "%"):
        op = p.next().text
        a = Bin(op, a, _parse_unary(p))
    return a


def _parse_unary(p: _P) -> Formula:
    if p.at("-"):
        p.next()
        return Neg(_parse_unary(p))
    return _parse_postfix(p)


def _parse_postfix(p: _P) -> Formula:
    a = _parse_primary(p)
    while p.at("@@"):
        p.next()
        t = p.peek()
        if t.kind != "INT":
            p.error("thread index expected after @@")
        p.next()
        a = At(a, int(t.text))
    return a


def _name_atom(name: str, tok: Tok) -> Formula:
    kind = names.classify(name)
    if kind == "logical":
        return LogVar(name)
    if kind in ("reg", "auxreg"):
        return Reg(name)
    return Var(name)


def _parse_primary(p: _P) -> Formula:
    t = p.peek()
    if t.text == "(":
        p.next()
        first = _parse_assertion(p)
        if p.at(","):
            items = [first]
            while p.at(","):
                p.next()
                items.append(_parse_assertion(p))
            p.expect(")")
            return TupleLit(tuple(items))
        p.expect(")")
        return first
    if t.kind == "INT":
        p.next()
        return Const(int(t.text))
    if t.kind != "NAME":
        p.error("expression expected")
    name = t.text
    if name == "true":
        p.next()
        return Const(True)
    if name == "false":
        p.next()
        return Const(False)
    if name in ("exists", "forall"):
        p.next()
        qnames = [p.next().text]
        while p.at(","):
            p.next()
            qnames.append(p.next().text)
        for n in qnames:
            if not names.is_logical_name(n):
                raise ParseError(f"bound name {n} must be logical (upper-case)",
                                 t.line, t.col)
        p.expect("(")
        body = _parse_assertion(p)
        p.expect(")")
        return Quant(name, tuple(qnames), body)
    if name in ("B", "U", "sofar", "ouat") and p.peek(1).text == "(":
        p.next()
        p.expect("(")
        body = _parse_assertion(p)
        p.expect(")")
        op = name
        return Modal(op, body)
    if name == "cv" and p.peek(1).text == "(":
        p.next()
        p.expect("(")
        v = p.next()
        p.expect(")")
        return Cv(v.text)
    if name == "sat" and p.peek(1).text == "(":
        p.next()
        p.expect("(")
        body = _parse_assertion(p)
        p.expect(")")
        return Sat(body)
    if name.endswith("_c") and len(name) > 2 and p.peek(1).text == "(":
        p.next()
        p.expect("(")
        a = _parse_assertion(p)
        p.expect(",")
        b = _parse_assertion(p)
        p.expect(")")
        return Co(name[:-2], a, b)
    p.next()
    return _name_atom(name, t)


def parse_assertion(text: str) -> Formula:
    p = _P(tokenize(text))
    f = _parse_assertion(p)
    if p.peek().kind != "EOF":
        p.error("trailing input after assertion")
    return f


# ------------------------------------------------------------- program parser

_STRUCT_KW = ("if", "while", "do", "until", "then", "else", "fi", "od",
              "end", "rely", "guar", "thread")


class ProgramParser:
    def __init__(self, text: str):
        macros, body = strip_macros(text)
        toks = expand_macros(tokenize(body), macros)
        self.p = _P(toks)
        self.source_map: dict = {}

    # small helpers -----------------------------------------------------

    def _span(self) -> Span:
        t = self.p.peek()
        return Span(t.line, t.col)

    def _label_here(self) -> str | None:
        """A NAME ':' (not ':=') marks a labelled component."""
        t = self.p.peek()
        if t.kind == "NAME" and t.text not in _STRUCT_KW:
            if self.p.peek(1).text == ":":
                return t.text
        return None

    # assertions inside program ----------------------------------------

    def _assertion(self) -> Formula:
        return _parse_assertion(self.p)

    # knots --------------------------------------------------------------

    def _parse_simple_knot(self) -> SimpleKnot:
        self.p.expect("{*")
        stitches = []
        while not self.p.at("*}"):
            stitches.append(self._parse_stitch())
            if self.p.at(";"):
                self.p.next()
        self.p.expect("*}")
        return SimpleKnot(tuple(stitches))

    def _parse_stitch(self) -> Stitch:
        t = self.p.peek()
        span = Span(t.line, t.col)
        ref = self.p.next()
        if ref.kind != "NAME":
            raise ParseError("stitch source label expected", ref.line, ref.col)
        source, arm = ref.text, None
        for suffix in ("_t", "_f"):
            if source.endswith(suffix) and len(source) > 2:
                source, arm = source[: -2], suffix[1]
                break
        ordt = self.p.next()
        if ordt.text not in ORDERINGS:
            raise ParseError(
                f"ordering lo/bo/uo/go expected, found {ordt.text!r}",
                ordt.line, ordt.col,
            )
        sourcepost = None
        if self.p.at("{"):
            self.p.next()
            sourcepost = self._assertion()
            self.p.expect("}")
        self.p.expect(":")
        assertion = self._assertion()
        return Stitch(source, arm, ordt.text, sourcepost, assertion, span)

    def _parse_knot_tree(self) -> Knot:
        def leaf_or_group():
            if self.p.at("("):
                self.p.next()
                k = self._parse_knot_tree()
                self.p.expect(")")
                return k
            return Knot((self._parse_simple_knot(),))

        k = leaf_or_group()
        disjuncts = list(k.disjuncts)
        iterated_from = k.iterated_from
        while self.p.at("|") or self.p.at("|>"):
            op = self.p.next().text
            nxt = leaf_or_group()
            if op == "|>" and iterated_from is None:
                iterated_from = len(disjuncts)
            if nxt.iterated_from is not None and iterated_from is None:
                iterated_from = len(disjuncts) + nxt.iterated_from
            disjuncts.extend(nxt.disjuncts)
        return Knot(tuple(disjuncts), iterated_from)

    def _maybe_knot_or_scpre(self):
        """Returns (knot, intfpre, sc_pre)."""
        knot, intfpre, sc_pre = EMPTY_KNOT, None, None
        if self.p.at("{*") or (
            self.p.at("(") and self._lookahead_knot_group()
        ):
            knot = self._parse_knot_tree()
        elif self.p.at("{"):
            self.p.next()
            sc_pre = self._assertion()
            self.p.expect("}")
        if self.p.at("[*"):
            self.p.next()
            intfpre = self._assertion()
            self.p.expect("*]")
        return knot, intfpre, sc_pre

    def _lookahead_knot_group(self) -> bool:
        return self.p.peek(1).text == "{*"

    # commands ------------------------------------------------------------

    def _parse_seq(self, stop: tuple) -> tuple:
        cmds = []
        while True:
            t = self.p.peek()
            if t.text in stop or t.kind == "EOF":
                break
            # a trailing knot (threadpost) is not a command: caller handles
            if t.text in ("{*", "{", "(") or (t.kind == "NAME") or t.text == "[*":
                before = self.p.pos
                cmd = self._try_parse_command(stop)
                if cmd is None:
                    self.p.pos = before
                    break
                cmds.append(cmd)
                if self.p.at(";"):
                    self.p.next()
            else:
                self.p.error("command expected")
        return tuple(cmds)

    def _try_parse_command(self, stop: tuple):
        t = self.p.peek()
        if t.text == "if":
            return self._parse_if()
        if t.text == "while":
            return self._parse_while()
        if t.text == "do":
            return self._parse_do_until()
        knot, intfpre, sc_pre = self._maybe_knot_or_scpre()
        label = self._label_here()
        if label is None:
            # not a command start: probably the threadpost knot
            if knot is not EMPTY_KNOT or sc_pre is not None:
                return None
            self.p.error("labelled command expected")
        span = self._span()
        self.p.next()  # label
        self.p.expect(":")
        payload = self._parse_payload()
        self.source_map[label] = span
        return Command(label, knot, intfpre, payload, sc_pre, span)

    def _parse_payload(self):
        t = self.p.peek()
        if t.text == "skip":
            self.p.next()
            return Skip()
        if t.text == "assert":
            self.p.next()
            return AssertCmd(self._assertion())
        # assignment: lhs-list := rhs-list
        lhs = [self._lhs_name()]
        while self.p.at(","):
            self.p.next()
            lhs.append(self._lhs_name())
        self.p.expect(":=")
        rhs = [self._assertion()]
        while self.p.at(","):
            self.p.next()
            rhs.append(self._assertion())
        return make_assign(tuple(lhs), tuple(rhs), t)

    def _lhs_name(self) -> str:
        t = self.p.next()
        if t.text == "_":
            return "_"
        if t.kind != "NAME":
            raise ParseError("assignment target expected", t.line, t.col)
        return t.text

    def _parse_control_head(self):
        knot, intfpre, sc_pre = self._maybe_knot_or_scpre()
        if intfpre is not None:
            raise ParseError(
                "interference precondition on a control expression",
                self.p.peek().line, self.p.peek().col,
            )
        label = self._label_here()
        if label is None:
            self.p.error("control-expression label expected")
        span = self._span()
        self.p.next()
        self.p.expect(":")
        cond = self._assertion()
        self.source_map[label] = span
        return label, knot, cond, sc_pre, span

    def _parse_if(self):
        self.p.expect("if")
        label, knot, cond, sc_pre, span = self._parse_control_head()
        self.p.expect("then")
        then = self._parse_seq(("else", "fi"))
        els: tuple = ()
        if self.p.at("else"):
            self.p.next()
            els = self._parse_seq(("fi",))
        self.p.expect("fi")
        return If(label, knot, cond, then, els, sc_pre, span)

    def _parse_while(self):
        self.p.expect("while")
        label, knot, cond, sc_pre, span = self._parse_control_head()
        self.p.expect("do")
        body = self._parse_seq(("od",))
        self.p.expect("od")
        return While(label, knot, cond, body, sc_pre, span)

    def _parse_do_until(self):
        self.p.expect("do")
        body = self._parse_seq(("until",))
        self.p.expect("until")
        label, knot, cond, sc_pre, span = self._parse_control_head()
        return DoUntil(label, knot, cond, body, sc_pre, span)

    # interference --------------------------------------------------------

    def _parse_interferences(self) -> tuple:
        self.p.expect("[")
        out = []
        while not self.p.at("]"):
            out.append(self._parse_interference())
            if self.p.at(";"):
                self.p.next()
        self.p.expect("]")
        return tuple(out)

    def _parse_interference(self) -> Interference:
        bound: tuple = ()
        if self.p.at("["):
            self.p.next()
            bs = [self.p.next().text]
            while self.p.at(","):
                self.p.next()
                bs.append(self.p.next().text)
            self.p.expect("]")
            self.p.expect(".")
            bound = tuple(bs)
        sep = self._find_intf_bar()
        pre_toks = self.p.toks[self.p.pos:sep]
        pre = _parse_assertion(_P(pre_toks + [Tok("EOF", "", 0, 0)]))
        self.p.pos = sep + 1
        lhs = [self._lhs_name()]
        while self.p.at(","):
            self.p.next()
            lhs.append(self._lhs_name())
        self.p.expect(":=")
        rhs = [self._assertion()]
        while self.p.at(","):
            self.p.next()
            rhs.append(self._assertion())
        a = make_assign(tuple(lhs), tuple(rhs), self.p.peek())
        if a.kind != "write":
            t = self.p.peek()
            raise ParseError("interference must assign a variable", t.line, t.col)
        return Interference(bound, pre, a.lhs, a.rhs)

    def _find_intf_bar(self) -> int:
        """Index of the '|' separating the precondition from the assignment:

        the last depth-0 bar followed by a name list and ':='."""
        depth = 0
        cands = []
        i = self.p.pos
        while i < len(self.p.toks):
            t = self.p.toks[i]
            if t.text in ("(", "[", "{", "{*", "[*"):
                depth += 1
            elif t.text in (")", "]", "}", "*}", "*]"):
                if depth == 0:
                    break
                depth -= 1
            elif t.text == ";" and depth == 0:
                break
            elif t.text == "|" and depth == 0:
                j = i + 1
                while (
                    self.p.toks[j].kind == "NAME" or self.p.toks[j].text in (",", "_")
                ):
                    j += 1
                if self.p.toks[j].text == ":=":
                    cands.append(i)
            i += 1
        if not cands:
            t = self.p.peek()
            raise ParseError("malformed interference (no '|' found)", t.line, t.col)
        return cands[-1]

    # program -------------------------------------------------------------

    def _parse_passert(self):
        self.p.expect("{")
        t = self.p.peek()
        label = self.p.next().text
        self.p.expect(":")
        a = self._assertion()
        self.p.expect("}")
        self.source_map[label] = Span(t.line, t.col)
        return label, a

    def _parse_thread(self, expect_index: int) -> Thread:
        self.p.expect("thread")
        t = self.p.peek()
        if t.kind != "INT":
            raise ParseError("thread index expected", t.line, t.col)
        idx = int(self.p.next().text)
        if idx != expect_index:
            raise ParseError(
                f"threads must be numbered in order; expected {expect_index}",
                t.line, t.col,
            )
        guarantee: tuple = ()
        if self.p.at("guar"):
            self.p.next()
            guarantee = self._parse_interferences()
        body = self._parse_seq(("end", "rely"))
        threadpost = None
        sc_post = None
        if self.p.at("{*") or (self.p.at("(") and self._lookahead_knot_group()):
            threadpost = self._parse_knot_tree()
        elif self.p.at("{"):
            self.p.next()
            sc_post = self._assertion()
            self.p.expect("}")
        rely = None
        if self.p.at("rely"):
            self.p.next()
            rely = self._parse_interferences()
        self.p.expect("end")
        return Thread(idx, guarantee, body, threadpost, sc_post, rely)

    def parse(self) -> LacedProgram:
        init_label, init = self._parse_passert()
        threads = []
        while self.p.at("thread"):
            threads.append(self._parse_thread(len(threads)))
        final_label, final = None, None
        if self.p.at("{"):
            final_label, final = self._parse_passert()
        t = self.p.peek()
        if t.kind != "EOF":
            raise ParseError(f"unexpected {t.text!r} after program", t.line, t.col)
        if not threads:
            raise ParseError("program has no threads")
        prog = LacedProgram(init_label, init, threads, final_label, final,
                            self.source_map)
        _validate(prog)
        return prog


def make_assign(lhs: tuple, rhs: tuple, t: Tok) -> Assign:
    """Classify an assignment per the grammar's write/read/calculation."""
    kinds = [names.classify(n) if n != "_" else "_" for n in lhs]
    if kinds[0] in ("var", "auxvar"):
        for k in kinds[1:]:
            if k != "auxvar":
                raise ParseError(
                    "composite write targets must be auxiliary variables",
                    t.line, t.col,
                )
        if len(lhs) > 1 and len(rhs) != len(lhs):
            raise ParseError("composite write arity mismatch", t.line, t.col)
        return Assign("write", lhs, rhs)
    # register target: read or calculation
    for k in kinds[1:]:
        if k not in ("auxreg", "_"):
            raise ParseError(
                "extended read targets must be auxiliary registers or _",
                t.line, t.col,
            )
    if len(rhs) == 1 and isinstance(rhs[0], Var):
        return Assign("read", lhs, rhs)
    if len(lhs) > 1:
        raise ParseError("extended read must read from a variable", t.line, t.col)
    if len(rhs) != 1:
        raise ParseError("calculation takes a single expression", t.line, t.col)
    return Assign("calc", lhs, rhs)


def _validate(prog: LacedProgram):
    from .formulas import walk, Reg as FReg

    for t in prog.threads:
        labels = {}
        controls = {}
        for c in iter_components(t.body):
            if c.label in labels:
                raise ParseError(f"duplicate label {c.label} in thread {t.index}")
            labels[c.label] = c
            if isinstance(c, (If, While, DoUntil)):
                controls[c.label] = c
        if prog.init_label in labels:
            raise ParseError(
                f"label {prog.init_label} shadows the initial assertion"
            )

        def check_knot(k: Knot, where: str):
            for s in k.stitches():
                if s.source == prog.init_label:
                    if s.arm:
                        raise ParseError(
                            f"{where}: init takes no _t/_f arm",
                            *(s.span.line, s.span.col) if s.span else (0, 0),
                        )
                    continue
                tgt = labels.get(s.source)
                if tgt is None:
                    raise ParseError(
                        f"{where}: unresolved stitch source {s.source_ref!r}",
                        *(s.span.line, s.span.col) if s.span else (0, 0),
                    )
                if s.arm and s.source not in controls:
                    raise ParseError(
                        f"{where}: arm {s.source_ref!r} on non-control label",
                        *(s.span.line, s.span.col) if s.span else (0, 0),
                    )
                if not s.arm and s.source in controls:
                    raise ParseError(
                        f"{where}: control-expression source {s.source!r}"
                        " needs a _t/_f arm",
                        *(s.span.line, s.span.col) if s.span else (0, 0),
                    )

        for c in iter_components(t.body):
            check_knot(c.knot, f"thread {t.index}, {c.label}")
            if isinstance(c, Command) and c.intfpre is not None:
                if not isinstance(c.payload, Assign) or c.payload.kind != "write":
                    raise ParseError(
                        f"thread {t.index}, {c.label}: interference"
                        " precondition on a non-assignment"
                    )
            if isinstance(c, (If, While, DoUntil)):
                for n in walk(c.cond):
                    if isinstance(n, Var):
                        raise ParseError(
                            f"thread {t.index}, {c.label}: control expression"
                            f" mentions variable {n.name}"
                        )
            if isinstance(c, Command) and isinstance(c.payload, Assign):
                a = c.payload
                if a.kind in ("write", "calc"):
                    for e in a.rhs:
                        for n in walk(e):
                            if isinstance(n, Var) and not names.is_auxvar_name(n.name):
                                raise ParseError(
                                    f"thread {t.index}, {c.label}: expression"
                                    f" mentions variable {n.name}"
                                )
        if t.threadpost is not None:
            check_knot(t.threadpost, f"thread {t.index}, threadpost")


def parse_program(text: str) -> LacedProgram:
    return ProgramParser(text).parse()
