"""Program AST: laced programs, threads, commands, knots and interference."""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import Formula, render

ORDERINGS = ("lo", "bo", "uo", "go")
ORD_RANK = {"lo": 1, "bo": 2, "uo": 3}  # go does not compose


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True, slots=True)
class Stitch:
    source: str  # label, or label_t/label_f via `arm`
    arm: str | None  # None | "t" | "f"
    ordering: str
    sourcepost: Formula | None  # display hint, ignored semantically
    assertion: Formula
    span: Span | None = None

    @property
    def source_ref(self) -> str:
        return self.source + (f"_{self.arm}" if self.arm else "")

    def __str__(self) -> str:
        return f"{self.source_ref} {self.ordering}: {render(self.assertion)}"


@dataclass(frozen=True, slots=True)
class SimpleKnot:
    stitches: tuple  # of Stitch


@dataclass(frozen=True, slots=True)
class Knot:
    """Disjunction tree flattened to its simple knots; `iterated_from`

    marks the boundary of a `|>`: disjuncts at index >= iterated_from are
    the loop-back knots."""

    disjuncts: tuple  # of SimpleKnot
    iterated_from: int | None = None

    @property
    def is_empty(self) -> bool:
        return len(self.disjuncts) == 1 and not self.disjuncts[0].stitches

    def stitches(self):
        for d in self.disjuncts:
            yield from d.stitches


EMPTY_KNOT = Knot((SimpleKnot(()),))


@dataclass(frozen=True, slots=True)
class Assign:
    kind: str  # write | read | calc
    lhs: tuple  # names; "_" allowed in extended reads
    rhs: tuple  # Formula expressions; for read, a single Var

    def __str__(self) -> str:
        return f"{', '.join(self.lhs)} := {', '.join(render(e) for e in self.rhs)}"

    @property
    def assigned_vars(self) -> tuple:
        if self.kind == "write":
            return self.lhs
        return ()

    @property
    def is_aux_only(self) -> bool:
        from .names import is_aux_name

        return all(is_aux_name(n) for n in self.lhs if n != "_")


@dataclass(frozen=True, slots=True)
class Command:
    label: str
    knot: Knot
    intfpre: Formula | None
    payload: object  # Assign | Skip | AssertCmd
    sc_pre: Formula | None = None  # SC-notation precondition
    span: Span | None = None


@dataclass(frozen=True, slots=True)
class Skip:
    def __str__(self) -> str:
        return "skip"


@dataclass(frozen=True, slots=True)
class AssertCmd:
    assertion: Formula

    def __str__(self) -> str:
        return f"assert {render(self.assertion)}"


@dataclass(frozen=True, slots=True)
class If:
    label: str
    knot: Knot
    cond: Formula
    then: tuple
    els: tuple  # empty for one-armed if
    sc_pre: Formula | None = None
    span: Span | None = None


@dataclass(frozen=True, slots=True)
class While:
    label: str
    knot: Knot
    cond: Formula
    body: tuple
    sc_pre: Formula | None = None
    span: Span | None = None


@dataclass(frozen=True, slots=True)
class DoUntil:
    label: str
    knot: Knot
    cond: Formula
    body: tuple
    sc_pre: Formula | None = None
    span: Span | None = None


@dataclass(frozen=True, slots=True)
class Interference:
    bound: tuple  # quotiented logical names
    pre: Formula
    lhs: tuple  # assigned variable names
    rhs: tuple  # expressions

    def __str__(self) -> str:
        b = f"[{', '.join(self.bound)}]. " if self.bound else ""
        return (
            f"{b}{render(self.pre)} | "
            f"{', '.join(self.lhs)} := {', '.join(render(e) for e in self.rhs)}"
        )

    def assign(self) -> Assign:
        return Assign("write", self.lhs, self.rhs)


@dataclass(frozen=True, slots=True)
class Thread:
    index: int
    guarantee: tuple  # of Interference
    body: tuple  # of Command/If/While/DoUntil
    threadpost: Knot | None
    sc_post: Formula | None
    rely: tuple | None  # of Interference, None when implicit


@dataclass
class LacedProgram:
    init_label: str
    init: Formula
    threads: list
    final_label: str | None
    final: Formula | None
    source_map: dict = field(default_factory=dict)  # label -> Span (thread-qualified)

    @property
    def is_sc(self) -> bool:
        for t in self.threads:
            for c in iter_components(t.body):
                if getattr(c, "sc_pre", None) is not None:
                    return True
            if t.sc_post is not None:
                return True
        return False


def iter_components(body):
    """Every labelled component in a body, depth first."""
    for c in body:
        yield c
        if isinstance(c, If):
            yield from iter_components(c.then)
            yield from iter_components(c.els)
        elif isinstance(c, (While, DoUntil)):
            yield from iter_components(c.body)


def thread_labels(t: Thread) -> dict:
    return {c.label: c for c in iter_components(t.body)}


def compose_orderings(a: str, b: str) -> str:
    """Orderings along a constraint chain compose to the strongest."""
    if a == "go" or b == "go":
        raise ValueError("go does not compose")
    return a if ORD_RANK[a] >= ORD_RANK[b] else b


# ------------------------------------------------------------ pretty printer


def render_knot(k: Knot) -> str:
    parts = []
    for i, d in enumerate(k.disjuncts):
        inner = "; ".join(_render_stitch(s) for s in d.stitches)
        s = "{* " + inner + " *}" if inner else "{* *}"
        if i == 0:
            parts.append(s)
        elif k.iterated_from is not None and i == k.iterated_from:
            parts.append("|> " + s)
        else:
            parts.append("| " + s)
    return " ".join(parts)


def _render_stitch(s: Stitch) -> str:
    post = f" {{{render(s.sourcepost)}}}" if s.sourcepost is not None else ""
    return f"{s.source_ref} {s.ordering}{post}: {render(s.assertion)}"


def _render_payload(p) -> str:
    return str(p)


def _render_cmds(body, indent: str) -> list:
    out = []
    for c in body:
        if isinstance(c, Command):
            pre = ""
            if c.sc_pre is not None:
                pre = "{ " + render(c.sc_pre) + " } "
            elif not c.knot.is_empty:
                pre = render_knot(c.knot) + " "
            ip = f"[* {render(c.intfpre)} *] " if c.intfpre is not None else ""
            out.append(f"{indent}{pre}{ip}{c.label}: {_render_payload(c.payload)};")
        elif isinstance(c, If):
            head = _struct_head(c)
            out.append(f"{indent}if {head} then")
            out.extend(_render_cmds(c.then, indent + "  "))
            if c.els:
                out.append(f"{indent}else")
                out.extend(_render_cmds(c.els, indent + "  "))
            out.append(f"{indent}fi;")
        elif isinstance(c, While):
            out.append(f"{indent}while {_struct_head(c)} do")
            out.extend(_render_cmds(c.body, indent + "  "))
            out.append(f"{indent}od;")
        elif isinstance(c, DoUntil):
            out.append(f"{indent}do")
            out.extend(_render_cmds(c.body, indent + "  "))
            out.append(f"{indent}until {_struct_head(c)};")
    return out


def _struct_head(c) -> str:
    pre = ""
    if c.sc_pre is not None:
        pre = "{ " + render(c.sc_pre) + " } "
    elif not c.knot.is_empty:
        pre = render_knot(c.knot) + " "
    return f"{pre}{c.label}: {render(c.cond)}"


def render_program(p: LacedProgram) -> str:
    lines = [f"{{ {p.init_label}: {render(p.init)} }}", ""]
    for t in p.threads:
        lines.append(f"thread {t.index}")
        g = "; ".join(str(i) for i in t.guarantee)
        lines.append(f"  guar [ {g} ]" if g else "  guar [ ]")
        lines.extend(_render_cmds(t.body, "  "))
        if t.threadpost is not None:
            lines.append("  " + render_knot(t.threadpost))
        if t.sc_post is not None:
            lines.append("  { " + render(t.sc_post) + " }")
        if t.rely is not None:
            r = "; ".join(str(i) for i in t.rely)
            lines.append(f"  rely [ {r} ]" if r else "  rely [ ]")
        lines.append("end")
        lines.append("")
    if p.final is not None:
        lines.append(f"{{ {p.final_label}: {render(p.final)} }}")
    return "\n".join(lines) + "\n"
