"""Name classification per the surface grammar.

Registers start with "r" (auxiliary registers "raux"), auxiliary variables
with "aux", logical variables with an upper-case letter; anything else
lower-case is a shared variable.
"""

from __future__ import annotations

KEYWORDS = {
    "guar", "rely", "thread", "end", "if", "then", "else", "fi",
    "while", "do", "od", "until", "skip", "assert", "macro",
    "true", "false", "since", "exists", "forall", "sofar", "ouat",
    "cv", "sat",
}


def is_reg_name(n: str) -> bool:
    return n.startswith("r")


def is_auxreg_name(n: str) -> bool:
    return n.startswith("raux")


def is_auxvar_name(n: str) -> bool:
    return n.startswith("aux")


def is_aux_name(n: str) -> bool:
    return is_auxreg_name(n) or is_auxvar_name(n)


def is_logical_name(n: str) -> bool:
    return n[0].isupper()


def classify(n: str) -> str:
    """One of reg, auxreg, var, auxvar, logical."""
    if n[0].isupper():
        return "logical"
    if n.startswith("raux"):
        return "auxreg"
    if n.startswith("r"):
        return "reg"
    if n.startswith("aux"):
        return "auxvar"
    return "var"
