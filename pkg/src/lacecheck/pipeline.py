"""The checking pipeline: parse, analyse, generate, discharge, report."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .embedding import SymbolTable, build_query, build_sat_query, infer_program_symbols
from .formulas import render
from .obligations import Flags, GenerationError, Obligation, generate
from .parser import ParseError, parse_program
from .report import ObligationRecord, VerificationReport
from .solver import Solver, SolverConfig, SolverUnavailable


class SatUnresolved(Exception):
    pass


def make_sat_resolver(solver: Solver, st: SymbolTable):
    cache: dict = {}

    def resolve(f) -> bool:
        key = render(f)
        if key not in cache:
            q = build_sat_query(f"sat {key}", f, st)
            r = solver.is_satisfiable(q)
            if r is None:
                raise SatUnresolved(f"sat({key}) inconclusive")
            cache[key] = r
        return cache[key]

    return resolve


def discharge_obligations(obs: list, st: SymbolTable, solver: Solver) -> list:
    """ObligationRecords for every obligation, batching the solver work."""
    records: list = [None] * len(obs)
    queries = []
    qidx = []
    for i, ob in enumerate(obs):
        if ob.structural is not None:
            verdict = "valid" if ob.structural == "ok" else "invalid"
            records[i] = ObligationRecord(
                ob.kind, ob.loc.render(), verdict, 0.0, "structural",
                ob.trail if verdict == "valid" else ob.structural,
            )
        elif ob.trivial is not None:
            records[i] = ObligationRecord(
                ob.kind, ob.loc.render(), "valid", 0.0, ob.trivial, ob.trail
            )
        else:
            q = build_query(
                f"{ob.kind} {ob.loc.render()}",
                ob.hypothesis,
                ob.conclusion,
                st,
                pms=ob.pms,
            )
            queries.append(q)
            qidx.append(i)
    if queries:
        verdicts = solver.discharge_many(queries)
        for i, q, v in zip(qidx, queries, verdicts):
            ob = obs[i]
            records[i] = ObligationRecord(
                ob.kind, ob.loc.render(), v.status, v.wall_time,
                v.note or "solver", ob.trail,
                v.model if v.status == "invalid" else None,
            )
    return records


@dataclass
class CheckOutcome:
    report: VerificationReport
    obligations: list
    program: object | None = None


def check_file(
    path: str,
    flags: Flags | None = None,
    solver: Solver | None = None,
    solver_cfg: SolverConfig | None = None,
) -> CheckOutcome:
    flags = flags or Flags()
    rep = VerificationReport(
        program=Path(path).name,
        status="error",
        flags={"screg": flags.screg, "pms": flags.pms, "unroll": flags.unroll},
    )
    prog = None
    try:
        text = Path(path).read_text()
        prog = parse_program(text)
    except (OSError, ParseError) as e:
        rep.error = str(e)
        rep.finalize()
        return CheckOutcome(rep, [])
    try:
        if solver is None:
            solver = Solver(solver_cfg)
        rep.solver = solver.identity
        st = infer_program_symbols(prog)
        resolver = make_sat_resolver(solver, st)
        obs = generate(prog, flags, resolver)
        records = discharge_obligations(obs, st, solver)
        for r in records:
            rep.add(r)
        rep.finalize()
        return CheckOutcome(rep, obs, prog)
    except (GenerationError, SatUnresolved, SolverUnavailable) as e:
        rep.error = str(e)
        rep.finalize()
        return CheckOutcome(rep, [], prog)
