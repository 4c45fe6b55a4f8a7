"""Command-line driver: check programs, run the corpus, dump analyses."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .embedding import infer_program_symbols
from .formulas import render
from .obligations import Flags, generate
from .parser import ParseError, parse_program
from .pipeline import check_file, make_sat_resolver
from .report import EXIT_USAGE, normalized_json
from .solver import Solver, SolverConfig, SolverUnavailable
from .structure import dump_structure


def load_config(path: str | None) -> dict:
    """key = value lines; # comments."""
    out: dict = {}
    p = Path(path) if path else Path("lacecheck.toml")
    if not p.exists():
        return out
    for ln in p.read_text().split("\n"):
        ln = ln.split("#", 1)[0].strip()
        if not ln or "=" not in ln:
            continue
        k, v = ln.split("=", 1)
        out[k.strip()] = v.strip().strip('"')
    return out


def solver_config(args, cfg: dict) -> SolverConfig:
    sc = SolverConfig()
    sc.backend = args.solver or cfg.get("solver", "auto")
    sc.timeout = args.timeout if args.timeout is not None else float(
        cfg.get("timeout", 30.0)
    )
    sc.jobs = args.jobs if args.jobs is not None else int(cfg.get("jobs", 2))
    if args.no_cache:
        sc.cache_dir = None
    else:
        sc.cache_dir = args.cache_dir or cfg.get(
            "cache_dir", str(Path.home() / ".cache" / "lacecheck")
        )
    return sc


def check_flags(args) -> Flags:
    return Flags(screg=args.screg, pms=args.pms, unroll=args.loop_unroll)


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    try:
        solver = Solver(solver_config(args, cfg))
    except SolverUnavailable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = check_file(args.file, check_flags(args), solver)
    if args.json:
        sys.stdout.write(
            normalized_json(out.report) if args.stable else out.report.json_text()
        )
    else:
        sys.stdout.write(out.report.human_text(verbose=args.verbose))
    return out.report.exit_code


def cmd_dump(args) -> int:
    try:
        prog = parse_program(Path(args.file).read_text())
    except (OSError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for t in prog.threads:
        print(dump_structure(t, prog.init_label, args.loop_unroll, args.screg))
    if args.obligations:
        cfg = load_config(args.config)
        try:
            solver = Solver(solver_config(args, cfg))
            st = infer_program_symbols(prog)
            resolver = make_sat_resolver(solver, st)
        except SolverUnavailable:
            resolver = None
        obs = generate(prog, check_flags(args), resolver)
        print(f"obligations ({len(obs)}):")
        for ob in obs:
            print(f"  {ob.kind:13} {ob.loc.render()}")
            if ob.structural is not None:
                print(f"      structural: {ob.structural}")
                continue
            print(f"      hyp: {render(ob.hypothesis)}")
            print(f"      con: {render(ob.conclusion)}")
    return 0


def read_expectations(path: Path) -> dict:
    exp = {"status": "proved", "flags": [], "fails": []}
    for ln in path.read_text().split("\n"):
        ln = ln.split("#", 1)[0].strip()
        if not ln or "=" not in ln:
            continue
        k, v = [x.strip() for x in ln.split("=", 1)]
        if k == "status":
            exp["status"] = v
        elif k == "flag":
            exp["flags"].append(v)
        elif k == "fail":
            kind, _, locpat = v.partition(" ")
            exp["fails"].append((kind, locpat.strip()))
    return exp


def apply_expect_flags(flags: Flags, names: list) -> Flags:
    for n in names:
        if n == "screg":
            flags.screg = True
        elif n.startswith("pms="):
            flags.pms = n.split("=", 1)[1]
        elif n.startswith("unroll="):
            flags.unroll = int(n.split("=", 1)[1])
    return flags


def cmd_corpus(args) -> int:
    cfg = load_config(args.config)
    try:
        solver = Solver(solver_config(args, cfg))
    except SolverUnavailable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    root = Path(args.dir)
    programs = sorted(root.glob("*.lace"))
    rows = []
    ok = True
    for prog in programs:
        expect_path = prog.with_suffix(".expect")
        exp = read_expectations(expect_path) if expect_path.exists() else None
        flags = apply_expect_flags(check_flags(args), exp["flags"] if exp else [])
        out = check_file(str(prog), flags, solver)
        rep = out.report
        verdict = "?"
        if exp is None:
            verdict = f"(no expectation) {rep.status}"
        else:
            match = rep.status == exp["status"]
            missing = []
            for (kind, locpat) in exp["fails"]:
                hit = any(
                    r.kind == kind and locpat in r.location
                    for r in rep.invalid()
                )
                if not hit:
                    missing.append(f"{kind} {locpat}")
                    match = False
            verdict = "pass" if match else (
                f"FAIL: status {rep.status} (expected {exp['status']})"
                + (f", missing {'; '.join(missing)}" if missing else "")
            )
            ok = ok and match
        rows.append((prog.name, rep.status, verdict))
        if args.verbose and rep.status != "proved":
            sys.stdout.write(rep.human_text())
    width = max((len(r[0]) for r in rows), default=10)
    for (name, status, verdict) in rows:
        print(f"{name:<{width}}  {status:<11} {verdict}")
    print(f"{len(rows)} programs, " + ("all expectations met" if ok else
                                       "EXPECTATION MISMATCHES"))
    return 0 if ok else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="lacecheck",
        description="Proof checker for concurrent programs laced with"
                    " weak-memory ordering constraints",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, with_solver=True):
        p.add_argument("--screg", action="store_true",
                       help="assume register renaming (SCreg)")
        p.add_argument("--pms", choices=("auto", "on", "off"), default="auto",
                       help="final-assertion (PMS) checking")
        p.add_argument("--loop-unroll", type=int, default=2, metavar="N")
        p.add_argument("--config", default=None, metavar="FILE")
        if with_solver:
            p.add_argument("--solver", default=None, metavar="PATH",
                           help="SMT-LIB2 solver binary, or 'auto'")
            p.add_argument("--timeout", type=float, default=None, metavar="S")
            p.add_argument("--jobs", type=int, default=None, metavar="N")
            p.add_argument("--cache-dir", default=None, metavar="DIR")
            p.add_argument("--no-cache", action="store_true")
        p.add_argument("-v", "--verbose", action="store_true")

    pc = sub.add_parser("check", help="check one laced program")
    pc.add_argument("file")
    common(pc)
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--stable", action="store_true",
                    help="strip timing from JSON output")
    pc.set_defaults(fn=cmd_check)

    pd = sub.add_parser("dump", help="dump so-tree, parallelism, obligations")
    pd.add_argument("file")
    common(pd)
    pd.add_argument("--obligations", action="store_true")
    pd.set_defaults(fn=cmd_dump)

    pr = sub.add_parser("corpus", help="check every *.lace in a directory"
                                       " against its .expect sidecar")
    pr.add_argument("dir")
    common(pr)
    pr.set_defaults(fn=cmd_corpus)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
