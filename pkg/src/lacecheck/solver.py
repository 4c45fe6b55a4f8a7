"""External-solver driver: batch discharge, verdict cache, process pool.

The default backend runs Z3 (the z3-solver wasm build) through a node shim
that accepts many .smt2 files per process; any SMT-LIB2 solver binary can be
configured instead (`solver = z3` uses `z3 -smt2 <file>`).  Verdicts are
cached on disk, keyed by query hash and solver identity.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .embedding import SmtQuery

SHIM = Path(__file__).parent / "data" / "z3shim.js"


class SolverUnavailable(Exception):
    pass


@dataclass
class SolverConfig:
    backend: str = "auto"  # auto | node | <path to smt2 solver binary>
    timeout: float = 30.0  # seconds per query
    jobs: int = 2
    batch_size: int = 50
    cache_dir: str | None = None
    node_path: str = "node"
    extra_node_path: str | None = None  # NODE_PATH for z3-solver resolution


@dataclass
class SolverVerdict:
    status: str  # valid | invalid | unknown | timeout | solver-error
    wall_time: float = 0.0
    solver_id: str = ""
    query_hash: str = ""
    model: str | None = None  # present iff invalid
    note: str = ""

    def to_json(self) -> dict:
        d = {
            "status": self.status,
            "solver": self.solver_id,
            "hash": self.query_hash,
        }
        if self.model is not None:
            d["model"] = self.model
        if self.note:
            d["note"] = self.note
        return d


def _find_node_modules(cfg: SolverConfig) -> str | None:
    cands = []
    if cfg.extra_node_path:
        cands.append(cfg.extra_node_path)
    env = os.environ.get("LACECHECK_NODE_PATH")
    if env:
        cands.append(env)
    here = Path.cwd()
    for base in [here] + list(here.parents):
        cands.append(str(base / "node_modules"))
    try:
        root = subprocess.run(
            ["npm", "root", "-g"], capture_output=True, text=True, timeout=30
        ).stdout.strip()
        if root:
            cands.append(root)
    except Exception:
        pass
    for c in cands:
        if c and (Path(c) / "z3-solver").exists():
            return c
    return None


class Solver:
    """Discharges SmtQueries; thread-safe; verdicts cached across runs."""

    def __init__(self, cfg: SolverConfig | None = None):
        self.cfg = cfg or SolverConfig()
        self._identity: str | None = None
        self._mode: str | None = None
        self._node_modules: str | None = None
        self._bin: str | None = None
        self._probe()
        self.calls = 0
        self.cache_hits = 0

    # ------------------------------------------------------------- probing

    def _probe(self):
        cfg = self.cfg
        if cfg.backend not in ("auto", "node"):
            self._mode = "binary"
            self._bin = cfg.backend
            self._identity = f"bin:{Path(cfg.backend).name}"
            return
        if cfg.backend == "auto":
            z3 = shutil.which("z3")
            if z3:
                self._mode = "binary"
                self._bin = z3
                self._identity = "bin:z3"
                return
        nm = _find_node_modules(cfg)
        if nm is None:
            raise SolverUnavailable(
                "no SMT solver found: install the z3-solver npm package"
                " (npm install z3-solver) or configure a solver binary"
            )
        self._mode = "node"
        self._node_modules = nm
        ver = "?"
        try:
            pkg = json.loads(
                (Path(nm) / "z3-solver" / "package.json").read_text()
            )
            ver = pkg.get("version", "?")
        except Exception:
            pass
        self._identity = f"z3-wasm-{ver}"

    @property
    def identity(self) -> str:
        return self._identity or "?"

    # --------------------------------------------------------------- cache

    def _cache_path(self, q: SmtQuery) -> Path | None:
        if self.cfg.cache_dir is None:
            return None
        d = Path(self.cfg.cache_dir)
        d.mkdir(parents=True, exist_ok=True)
        key = f"{q.digest}-{self.identity}".replace("/", "_")
        return d / (key + ".json")

    def lookup(self, q: SmtQuery) -> SolverVerdict | None:
        p = self._cache_path(q)
        if p is None or not p.exists():
            return None
        try:
            d = json.loads(p.read_text())
            return SolverVerdict(
                d["status"], 0.0, d.get("solver", self.identity),
                q.digest, d.get("model"), d.get("note", "cached"),
            )
        except Exception:
            return None

    def cache(self, q: SmtQuery, v: SolverVerdict):
        p = self._cache_path(q)
        if p is None:
            return
        if v.status in ("unknown", "timeout", "solver-error"):
            return  # never pin inconclusive verdicts
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(v.to_json()))
        os.replace(tmp, p)

    # ------------------------------------------------------------ discharge

    def discharge(self, q: SmtQuery) -> SolverVerdict:
        return self.discharge_many([q])[0]

    def discharge_many(self, queries: list) -> list:
        out: dict = {}
        todo = []
        for i, q in enumerate(queries):
            hit = self.lookup(q)
            if hit is not None:
                self.cache_hits += 1
                out[i] = hit
            else:
                todo.append(i)
        if todo:
            batches = [
                todo[i : i + self.cfg.batch_size]
                for i in range(0, len(todo), self.cfg.batch_size)
            ]
            with ThreadPoolExecutor(max_workers=max(1, self.cfg.jobs)) as ex:
                results = ex.map(
                    lambda b: self._run_batch([queries[i] for i in b]), batches
                )
                for batch, verdicts in zip(batches, results):
                    for i, v in zip(batch, verdicts):
                        out[i] = v
                        self.cache(queries[i], v)
        return [out[i] for i in range(len(queries))]

    def is_satisfiable(self, q: SmtQuery) -> bool | None:
        """sat-query helper for the sat(...) operator; None if inconclusive."""
        v = self.discharge(q)
        if v.status == "invalid":  # negation convention does not apply here
            return True
        if v.status == "valid":
            return False
        return None

    # ------------------------------------------------------------ execution

    def _run_batch(self, queries: list) -> list:
        remaining = list(queries)
        verdicts: list = []
        while remaining:
            done, rest = self._run_once(remaining)
            verdicts.extend(done)
            if rest and len(done) == 0:
                # the first query of the batch hung: time it out, move on
                q = rest[0]
                verdicts.append(
                    SolverVerdict("timeout", self.cfg.timeout, self.identity, q.digest)
                )
                rest = rest[1:]
            remaining = rest
        return verdicts

    def _run_once(self, queries: list):
        with tempfile.TemporaryDirectory(prefix="lacecheck-") as td:
            paths = []
            for i, q in enumerate(queries):
                p = Path(td) / f"q{i:04d}.smt2"
                text = q.text
                if q.evals:
                    text += "".join(f"; EVAL {e}\n" for e in q.evals)
                p.write_text(text)
                paths.append(str(p))
            if self._mode == "node":
                cmd = [
                    self.cfg.node_path,
                    str(SHIM),
                    "--timeout-ms",
                    str(int(self.cfg.timeout * 1000)),
                ] + paths
                env = dict(os.environ)
                env["NODE_PATH"] = self._node_modules or ""
                budget = self.cfg.timeout * (len(queries) + 1) + 30
                return self._supervise(cmd, env, paths, queries, budget)
            verdicts = []
            for p, q in zip(paths, queries):
                verdicts.append(self._run_binary(p, q))
            return verdicts, []

    def _supervise(self, cmd, env, paths, queries, budget):
        t0 = time.monotonic()
        self.calls += 1
        try:
            proc = subprocess.run(
                cmd, capture_output=True, text=True, env=env, timeout=budget
            )
            output = proc.stdout
            timed_out = False
        except subprocess.TimeoutExpired as e:
            output = (e.stdout or b"").decode() if isinstance(e.stdout, bytes) else (e.stdout or "")
            timed_out = True
        blocks = _parse_blocks(output)
        verdicts = []
        for p, q in zip(paths, queries):
            if p not in blocks:
                break
            status, model = blocks[p]
            verdicts.append(
                SolverVerdict(
                    _classify(status),
                    time.monotonic() - t0,
                    self.identity,
                    q.digest,
                    model,
                    status if _classify(status) == "solver-error" else "",
                )
            )
        rest = queries[len(verdicts):]
        if rest and not timed_out and not verdicts:
            # process died before the first result
            err = "no output"
            verdicts.append(
                SolverVerdict("solver-error", 0.0, self.identity,
                              rest[0].digest, None, err)
            )
            rest = rest[1:]
        return verdicts, rest

    def _run_binary(self, path: str, q: SmtQuery) -> SolverVerdict:
        t0 = time.monotonic()
        self.calls += 1
        try:
            proc = subprocess.run(
                [self._bin, path],
                capture_output=True,
                text=True,
                timeout=self.cfg.timeout,
            )
        except FileNotFoundError:
            raise SolverUnavailable(f"solver binary not found: {self._bin}")
        except subprocess.TimeoutExpired:
            return SolverVerdict("timeout", self.cfg.timeout, self.identity, q.digest)
        line = proc.stdout.strip().split("\n")[-1] if proc.stdout.strip() else ""
        return SolverVerdict(
            _classify(line), time.monotonic() - t0, self.identity, q.digest,
            None, "" if _classify(line) != "solver-error" else proc.stdout[:200],
        )


def _parse_blocks(output: str) -> dict:
    blocks: dict = {}
    cur = None
    lines: list = []
    for ln in output.split("\n"):
        if ln.startswith("=== BEGIN "):
            cur = ln[len("=== BEGIN "):]
            lines = []
        elif ln.startswith("=== END ") and cur is not None:
            status = lines[0] if lines else "error: empty"
            model = "\n".join(l[5:] for l in lines[1:] if l.startswith("EVAL "))
            blocks[cur] = (status, model or None)
            cur = None
        elif cur is not None:
            lines.append(ln)
    return blocks


def _classify(status: str) -> str:
    s = status.strip()
    if s == "unsat":
        return "valid"
    if s == "sat":
        return "invalid"
    if s == "unknown":
        return "unknown"
    return "solver-error"
