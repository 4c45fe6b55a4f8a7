#!/usr/bin/env node
// Batch SMT-LIB2 runner over the z3-solver (wasm) npm package.
//
// Usage: node z3shim.js [--timeout-ms N] file1.smt2 [file2.smt2 ...]
// For each file prints a block:
//   === BEGIN <path>
//   sat | unsat | unknown | error: ...
//   (eval results, one per "; EVAL <term>" directive, when sat)
//   === END <path>
// Results are flushed per file so a supervisor can kill a stuck batch and
// keep the completed prefix.

"use strict";

const fs = require("fs");

async function main() {
  const args = process.argv.slice(2);
  let timeoutMs = 0;
  const files = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--timeout-ms") {
      timeoutMs = parseInt(args[++i], 10) || 0;
    } else {
      files.push(args[i]);
    }
  }
  const { init } = require("z3-solver");
  const { Z3 } = await init();
  if (files.length === 0) {
    process.stdout.write("z3shim ready\n");
    return process.exit(0);
  }
  for (const f of files) {
    process.stdout.write(`=== BEGIN ${f}\n`);
    let cfg = null;
    let ctx = null;
    try {
      const text = fs.readFileSync(f, "utf8");
      const evals = [];
      for (const line of text.split("\n")) {
        const m = line.match(/^; EVAL (.*)$/);
        if (m) evals.push(m[1]);
      }
      if (timeoutMs > 0) {
        Z3.global_param_set("timeout", String(timeoutMs));
      }
      cfg = Z3.mk_config();
      ctx = Z3.mk_context(cfg);
      const out = await Z3.eval_smtlib2_string(ctx, text);
      const verdict = out.trim().split("\n").pop().trim();
      process.stdout.write(verdict + "\n");
      if (verdict === "sat" && evals.length > 0) {
        for (const e of evals) {
          try {
            const r = await Z3.eval_smtlib2_string(ctx, `(get-value (${e}))`);
            process.stdout.write(`EVAL ${r.trim().replace(/\n/g, " ")}\n`);
          } catch (err) {
            process.stdout.write(`EVAL (error)\n`);
          }
        }
      }
    } catch (err) {
      process.stdout.write(`error: ${String(err && err.message || err).split("\n")[0]}\n`);
    } finally {
      try {
        if (ctx) Z3.del_context(ctx);
      } catch (e) {}
    }
    process.stdout.write(`=== END ${f}\n`);
  }
  process.exit(0);
}

main().catch((e) => {
  process.stderr.write(String(e && e.stack || e) + "\n");
  process.exit(2);
});
