#!/usr/bin/env python3
"""Run CBC on an LP file and rewrite its solution as `name value` lines.

usage: cbc_adapter.py INPUT.lp OUTPUT [--cbc PATH] [--seconds N]
"""
import argparse
import os
import shutil
import subprocess
import sys
import tempfile


def find_cbc(explicit):
    if explicit:
        return explicit
    found = shutil.which("cbc")
    if found:
        return found
    try:
        import pulp  # noqa: F401
        base = os.path.dirname(pulp.__file__)
        cand = os.path.join(base, "solverdir", "cbc", "linux", "i64", "cbc")
        if os.path.exists(cand):
            return cand
    except ImportError:
        pass
    sys.exit("cbc binary not found")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--cbc")
    ap.add_argument("--seconds", type=float)
    args = ap.parse_args()

    cbc = find_cbc(args.cbc)
    with tempfile.TemporaryDirectory() as tmp:
        solu = os.path.join(tmp, "solu.txt")
        cmd = [cbc, args.input]
        if args.seconds:
            cmd += ["sec", str(args.seconds)]
        cmd += ["solve", "solu", solu]
        proc = subprocess.run(cmd, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
        if proc.returncode != 0 or not os.path.exists(solu):
            sys.stderr.write(proc.stdout)
            sys.exit("cbc failed")
        with open(solu) as f:
            lines = f.read().splitlines()

    head = lines[0] if lines else ""
    low = head.lower()
    if "infeasible" in low:
        with open(args.output, "w") as out:
            out.write("status infeasible\nobjective 0\n")
        return
    if "objective value" not in low:
        sys.exit("unrecognised cbc status: " + head)
    objective = float(head.split()[-1])
    status = "optimal" if low.startswith("optimal") else "feasible"
    with open(args.output, "w") as out:
        out.write("status %s\nobjective %.17g\n" % (status, objective))
        for line in lines[1:]:
            parts = line.replace("**", " ").split()
            if len(parts) >= 3:
                out.write("%s %s\n" % (parts[1], parts[2]))


if __name__ == "__main__":
    main()
