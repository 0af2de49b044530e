"""Compiled extension kernel vs pure-Python fallback.

Runs the exact integer kernels (rref, nullspace, solve) on deterministic
synthetic matrices, then two real workloads (a full-cone build and a
subdivision direct image).  Each side runs in its own child process so
the import-time kernel selection is exercised exactly the way users hit
it: the pure child sets FANSHEAF_PURE=1, the other inherits the default.

Usage: python benchmarks/bench_linalg.py [--repeat N]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SEED = 20240901


def synthetic_cases():
    rng = random.Random(SEED)
    cases = []
    for rows, cols, bound in [(40, 60, 5), (80, 120, 7), (120, 180, 9)]:
        mat = [
            [rng.randint(-bound, bound) for _ in range(cols)]
            for _ in range(rows)
        ]
        cases.append((f"rref {rows}x{cols}", "rref", mat))
        cases.append((f"nullspace {rows}x{cols}", "nullspace", mat))
        x0 = [rng.randint(-3, 3) for _ in range(cols)]
        rhs = [sum(r[j] * x0[j] for j in range(cols)) for r in mat]
        cases.append((f"solve {rows}x{cols}", "solve", (mat, rhs)))
    return cases


def run_inner(repeat):
    from fansheaf import _linalg
    from fansheaf.fans import load_fan, subdivision_map
    from fansheaf.minimal import build_minimal
    from fansheaf.pushforward import pushforward

    def best_of(fn):
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    timings = {}
    for name, op, payload in synthetic_cases():
        if op == "rref":
            timings[name] = best_of(lambda m=payload: _linalg.rref(m))
        elif op == "nullspace":
            timings[name] = best_of(
                lambda m=payload: _linalg.nullspace(m, len(m[0]))
            )
        else:
            mat, rhs = payload
            timings[name] = best_of(
                lambda m=mat, r=rhs: _linalg.solve(m, r, len(m[0]))
            )

    cube = load_fan(ROOT / "data" / "fans" / "conecube.fan")
    timings["build conecube"] = best_of(
        lambda: build_minimal(cube, window=(-4, 2))
    )
    src = load_fan(ROOT / "data" / "fans" / "starsq.fan")
    tgt = load_fan(ROOT / "data" / "fans" / "conesquare.fan")

    def image():
        pushforward(subdivision_map(src, tgt), build_minimal(src))

    timings["pushforward starsq"] = best_of(image)
    return {"kernel": _linalg.KERNEL, "timings": timings}


def run_child(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["FANSHEAF_PURE"] = "1"
    else:
        env.pop("FANSHEAF_PURE", None)
    out = subprocess.run(
        [sys.executable, __file__, "--inner", "--repeat", str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--inner", action="store_true")
    args = parser.parse_args()
    if args.inner:
        print(json.dumps(run_inner(args.repeat)))
        return
    fast = run_child(False, args.repeat)
    pure = run_child(True, args.repeat)
    print(f"kernels: {fast['kernel']} vs {pure['kernel']}")
    if fast["kernel"] == pure["kernel"]:
        print("note: compiled extension unavailable, comparing pure to pure")
    width = max(len(k) for k in fast["timings"])
    print(f"{'case'.ljust(width)}  {fast['kernel']:>10}  {'pure':>10}  speedup")
    for name, t in fast["timings"].items():
        tp = pure["timings"][name]
        ratio = tp / t if t > 0 else float("inf")
        print(f"{name.ljust(width)}  {t:>9.4f}s  {tp:>9.4f}s  {ratio:>6.1f}x")


if __name__ == "__main__":
    main()
