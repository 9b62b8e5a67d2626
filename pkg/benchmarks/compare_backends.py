"""Compare the compiled and pure-Python integrator backends.

Runs the same forced planar trajectory on both backends, checks that the
step sequences agree, and reports wall-clock timings.  Usage:

    python benchmarks/compare_backends.py [--t-end 10.0] [--repeat 3]

The pure-Python run is forced via a subprocess environment toggle so both
backends can be timed inside one process invocation.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, sys, time
import numpy as np
from relcrawl import backend
from relcrawl.integrate import IntegratorConfig
from relcrawl.presets import default_params_2d, default_schedule_2d
from relcrawl.equilibrium import equilibrium_state

t_end, repeat = float(sys.argv[1]), int(sys.argv[2])
params = default_params_2d()
schedule = default_schedule_2d(0.5)
state = equilibrium_state(params)
cfg = IntegratorConfig(rtol=1e-9, atol=1e-12)

best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    traj = backend.integrate_crawler(state, schedule, params, (0.0, t_end), cfg)
    best = min(best, time.perf_counter() - t0)
mid = traj.sample_at(0.5 * t_end)
print(json.dumps({
    "backend": backend.active(),
    "steps": len(traj.t) - 1,
    "seconds": best,
    "final": list(traj.y[-1]),
    "mid": list(mid),
}))
"""


def _run(force_python: bool, t_end: float, repeat: int) -> dict:
    env = dict(os.environ)
    env["RELCRAWL_FORCE_PYTHON"] = "1" if force_python else "0"
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(t_end), str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    compiled = _run(False, args.t_end, args.repeat)
    python = _run(True, args.t_end, args.repeat)

    if compiled["backend"] == python["backend"]:
        print("warning: compiled extension unavailable; timing python twice")

    import numpy as np

    gap_final = float(np.max(np.abs(np.array(compiled["final"]) - np.array(python["final"]))))
    gap_mid = float(np.max(np.abs(np.array(compiled["mid"]) - np.array(python["mid"]))))
    print(f"trajectory: forced planar crawler, t in [0, {args.t_end}], rtol 1e-9 / atol 1e-12")
    for r in (compiled, python):
        print(
            f"  {r['backend']:>8s}: {r['steps']:6d} steps  "
            f"{r['seconds'] * 1e3:10.2f} ms (best of {args.repeat})"
        )
    if python["seconds"] > 0:
        print(f"  speedup: {python['seconds'] / compiled['seconds']:.1f}x")
    print(f"  agreement: final state {gap_final:.3e}, dense midpoint {gap_mid:.3e}")
    same_steps = compiled["steps"] == python["steps"]
    print(f"  identical step count: {same_steps}")
    return 0 if (gap_final < 1e-9 and gap_mid < 1e-9) else 1


if __name__ == "__main__":
    raise SystemExit(main())
