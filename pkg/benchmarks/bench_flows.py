"""Time the compiled and pure-Python flow kernels on the same RK4 runs.

    python3 benchmarks/bench_flows.py [--steps 2000] [--repeat 3]

Also times the generic numpy path (bivector times gradient) as a reference,
and checks that the two kernels agree on the final state.
"""

import argparse
import time

import numpy as np

from pld import _backend
from pld.integrate import IntegratorConfig, integrate
from pld.models import build, coupled_model
from pld.poisson import hamiltonian_vf

CASES = [
    ("lorenz", 0.3, 0, 1, [1.0, 2.0, 3.0, 1.0]),
    ("euler", 0.5, 0, 1, [0.3, 0.5, -0.2]),
    ("lorenz", 0.3, 0, 3, None),
    ("euler", 0.5, 0, 4, None),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run(steps, repeat):
    rows = []
    for name, eta, which, copies, x0 in CASES:
        b = build(name, eta)
        if copies > 1:
            cb = coupled_model(b, copies)
            x0 = np.random.default_rng(0).uniform(-0.5, 0.5, cb.dim)
            generic = cb.generic_flow(which)
        else:
            x0 = np.array(x0)
            P, H = b.structure(which), b.hamiltonian(which)
            generic = lambda x, P=P, H=H: hamiltonian_vf(P, H, x)
        mid = _backend.MODEL_IDS[name]
        dt = 1e-3
        finals = {}
        timings = {}
        for key, mod in _backend.BACKENDS.items():
            def go(mod=mod):
                out, row = mod.rk4(mid, eta, which, copies, x0, dt, steps, steps)
                finals[key] = out[row - 1]
            timings[key] = best_of(go, repeat)
        cfg = IntegratorConfig("rk4", dt, steps * dt, steps)
        # the numpy path is slow; a tenth of the steps, scaled up
        short = IntegratorConfig("rk4", dt, steps * dt / 10, steps // 10)
        timings["numpy"] = 10 * best_of(lambda: integrate(generic, x0, short), 1)
        ref = integrate(generic, x0, cfg).states[-1] if steps <= 2000 else None
        gap = (float(np.max(np.abs(finals["compiled"] - finals["python"])))
               if "compiled" in finals else float("nan"))
        rows.append((f"{name} eta={eta:g} N={copies}", timings, gap,
                     None if ref is None else float(np.max(np.abs(finals["python"] - ref)))))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"backends available: {', '.join(sorted(_backend.BACKENDS))} (selected: {_backend.NAME})")
    print(f"{'case':24s} {'compiled':>10s} {'python':>10s} {'numpy':>10s} {'speedup':>8s} "
          f"{'|c-py|':>9s} {'|py-np|':>9s}")
    for label, t, gap, ref_gap in run(args.steps, args.repeat):
        c = t.get("compiled", float("nan"))
        speed = t["python"] / c if c == c else float("nan")
        print(f"{label:24s} {c:10.4f} {t['python']:10.4f} {t['numpy']:10.4f} {speed:8.1f} "
              f"{gap:9.1e} {ref_gap if ref_gap is not None else float('nan'):9.1e}")


if __name__ == "__main__":
    main()
