"""Time the compiled and pure-Python kernels on the default workload.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from lvattn import kernels
from lvattn.dynamics import State, SystemParams, simulate
from lvattn.observation import add_noise, make_windows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    p = SystemParams()
    ds = make_windows(add_noise(simulate(p, State(40.0, 9.0), 0.01, 5000), 2.0, 42), 17, 1)
    theta = np.array([0.05, -0.03, 0.01, 1.0, 0.02, -0.01, 1.0, 0.0, 0.0])

    cases = {
        "integrate_lv (5000 steps)": lambda b: b.integrate_lv(0.6, 0.025, 0.8, 0.02, 40.0, 9.0, 0.01, 5000),
        "integrate_lv (100000 steps)": lambda b: b.integrate_lv(0.6, 0.025, 0.8, 0.02, 40.0, 9.0, 0.01, 100_000),
        "attention_loss_grad (4985 x 17)": lambda b: b.attention_loss_grad(ds.inputs, ds.targets, theta),
    }
    backends = {name: kernels.load_backend(name) for name in kernels.available_backends()}
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in backends) + ("     speed-up" if len(backends) > 1 else ""))
    for label, fn in cases.items():
        times = {}
        for name, mod in backends.items():
            fn(mod)
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:34s}" + "".join(f"{times[n] * 1e3:11.3f} ms" for n in backends)
        if "compiled" in times and "python" in times:
            row += f"{times['python'] / times['compiled']:12.1f}x"
        print(row)
    epochs_s = {n: t * 300 for n, t in times.items()}
    print("300-epoch training estimate: " + ", ".join(f"{n} {t:.2f} s" for n, t in epochs_s.items()))


if __name__ == "__main__":
    main()
