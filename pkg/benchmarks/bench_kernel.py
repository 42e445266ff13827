"""Compare the compiled and pure-Python randomness kernels.

Run:  python benchmarks/bench_kernel.py
The two backends are bit-identical (the test suite asserts this); the point
of the extension is speed, measured here on the workloads the samplers use.
"""
from __future__ import annotations

import time

from coinfactory import _kernel_py


def load_compiled():
    try:
        from coinfactory import _kernel  # type: ignore[attr-defined]

        return _kernel
    except ImportError:
        return None


def bench(kernel, n_draws: int = 500_000) -> dict:
    out = {}
    s = kernel.BitStream(12345)
    t0 = time.perf_counter()
    for _ in range(n_draws):
        s.bernoulli(1, 3)
    out["bernoulli(1/3)"] = time.perf_counter() - t0

    s = kernel.BitStream(12345)
    t0 = time.perf_counter()
    for _ in range(n_draws // 10):
        s.binomial(2, 3, 64)
    out["binomial(2/3, t=64)"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for i in range(n_draws):
        kernel.mix64(i)
    out["mix64"] = time.perf_counter() - t0
    return out


def bench_sampler(n_trials: int = 5_000) -> float:
    """End-to-end: the general factory on the linear target, current backend."""
    from fractions import Fraction

    from coinfactory import (
        BudgetedCoins,
        CoinBank,
        FactoryRecursion,
        LevelSchedule,
        TargetFunction,
    )

    target = TargetFunction(1, lambda p: (1 + 2 * p[0]) / 4, "affine14")
    eng = FactoryRecursion(target, LevelSchedule(t_const=64, level_cap=20))
    prog = eng.factory_program()
    bank = CoinBank(["1/2"], seed=1)
    t0 = time.perf_counter()
    for i in range(n_trials):
        try:
            prog.sample(BudgetedCoins(bank.spawn(i)))
        except Exception:
            pass
    return time.perf_counter() - t0


def main() -> None:
    compiled = load_compiled()
    rows = {"python": bench(_kernel_py)}
    if compiled is not None:
        rows["compiled"] = bench(compiled)
    else:
        print("compiled extension not built; showing pure Python only\n")

    names = list(next(iter(rows.values())))
    width = max(len(n) for n in names) + 2
    header = "workload".ljust(width) + "".join(f"{b:>12}" for b in rows)
    if len(rows) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name in names:
        line = name.ljust(width) + "".join(f"{rows[b][name]:>11.3f}s" for b in rows)
        if len(rows) == 2:
            line += f"{rows['python'][name] / rows['compiled'][name]:>9.1f}x"
        print(line)

    dt = bench_sampler()
    from coinfactory import BACKEND

    print(f"\nend-to-end factory sampler (5000 trials, backend={BACKEND}): {dt:.2f}s")
    print("set COINFACTORY_PURE_PYTHON=1 and rerun to time the fallback end to end")


if __name__ == "__main__":
    main()
