"""Best-of-sweep repetition MSE against sqrt(N): exact expectation and Monte Carlo side by side."""

import argparse

import numpy as np

from uepq.harness import ExperimentConfig, run_experiment
from uepq.repetition import best_plan, expected_costs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    ns = [64, 128, 256, 512, 1024]
    exact, mc = [], []
    print(f"{'N':>5} {'k':>3} {'exact MSE':>12} {'MC MSE':>12} {'MC se':>10}  allocation")
    for n in ns:
        plan = best_plan(n, args.eps)
        exact.append(expected_costs(plan, args.eps)[1])
        cfg = ExperimentConfig(policies=("repetition",), eps=args.eps, k_pairs=((plan.k, 0),),
                               n_values=(n,), trials=args.trials, seed=args.seed)
        s = run_experiment(cfg)[0]
        mc.append(s.mean_mse)
        print(f"{n:5d} {plan.k:3d} {exact[-1]:12.4g} {s.mean_mse:12.4g} {s.se_mse:10.2g}  {plan.allocations}")
    x = np.sqrt(ns)
    for label, y in (("exact", exact), ("monte carlo", mc)):
        y = np.log(y)
        slope, icpt = np.polyfit(x, y, 1)
        resid = y - (slope * x + icpt)
        r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
        print(f"{label:>12}: ln MSE = {slope:.4f} sqrt(N) + {icpt:.3f}, R^2 = {r2:.5f}")


if __name__ == "__main__":
    main()
