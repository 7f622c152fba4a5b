"""Median of means versus the empirical mean on heavy-tailed data.

The empirical mean is optimal for gaussians but its tails fall apart the
moment the distribution gets heavy.  Median of means pays a constant-factor
price (2*sqrt(2)*e instead of sqrt(2)) and in exchange keeps gaussian-shaped
deviations for any finite-variance distribution.  This script measures both
tails on a Pareto with barely-finite variance and prints the realized
normalized error quantiles side by side.
"""

import math

from subgauss import ExperimentConfig, parse_distribution, run_tail_experiment

DIST = parse_distribution("pareto:2.5,1")
N = 512
TRIALS = 20_000
DELTAS = (0.1, 0.02, 0.005)


def run(estimator):
    cfg = ExperimentConfig(DIST, estimator, N, TRIALS, DELTAS, seed=12)
    return run_tail_experiment(cfg)


def main():
    print(f"distribution {DIST.family}{DIST.params}, n={N}, {TRIALS} trials")
    print(f"true mean {DIST.mu:.6f}, sd {math.sqrt(DIST.sigma2):.6f}")
    print()
    emp = run("empirical")
    mom = run("mom")
    print("delta      empirical L-hat    mom L-hat    mom exceedance vs bound")
    for erow, mrow in zip(emp.rows, mom.rows):
        bound = mrow.delta
        print(
            f"{erow.delta:<8}   {erow.l_hat:>12.3f}   {mrow.l_hat:>10.3f}"
            f"    {mrow.exceedance:.4f} <= {bound}"
        )
    print()
    print("the mom L-hat column should sit near or below 2*sqrt(2)*e = "
          f"{2 * math.sqrt(2) * math.e:.3f} at every level; the empirical")
    print("column keeps growing as delta shrinks because the worst trials")
    print("are dominated by single huge draws the mean cannot shrug off.")


if __name__ == "__main__":
    main()
