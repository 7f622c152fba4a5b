"""Which distributions have regular sums, empirically.

The quartile-interval estimator assumes k-regularity: for every j >= k the
j-fold sum of independent copies lands on each side of j times the mean
with probability at least 1/3.  Symmetric distributions satisfy this at
k = 1; skewed ones may need a few foldings before the sums balance out.
regularity_probe estimates both side-probabilities by simulation, so you
can check the assumption before trusting the estimator on your data model.
"""

from subgauss import parse_distribution, regularity_probe

TRIALS = 40_000

for name in ("gaussian:0,1", "laplace:2", "poisson:0.2", "pareto:3,1", "lognormal:0,1"):
    dist = parse_distribution(name)
    print(name)
    for j in (1, 2, 4, 8):
        p_minus, p_plus = regularity_probe(dist, j, TRIALS, seed=11)
        ok = "balanced" if min(p_minus, p_plus) >= 1.0 / 3.0 else "NOT balanced"
        print(f"  j={j}:  P(sum <= j*mu) ~ {p_minus:.3f},  P(sum >= j*mu) ~ {p_plus:.3f}  [{ok}]")
    print()

print("rule of thumb: the dominated side only grows with j, so the first j")
print("where both sides clear 1/3 is an empirical regularity index for the")
print("quartile-interval estimator's entry requirement.")
