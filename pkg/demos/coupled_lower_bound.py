"""Why sqrt-log-1/delta accuracy is the ceiling: a coupling you can run.

Take two scaled Bernoulli distributions that share the same (1+alpha)-th
central moment but have means +pc and -pc.  Draw them COUPLED: each
coordinate is (0, 0) with probability 1-p and (c, -c) otherwise, so with
probability (1-p)^n the two samples are literally the same vector.  On
those trials any estimator returns the same number for both distributions,
and since the means sit further apart than twice the target radius, it must
fail on at least one side.  Hence

    max(failure rate on P+, failure rate on P-) >= match rate / 2

no matter how clever the estimator is.  The script verifies the mechanism
on the empirical mean, then shows the constant-zero estimator losing on
both sides at once.
"""

from subgauss import infvar_stress

N = 100
DELTA = 0.05
ALPHA = 1.0  # variance is the controlled moment
MOMENT = 1.0
TRIALS = 50_000


def empirical(arr):
    return float(arr.mean())


def constant_zero(arr):
    return 0.0


fail_plus, fail_minus, match = infvar_stress(
    empirical, N, DELTA, ALPHA, MOMENT, TRIALS, seed=3
)
print(f"empirical mean, {TRIALS} coupled trials, n={N}, delta={DELTA}:")
print(f"  failure rate on P+: {fail_plus:.5f}")
print(f"  failure rate on P-: {fail_minus:.5f}")
print(f"  samples identical:  {match:.5f}")
print(f"  mechanism check:    max(fp, fm) = {max(fail_plus, fail_minus):.5f}"
      f" >= match/2 = {match / 2:.5f}")
print()

# an estimator that ignores the data entirely misses BOTH means, every trial
fp0, fm0, _ = infvar_stress(constant_zero, N, DELTA, ALPHA, MOMENT, 1000, seed=4)
print(f"constant-zero estimator: fp={fp0}, fm={fm0} (the means are further")
print("from 0 than the radius, so it fails on both sides in every trial)")
