"""Walk through the procedure family and the per-study FDP ceiling.

Run with: python demos/01_procedures_and_fdp_ceiling.py
"""

from fdrlink import (
    PValueStudy,
    bh_step_down,
    bh_step_up,
    fdp_upper_bound,
    is_compliant,
    simes_pvalue,
)

# A small study: four hypotheses, the first two are true nulls.
study = PValueStudy([0.012, 0.31, 0.004, 0.048], [True, True, False, False])
alpha = 0.1

up = bh_step_up(study, alpha)
down = bh_step_down(study, alpha)
print(f"step-up  rejects {sorted(up.rejected)} (R={up.n_rejected}, V={up.n_false}, "
      f"FDP={up.fdp})")
print(f"step-down rejects {sorted(down.rejected)} (R={down.n_rejected})")
print(f"step-down is a subset of step-up: {down.rejected <= up.rejected}")
print(f"both outcomes are compliant: "
      f"{is_compliant(study, up, alpha) and is_compliant(study, down, alpha)}")

# No compliant procedure, whatever it does with the non-nulls, can push the
# FDP past a ceiling computed from the null p-values alone.
ceiling = fdp_upper_bound(study.null_pvalues, study.n, alpha)
print(f"\nFDP ceiling from the nulls: {ceiling} (= {float(ceiling):.4f})")
print(f"realized step-up FDP {up.fdp} <= ceiling: {up.fdp <= ceiling}")

# The Simes combination of the nulls drives everything downstream: its CDF
# is exactly the step-up FDR curve on the nulls.
print(f"\nSimes combination of the nulls: {simes_pvalue(study.null_pvalues):.4f}")

# Sweep the level and watch the rejection count and ceiling move together.
print("\nalpha   R_up  ceiling")
for a in (0.02, 0.05, 0.1, 0.2, 0.4):
    r = bh_step_up(study, a).n_rejected
    c = float(fdp_upper_bound(study.null_pvalues, study.n, a))
    print(f"{a:5.2f}  {r:4d}  {c:8.4f}")
