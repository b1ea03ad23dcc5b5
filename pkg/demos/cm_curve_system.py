"""Frobenius data of y^2 = x^3 + x as a Q(i)-rational system.

Run with ``python3 demos/cm_curve_system.py``.
"""

from frobsys.frobpoly import CharPoly
from frobsys.frobtorus import rank_compare, torus_rank
from frobsys.ingest import EllipticCurve, build_cm_system, cm_split, frobenius_poly, gaussian_field
from frobsys.systems import check_system, restrict_system

Qi = gaussian_field()

# Point counts first.  a_p vanishes when p = 3 mod 4.
for p in (5, 7, 13, 19, 29):
    sample = frobenius_poly(EllipticCurve(1, 0, p))
    split = cm_split(sample.P, Qi)
    shown = "supersingular" if split is None else f"pi = {split[0]}"
    print(f"p={p:>3}  P = {sample.P.poly}   {shown}")

# Two lambda-adic sheets over Q(i) agree at every split place without powers.
system = build_cm_system(1, 0, Qi, 200)
report = check_system(system)
print("\nstrongly quasi-compatible:", report.strong_quasi_compatible)
print("verdicts:", sorted({str(v) for v in report.cells.values()}))

# The conjugate assignment is a deliberate mismatch.
bad = check_system(build_cm_system(1, 0, Qi, 200, conjugate=True))
print("conjugate fixture first failure:", bad.first_failure)

# Restricting to Q takes norms and recovers t^2 - a_p t + p.
over_q = restrict_system(system)
print("\nrestricted sheet at 13:", over_q.sheets[0].entries["13"].sample.P.poly)

# Torus ranks: the Q-level polynomial at a split place has rank 2, t - pi rank 1.
pl = "13"
print("rank of t - pi:", torus_rank(system.sheets[0].entries[pl].sample.P).rank_estimate)
cmp = rank_compare([(s.label, s.entries[pl].sample) for s in over_q.sheets])
for label, deg, res in cmp.rows:
    print(f"  {label}: degree {deg}, rank {res.rank_estimate}, certified {res.certified}")
print("supersingular t^2 + 7:",
      torus_rank(CharPoly.from_coeffs((7, 0, 1))).rank_estimate)
