"""A curve and its quadratic twist only agree after squaring Frobenius.

Run with ``python3 demos/twist_needs_squares.py``.
"""

from frobsys.frobpoly import power_charpoly
from frobsys.numfield import QQ
from frobsys.systems import System, check_system, quasi_compatible_at
from frobsys.ingest import build_curve_sheet

curve = build_curve_sheet(2, 3, 60, label="E")
twist = build_curve_sheet(2, 3, 60, label="E_d", twist=True)

for pl in ("7", "13", "17", "19"):
    P, Q = curve.entries[pl].sample.P, twist.entries[pl].sample.P
    N = quasi_compatible_at(curve, twist, pl, 10)
    print(f"p={pl:>2}  {str(P.poly):<18} vs {str(Q.poly):<18} level {N}")
    print(f"      squares: {power_charpoly(P, 2).poly}  ==  {power_charpoly(Q, 2).poly}")

report = check_system(System(QQ, (curve, twist)))
levels = sorted({v.level for v in report.cells.values() if not v.excluded})
print("\nlevels seen:", levels, " strong:", report.strong_quasi_compatible)
