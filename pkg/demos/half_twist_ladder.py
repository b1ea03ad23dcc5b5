"""Lowering the level of a rank-one Hodge type by half-twists.

Run with ``python3 demos/half_twist_ladder.py``.
"""

from frobsys.cmhodge import (find_compatible_cm_type, half_twist, half_twist_ladder,
                             hodge_type_from_slots, level, parse_cycles, upper_set)

F = parse_cycles("(0 3)(1 4)(2 5)")       # a sextic CM field, three conjugate pairs
V = hodge_type_from_slots(F, {0: (3, 0), 3: (0, 3), 1: (2, 1), 4: (1, 2), 2: (0, 3), 5: (3, 0)})
print("V:", V, "| weight", V.weight, "level", level(V), "T =", sorted(upper_set(V)))

phi = find_compatible_cm_type(V)
print("least CM type avoiding T:", phi)
W = half_twist(V, phi)
print("one step:", W, "| weight", W.weight, "level", level(W))

print("\nfull ladder")
for i, step in enumerate(half_twist_ladder(V), 1):
    rule = "" if step.strict else "  (top-set rule)"
    print(f"{i}: phi={step.phi}  ->  {step.result}   level {level(step.result)}{rule}")

# Even weight with a middle slot: T meets its conjugate, so the ladder
# uses CM types that only avoid the top slots.
M = hodge_type_from_slots(parse_cycles("(0 2)(1 3)"), {0: (2, 0), 2: (0, 2), 1: (1, 1), 3: (1, 1)})
print("\nmiddle-slot example:", M)
for step in half_twist_ladder(M):
    print("  ", step.phi, "->", step.result, "strict" if step.strict else "top-set rule")
