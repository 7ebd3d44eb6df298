"""Tour of the Hadamard catalog: construction, verification, classification.

Builds the named matrices, checks the defining relations, dephases, reads
off levels and fingerprints, and prints the small existence table.
"""

import math
from fractions import Fraction

from qperm.hadamard import (
    LEVEL_INFINITE,
    bjorck_froberg,
    dephase,
    equivalent,
    f4q,
    fingerprint,
    fourier,
    haagerup,
    level,
    obstruction_table,
    random_equivalent,
    tao,
    tensor,
)

catalog = {
    "fourier(2)": fourier(2),
    "fourier(6)": fourier(6),
    "tao()": tao(),
    "haagerup(1/4)": haagerup(Fraction(1, 4)),
    "bjorck_froberg()": bjorck_froberg(),
    "f4q(1/7)": f4q(Fraction(1, 7)),
    "F2 x F3": tensor(fourier(2), fourier(3)),
}

print("== catalog ==")
for name, h in catalog.items():
    lev = level(h)
    lev_str = "infinite" if lev == LEVEL_INFINITE else str(lev)
    print(f"{name:18s} n={h.n}  exact={h.is_exact}  verified={h.verify()}  "
          f"level={lev_str}")

print()
print("== equivalence ==")
h = tao()
moved = random_equivalent(h, seed=5)
print("tao vs shuffled tao:     ", equivalent(h, moved))
print("tao vs fourier(6):       ", equivalent(h, fourier(6)))
print("fingerprints separate them:",
      fingerprint(h) != fingerprint(fourier(6)))

# F4 is not a tensor square of F2, even though both live at order 4
print("fourier(4) ~ F2 x F2:    ",
      equivalent(fourier(4), tensor(fourier(2), fourier(2))))

print()
print("== existence table (order x level) ==")
grid = obstruction_table(6, 6)
header = "      " + "".join(f"l={l}   " for l in range(2, 7))
print(header)
for row in grid:
    cells = []
    for c in row:
        mark = "yes " if c.outcome == "exists" else "no  "
        cells.append(mark + "  ")
    print(f"n={row[0].n}   " + "".join(cells))
print()
print("every 'no' above carries a named obstruction, for example:")
for row in grid:
    for c in row:
        if c.outcome == "obstructed":
            print(f"  ({c.n},{c.level}): {c.rule}")
            break
    else:
        continue
    break

# the unimodular 1-norm bound, saturated exactly by Hadamard rescalings
from qperm.hadamard import one_norm

print()
print("== 1-norm saturation ==")
for name in ("fourier(5)", "tao()"):
    h = catalog.get(name) or fourier(5)
    u = h.entries / math.sqrt(h.n)
    print(f"{name:12s} one_norm(U) = {one_norm(u):.6f}   "
          f"n*sqrt(n) = {h.n * math.sqrt(h.n):.6f}")
