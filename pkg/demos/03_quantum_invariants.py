"""Quantum invariants of complex Hadamard matrices.

Every Hadamard matrix yields a magic unitary (a grid of rank-one
projections with magic row and column sums).  Its tensor-power
fixed-point dimensions c_k are equivalence invariants, computed here by
two independent routes and compared across the catalog.
"""

import cmath
import math
from fractions import Fraction

from qperm.hadamard import fourier, haagerup, tao, tensor
from qperm.quantum import (
    check_magic,
    fix_dim_direct,
    hom_dim_via_g,
    image_commutative,
    invariants,
    magic_from_hadamard,
    orbit_components,
    poincare_series,
)

print("== the magic unitary of a Hadamard matrix ==")
u = magic_from_hadamard(fourier(3))
rep = check_magic(u)
print(f"fourier(3): exact={rep.exact}  ok={rep.ok}  "
      f"worst residual={max(rep.projection, rep.row_sums):.1e}")

print()
print("== invariant series, two routes each ==")
for name, h in [("fourier(2)", fourier(2)),
                ("fourier(4)", fourier(4)),
                ("F2 x F3", tensor(fourier(2), fourier(3))),
                ("tao()", tao()),
                ("haagerup(1/4)", haagerup(Fraction(1, 4)))]:
    s = invariants(h, 3, method="both")
    print(f"{name:14s} c_0..c_3 = {s.values}")

# Fourier matrices follow an exact power law; the deformations break it
print()
print("Fourier power law: c_k(F_n) = n^(k-1)")
for n in (2, 3, 5):
    s = invariants(fourier(n), 3, method="direct")
    print(f"  n={n}: {s.values[1:]} vs {tuple(n ** (k - 1) for k in (1, 2, 3))}")

print()
print("== hom spaces and arithmetic paths ==")
h = haagerup(cmath.exp(2j * math.pi * 0.25))   # float twin of the exact run
for k in (1, 2):
    d_exact = fix_dim_direct(haagerup(Fraction(1, 4)), k)
    d_float = fix_dim_direct(h, k)
    d_hom = hom_dim_via_g(h, 0, k)
    print(f"k={k}: exact {d_exact}, float {d_float}, via G-chain {d_hom}")

print()
print("== structure probes ==")
print("orbit components, tao:      ",
      orbit_components(magic_from_hadamard(tao())))
print("image commutative, fourier: ", image_commutative(fourier(5)))
print("image commutative, tao:     ", image_commutative(tao()))
s = invariants(fourier(3), 4, method="direct")
print("poincare series of F_3:     ", poincare_series(s))
