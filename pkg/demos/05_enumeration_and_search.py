"""Exhaustive search over Butson classes, regularity, and Haar estimates.

Enumerates dephased root-of-unity Hadamard matrices at small orders,
matches the classes against the catalog, inspects regularity certificates,
and compares Monte Carlo Haar integrals with the unimodular bound.
"""

import cmath
import math
from fractions import Fraction

from qperm.hadamard import (
    bjorck_froberg,
    butson_enumerate,
    equivalent,
    f4q,
    fourier,
    i_g_estimate,
    is_regular,
    tensor,
)

print("== exhaustive enumeration ==")
for (n, l) in [(2, 2), (3, 3), (4, 2), (4, 4), (5, 2), (5, 4)]:
    res = butson_enumerate(n, l, mode="all_dephased_classes")
    print(f"H_{n}({l}): {len(res.matrices)} dephased class(es), "
          f"complete={res.complete}, {res.nodes} search nodes")

print()
print("== matching the order-4 level-4 classes ==")
res = butson_enumerate(4, 4, mode="all_dephased_classes")
pool = {
    "fourier(4)": fourier(4),
    "F2 x F2": tensor(fourier(2), fourier(2)),
    "f4q(1/4)": f4q(Fraction(1, 4)),
}
for idx, m in enumerate(res.matrices):
    hits = [name for name, c in pool.items() if equivalent(m, c)]
    print(f"class {idx}: equivalent to {hits}")

print()
print("== regularity ==")
rep = is_regular(fourier(4))
print(f"fourier(4): regular={rep.regular}, "
      f"{len(rep.certificates)} row-pair certificates")
rep = is_regular(bjorck_froberg())
print(f"bjorck_froberg(): regular={rep.regular}, "
      f"first failing row pair {rep.failing_pair}")
# a certificate lists, for one row pair, how the entrywise ratios resum
pair, cert = next(iter(is_regular(fourier(4)).certificates.items()))
print(f"sample certificate for rows {pair}: {cert}")

print()
print("== Haar integrals stay below the Hadamard bound ==")
q = cmath.exp(2j * math.pi / 5)
print("the bound n*sqrt(n) is attained only on rescaled Hadamard matrices")
for n in (3, 5):
    est = i_g_estimate("ORTHOGONAL", n, 6, samples=5000, seed=2)
    print(f"O({n}): (int ||u||_1^6)^(1/6) ~ {est.value:.4f} +- {est.stderr:.4f}"
          f"   bound {n * math.sqrt(n):.4f}")
