"""Matrix models: spin samples, word expectations, twists, closed forms.

Samples the 2x2-unitary magic model, compares Monte Carlo word
expectations with exact Weingarten integrals, block-diagonalizes magics
through the Klein-group Fourier twist, and checks the closed-form moments
of the free hypergeometric block-sum variable against the exact oracle.
"""

import numpy as np

from qperm.models import (
    free_hg_formula,
    free_hg_oracle,
    klein_fourier,
    model_word_expectation,
    pauli_magic,
    su2_sample,
)
from qperm.partitions import PartitionFamily, integrate_monomial
from qperm.quantum import check_magic, permutation_magic

NC = PartitionFamily.NONCROSSING

print("== spin model samples are magic ==")
worst = 0.0
for seed in range(25):
    rep = check_magic(pauli_magic(su2_sample(seed)), tol=1e-12)
    worst = max(worst, rep.projection, rep.row_sums)
print(f"25 samples, worst residual {worst:.2e}")

print()
print("== Monte Carlo vs exact Weingarten ==")
words = [[(1, 1)], [(1, 2), (2, 1)], [(1, 1), (2, 2)], [(2, 3), (3, 2), (2, 3)]]
for w in words:
    exact = integrate_monomial(NC, 4, tuple(i for i, _ in w),
                               tuple(j for _, j in w))
    est = model_word_expectation(w, samples=50_000, seed=11)
    print(f"word {str(w):28s} exact {str(exact):6s} "
          f"mc {est.value:+.5f} +- {est.stderr:.5f}")

print()
print("== Klein twist block structure ==")
grid = klein_fourier(pauli_magic(su2_sample(3)), tol=1e-10)
mass = np.array([[np.abs(grid[a, b]).sum() for b in range(3)]
                 for a in range(3)])
print("spin magic: twisted 3x3 grid of 4x4 blocks, block mass pattern:")
for row in mass:
    print("   " + "  ".join(f"{v:7.3f}" for v in row))
grid = klein_fourier(permutation_magic([1, 2, 3, 0]), tol=1e-10)
print(f"permutation magic: scalar blocks, shape {grid.shape}")

print()
print("== free hypergeometric moments ==")
print(" n  k   closed form        exact oracle")
for n in (3, 4):
    for k in range(1, 5):
        f = free_hg_formula(n, k)
        o = free_hg_oracle(n, n, n * n, k)
        print(f" {n}  {k}   {f:.12f}     {float(o):.12f}")
