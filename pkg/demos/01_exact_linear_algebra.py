"""Exact linear algebra over Z, Z/n and F_p.

Everything in the library reduces to three kernels: Smith normal form,
linear solving, and kernel bases -- all with exact arbitrary-precision
arithmetic, never floating point.
"""

from finhom import Integers, IntegersModN, Matrix, PrimeField, kernel_basis, snf, solve_linear
from finhom.smith import invariant_factors_of

ZZ = Integers()

print("== Smith normal form over the integers ==")
A = Matrix.from_rows(ZZ, [[2, 4], [6, 8]])
form = snf(A)
print("A =", A)
print("D =", form.D, " (U A V = D, divisibility chain on the diagonal)")
print("check U*A*V == D:", form.U * A * form.V == form.D)

# the classical invariant-factor oracle: d1 = gcd of entries,
# d1*d2 = gcd of 2x2 minors
print("diagonal:", form.diagonal)

print("\n== Solving linear systems exactly ==")
print("2x = 4 over Z:", solve_linear(Matrix.from_rows(ZZ, [[2]]),
                                      Matrix.column(ZZ, [4])))
print("2x = 3 over Z:", solve_linear(Matrix.from_rows(ZZ, [[2]]),
                                     Matrix.column(ZZ, [3])), " (no solution)")

Z6 = IntegersModN(6)
print("2x = 4 over Z/6:", solve_linear(Matrix.from_rows(Z6, [[2]]),
                                       Matrix.column(Z6, [4])),
      " (deterministic choice among {2, 5})")

print("\n== Kernels ==")
K = kernel_basis(Matrix.from_rows(ZZ, [[1, 1]]))
print("kernel of [1 1] over Z is spanned by", K.col(0))

F3 = PrimeField(3)
K3 = kernel_basis(Matrix.from_rows(F3, [[1, 2], [2, 4]]))
print("kernel of a rank-1 matrix over F_3 has", K3.cols, "generator(s)")

print("\n== Invariant factors of a cokernel ==")
print("coker diag(1, 6):", invariant_factors_of(Matrix.from_rows(ZZ, [[1, 0], [0, 6]])),
      " (the unit factor is dropped: the module is Z/6)")
print("coker of the empty presentation on 2 generators:",
      invariant_factors_of(Matrix.zero(ZZ, 2, 0)), " (free of rank 2)")
