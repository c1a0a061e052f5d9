"""Finitely presented modules and their homological functors.

A module is the cokernel of a relation matrix; maps are matrices on
generators carrying relations into relations.  Ext and Tor come from
syzygy resolutions; projectivity, flatness and injectivity are decided
by explicit splittings.
"""

from finhom import Integers, IntegersModN, Matrix
from finhom.functors import (
    ext_n,
    free_resolution,
    is_flat,
    is_injective,
    is_projective,
    lift_through,
    tensor_modules,
    tor_n,
)
from finhom.modules import FpModule, ModuleMap, ShortExactSeq

ZZ = Integers()
Z6 = IntegersModN(6)
Z4 = IntegersModN(4)

print("== Modules and resolutions ==")
M = FpModule.cyclic(ZZ, 2)          # Z/2 over the integers
res = free_resolution(M, 3)
print("resolution of Z/2 over Z:",
      " -> ".join(f"R^{m.source.gens}" for m in reversed(res)), "-> Z/2")
print("  (stops after one step: Z is hereditary)")

P = FpModule.cyclic(Z4, 2)          # Z/2 over Z/4: periodic resolutions
res4 = free_resolution(P, 4)
print("resolution of Z/2 over Z/4 is periodic:",
      [m.matrix.entries for m in res4[1:]])

print("\n== Ext and Tor ==")
print("Ext^1_Z(Z/2, Z)      =", ext_n(FpModule.cyclic(ZZ, 2), FpModule.free(ZZ, 1), 1))
print("Tor_1^Z(Z/4, Z/6)    =", tor_n(FpModule.cyclic(ZZ, 4), FpModule.cyclic(ZZ, 6), 1))
print("Z/4 (x) Z/6          =", tensor_modules(FpModule.cyclic(ZZ, 4), FpModule.cyclic(ZZ, 6)))
print("Ext^1_{Z/6}(Z/2, Z/3) =", ext_n(FpModule.cyclic(Z6, 2), FpModule.cyclic(Z6, 3), 1),
      " (Z/6 is semisimple: all Ext vanish)")

print("\n== Class predicates ==")
print("Z^2 projective over Z:     ", is_projective(FpModule.free(ZZ, 2)))
print("Z/2 projective over Z:     ", is_projective(FpModule.cyclic(ZZ, 2)))
print("Z/2 projective over Z/6:   ", is_projective(FpModule.cyclic(Z6, 2)),
      " (a direct summand: Z/6 = Z/2 x Z/3)")
print("Z/3 flat over Z/6:         ", is_flat(FpModule.cyclic(Z6, 3)))
print("Z/4 injective over Z/4:    ", is_injective(FpModule.free(Z4, 1)))
print("Z/2 injective over Z/4:    ", is_injective(FpModule.cyclic(Z4, 2)))

print("\n== The vanishing-Ext lift ==")
# rows A -> B -> C and K -> L -> M over Z/6, a commuting square (f, g):
# since Ext^1(C, K) = 0, a diagonal through the middle exists and is
# constructed explicitly (pullback, cokernel, splitting, projection)
B = FpModule.free(Z6, 1)
row = ShortExactSeq.from_submodule(B, Matrix.from_rows(Z6, [[2]]))
h = lift_through(row.i, row.p, row, row)
print("lift of the tautological square on Z/3 -> Z/6 -> Z/2:",
      h.matrix, " (the identity)")
