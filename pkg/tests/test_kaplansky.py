import pytest

from finhom import Integers, IntegersModN, Matrix
from finhom.complexes import (
    ChainComplex,
    ChainMap,
    cycles,
    disk,
    is_exact,
    sphere,
)
from finhom.cotorsion import ObjectClass
from finhom.errors import NotInClassError
from finhom.kaplansky import (
    KaplanskyConfig,
    FiltrationChain,
    find_small_surjecting_sub,
    flat_subcomplex_envelope,
    icell_decompose,
    kaplansky_filtration,
    kaplansky_witness,
)
from finhom.modules import FpModule, ModuleMap, element_in_submodule, submodule

ZZ = Integers()
Z6 = IntegersModN(6)
CFG = KaplanskyConfig(gamma=3, step_budget=64)
PROJ = ObjectClass(ObjectClass.PROJECTIVE)
FLAT = ObjectClass(ObjectClass.FLAT)


def test_find_small_surjecting_sub():
    # Z^2 ->> Z/2 by (x, y) -> x mod 2: first summand suffices
    Z2 = FpModule.free(ZZ, 2)
    tgt = FpModule.cyclic(ZZ, 2)
    g = ModuleMap(Z2, tgt, Matrix.from_rows(ZZ, [[1, 0]]))
    S, incl = find_small_surjecting_sub(g, 1)
    assert S.gens == 1
    assert g.compose(incl).is_epi()

    # iso: the sub is everything
    iso = ModuleMap(Z2, Z2, Matrix.identity(ZZ, 2))
    S2, incl2 = find_small_surjecting_sub(iso, 2)
    assert incl2.compose(ModuleMap.identity(S2)).is_mono()
    assert iso.compose(incl2).is_epi()

    # Z ->> Z/6
    g3 = ModuleMap(FpModule.free(ZZ, 1), FpModule.cyclic(ZZ, 6),
                   Matrix.from_rows(ZZ, [[1]]))
    S3, incl3 = find_small_surjecting_sub(g3, 1)
    assert g3.compose(incl3).is_epi()


def test_kaplansky_witness_saturation():
    # F = Z^3, X spanned by (2, 3, 0): the vector is primitive, so the
    # witness is a rank-1 free summand with free quotient Z^2
    F = FpModule.free(ZZ, 3)
    X = Matrix.from_rows(ZZ, [[2], [3], [0]])
    w = kaplansky_witness(F, PROJ, X, CFG)
    assert w.sub.invariant_factors() == (0,)
    assert w.quotient_module.invariant_factors() == (0, 0)
    assert w.revalidate(PROJ)
    assert element_in_submodule(F, w.inclusion.matrix, [2, 3, 0]) is not None

    # X = F: witness is everything
    w2 = kaplansky_witness(F, PROJ, Matrix.identity(ZZ, 3), CFG)
    assert w2.sub.invariant_factors() == (0, 0, 0)
    assert w2.quotient_module.is_zero_module()

    # non-primitive seed: saturation strictly contains it
    w3 = kaplansky_witness(FpModule.free(ZZ, 1), PROJ,
                           Matrix.from_rows(ZZ, [[2]]), CFG)
    assert w3.sub.invariant_factors() == (0,)
    assert w3.quotient_module.is_zero_module()  # saturation of 2Z in Z is Z


def test_kaplansky_witness_finite_ring():
    F = FpModule.free(Z6, 1)  # Z/6 over itself
    X = Matrix.from_rows(Z6, [[3]])  # the subgroup {0, 3}
    w = kaplansky_witness(F, FLAT, X, CFG)
    assert w.revalidate(FLAT)
    # seed must be inside
    assert element_in_submodule(F, w.inclusion.matrix, [3]) is not None

    # nonzero requirement with zero seed
    w2 = kaplansky_witness(F, FLAT, Matrix.zero(Z6, 1, 0), CFG)
    assert not w2.sub.is_zero_module()

    # over Z/4 the module Z/2 is not injective: no witness possible
    Z4 = IntegersModN(4)
    with pytest.raises(NotInClassError):
        kaplansky_witness(FpModule.cyclic(Z4, 2), ObjectClass(ObjectClass.INJECTIVE),
                          Matrix.zero(Z4, 1, 0), CFG)


def test_kaplansky_filtration():
    # 0 -> Z^2 with projective class and gamma 1: coordinate filtration
    B = FpModule.free(ZZ, 2)
    zero_incl = ModuleMap(FpModule.zero(ZZ), B, Matrix.zero(ZZ, 2, 0), check=False)
    chain = kaplansky_filtration(zero_incl, PROJ, KaplanskyConfig(gamma=1, step_budget=8))
    assert chain.complete
    assert len(chain.steps) >= 1
    assert chain.revalidate(gamma=2)

    # A = B: length zero
    ident = ModuleMap.identity(B)
    chain2 = kaplansky_filtration(ident, PROJ, CFG)
    assert chain2.complete and len(chain2.steps) == 0

    # over Z/6: single step for the free rank-1 module
    B6 = FpModule.free(Z6, 1)
    z6 = ModuleMap(FpModule.zero(Z6), B6, Matrix.zero(Z6, 1, 0), check=False)
    chain3 = kaplansky_filtration(z6, FLAT, KaplanskyConfig(gamma=1, step_budget=8))
    assert chain3.complete
    assert len(chain3.steps) == 1


def test_flat_subcomplex_envelope_seeded():
    # F = D^1(Z^2), X = the degree-0 submodule Z(1,0)
    F = disk(1, FpModule.free(ZZ, 2))
    seed = {0: Matrix.from_rows(ZZ, [[1], [0]])}
    res = flat_subcomplex_envelope(F, seed, PROJ, CFG)
    S = res.subcomplex
    assert is_exact(S)
    assert res.inclusion.is_mono()
    # S contains the seed
    got = element_in_submodule(F.module_at(0), res.inclusion.component_at(0).matrix,
                               [1, 0])
    assert got is not None
    for n in S.support:
        Zs, _ = cycles(S, n)
        assert PROJ.contains(Zs)


def test_flat_subcomplex_envelope_nonzero_requirement():
    F = disk(0, FpModule.free(ZZ, 1))
    res = flat_subcomplex_envelope(F, {}, PROJ, CFG)
    assert not res.subcomplex.is_zero_complex()

    # X = F: envelope is everything
    full = {n: Matrix.identity(ZZ, F.module_at(n).gens) for n in F.support}
    res2 = flat_subcomplex_envelope(F, full, PROJ, CFG)
    for n in F.support:
        assert res2.subcomplex.module_at(n).invariant_factors() == \
            F.module_at(n).invariant_factors()


def test_icell_single_generating_mono():
    # 0 -> S^0(Z) is itself a single sphere-into-disk style cell chain
    R1 = FpModule.free(ZZ, 1)
    f = ChainMap.zero_map(ChainComplex.zero(ZZ), sphere(0, R1))
    chain = icell_decompose(f)
    assert len(chain.cells) == 1
    assert chain.verify()


def test_icell_disk_sum_two_cells():
    target = ChainComplex.direct_sum(disk(1, FpModule.free(ZZ, 1)),
                                     disk(0, FpModule.free(ZZ, 1)))
    f = ChainMap.zero_map(ChainComplex.zero(ZZ), target)
    chain = icell_decompose(f)
    assert len(chain.cells) == 2
    assert chain.verify()
    labels = sorted(c.label for c in chain.cells)
    assert all("D^" in lab for lab in labels)


def test_icell_generic_slices():
    # S^0(Z) included in degree 0 of the two-step complex Z --2--> Z;
    # the cokernel is S^1(Z), one genuine twisted cell
    Z1 = FpModule.free(ZZ, 1)
    Q = ChainComplex(ZZ, {1: Z1, 0: Z1},
                     {1: ModuleMap(Z1, Z1, Matrix.from_rows(ZZ, [[2]]))})
    X = sphere(0, Z1)
    f = ChainMap(X, Q, {0: ModuleMap.identity(Z1)})
    chain = icell_decompose(f)
    assert len(chain.cells) == 1
    assert chain.verify()
    comp = chain.compose()
    for n in X.support:
        assert comp.component_at(n).matrix == f.component_at(n).matrix

    # and the full cofibrant-replacement shape: 0 -> (Z --2--> Z)
    f2 = ChainMap.zero_map(ChainComplex.zero(ZZ), Q)
    chain2 = icell_decompose(f2)
    assert chain2.verify()
    assert len(chain2.cells) == 2
