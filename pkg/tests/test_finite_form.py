import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supersingular.errors import CapExceeded, FormError
from supersingular.finite_form import (
    FiniteQuadraticSpace, Generatrix, Subspace, artin_invariant_of_generatrix, chain_vector,
    enumerate_generatrices, frobenius_image, is_characteristic, is_neutral, is_nondegenerate,
    is_strictly_characteristic, is_totally_isotropic, parse_gram, rational_part, zero_subspace,
)
from supersingular.lattice import artin_invariant, dual_quotient_form, overlattice_from_glue, parse_lattice
from supersingular.oracles import gen_census, iso_subspaces

T, MT = 3, 6                      # t and -t in F_9 = F_3[t]/(t^2 + 1)
PLANE = FiniteQuadraticSpace(3, ((1, 0), (0, 1)))
HYP3 = FiniteQuadraticSpace(3, ((0, 1), (1, 0)))
TOY_LATTICE = parse_lattice("sum(twist(U,3),A2(-1),A2(-1))")
SIGMA2 = dual_quotient_form(TOY_LATTICE, 3)


def coeff_rows(G):
    F = G.field
    return tuple(tuple(F.coeffs(x) for x in row) for row in G.rows)


def test_sigma2_ambient_is_the_non_neutral_toy():
    assert SIGMA2.dim == 4 and is_nondegenerate(SIGMA2) and not is_neutral(SIGMA2)


def test_nondegeneracy_and_neutrality_examples():
    assert is_nondegenerate(PLANE)
    assert not is_nondegenerate(FiniteQuadraticSpace(3, ((1, 0), (0, 0))))
    assert is_nondegenerate(FiniteQuadraticSpace(5, ((0, 1), (1, 0))))
    assert is_neutral(HYP3)
    assert not is_neutral(PLANE)
    assert is_neutral(FiniteQuadraticSpace(5, ((1, 0), (0, 1))))
    with pytest.raises(FormError):
        is_neutral(FiniteQuadraticSpace(3, ((1,),)))
    with pytest.raises(FormError):
        is_neutral(FiniteQuadraticSpace(3, ((1, 0), (0, 0))))


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [2, 4])
def test_neutrality_matches_search_on_every_diagonal_form(p, n):
    for diag in itertools.product(range(1, p), repeat=n):
        gram = tuple(tuple(diag[i] if i == j else 0 for j in range(n)) for i in range(n))
        V = FiniteQuadraticSpace(p, gram)
        assert is_neutral(V, cross_check=False) == bool(iso_subspaces(p, gram, first_only=True))


def test_frobenius_examples():
    G = Subspace.span(PLANE, 2, [(T, 1)])
    assert frobenius_image(G) == Subspace.span(PLANE, 2, [(MT, 1)])
    assert frobenius_image(frobenius_image(G)) == G
    R = Subspace.span(PLANE, 2, [(1, 2)])
    assert frobenius_image(R) == R


def test_isotropy_and_characteristic_examples():
    G = Generatrix.of(Subspace.span(PLANE, 2, [(1, MT)]))
    assert is_totally_isotropic(Subspace.span(PLANE, 2, [(T, 1)]))
    assert not is_totally_isotropic(Subspace.span(PLANE, 1, [(1, 0)]))
    assert is_totally_isotropic(zero_subspace(PLANE))
    assert is_characteristic(G) and is_strictly_characteristic(G)
    assert not is_characteristic(Subspace.span(PLANE, 1, [(1, 0)]))
    assert not is_characteristic(Subspace.span(HYP3, 1, [(1, 0)]))
    with pytest.raises(FormError):
        is_characteristic(zero_subspace(PLANE, 2))


def test_census_examples():
    assert enumerate_generatrices(PLANE, 1) == []
    chars = enumerate_generatrices(PLANE, 2)
    assert [g.rows for g in chars] == [((1, T),), ((1, MT),)]
    assert len(enumerate_generatrices(HYP3, 1, "isotropic")) == 2
    assert enumerate_generatrices(HYP3, 1, "characteristic") == []
    with pytest.raises(FormError):
        enumerate_generatrices(PLANE, 2, "bogus")
    with pytest.raises(CapExceeded):
        enumerate_generatrices(SIGMA2, 4, cap=1000)


@pytest.mark.parametrize("space,m", [(PLANE, 2), (HYP3, 1), (HYP3, 2), (SIGMA2, 1), (SIGMA2, 2),
                                     (FiniteQuadraticSpace(5, ((1, 0), (0, 2))), 2)])
def test_census_matches_oracle(space, m):
    census = gen_census(space.p, m, space.gram)
    for flt in ("isotropic", "characteristic", "strict"):
        got = sorted(coeff_rows(G) for G in enumerate_generatrices(space, m, flt))
        assert got == census[flt], flt


def test_sigma2_counts_and_witness():
    chars2 = enumerate_generatrices(SIGMA2, 2)
    assert len(chars2) == 20
    assert enumerate_generatrices(SIGMA2, 2, "strict") == []
    witness = chars2[0]
    assert is_characteristic(witness) and not is_strictly_characteristic(witness)
    chars4 = enumerate_generatrices(SIGMA2, 4)
    strict4 = enumerate_generatrices(SIGMA2, 4, "strict")
    assert (len(chars4), len(strict4)) == (164, 144)


def test_rational_part_and_artin_invariant():
    G = Subspace.span(PLANE, 2, [(1, MT)])
    assert rational_part(G).dim == 0
    assert artin_invariant_of_generatrix(G) == 1
    R = Subspace.span(HYP3, 1, [(1, 0)])
    assert rational_part(R) == R
    with pytest.raises(FormError):
        artin_invariant_of_generatrix(R)
    for W in enumerate_generatrices(SIGMA2, 2):
        lam = rational_part(W)
        assert lam.dim == 1 and artin_invariant_of_generatrix(W) == 1
        # gluing the rational line drops the lattice's invariant to the generatrix's
        glue = Subspace(SIGMA2, 1, lam.rows)
        assert artin_invariant(overlattice_from_glue(TOY_LATTICE, 3, glue), 3) == 1


def test_chain_examples():
    G = Subspace.span(PLANE, 2, [(1, MT)])
    c = chain_vector(G)
    assert c.x0 == (1, MT) and c.vectors == ((1, MT), (1, T))
    assert c.pairing == ((2,),) and c.is_basis and c.pairing_ok
    with pytest.raises(FormError):
        chain_vector(enumerate_generatrices(SIGMA2, 2)[0])


CENSUS_SPACES = [(PLANE, 2), (FiniteQuadraticSpace(5, ((1, 0), (0, 2))), 2),
                 (FiniteQuadraticSpace(7, ((1, 0), (0, 1))), 2), (SIGMA2, 2), (SIGMA2, 4)]


@pytest.mark.parametrize("space,m", CENSUS_SPACES)
def test_census_invariants(space, m):
    sigma = space.dim // 2
    for flt in ("isotropic", "characteristic", "strict"):
        out = enumerate_generatrices(space, m, flt)
        assert {frobenius_image(G) for G in out} == set(out)
        assert out == sorted(out)
    for G in enumerate_generatrices(space, m):
        phiG = frobenius_image(G)
        assert not G.is_rational()
        assert phiG.is_totally_isotropic()
        assert G.meet(phiG).dim == sigma - 1
        lam = rational_part(G)
        assert lam.is_totally_isotropic() and frobenius_image(lam) == lam
        assert lam.dim + artin_invariant_of_generatrix(G) == sigma
    for G in enumerate_generatrices(space, m, "strict"):
        c = chain_vector(G)
        assert c.is_basis and c.pairing_ok


@settings(max_examples=30)
@given(st.sampled_from([(PLANE, 2), (SIGMA2, 2), (SIGMA2, 1), (HYP3, 2)]), st.data())
def test_rational_generatrices_are_never_characteristic(case, data):
    space, m = case
    iso = enumerate_generatrices(space, m, "isotropic")
    rational = [G for G in iso if G.is_rational()]
    if rational:
        G = data.draw(st.sampled_from(rational))
        assert not is_characteristic(G)


def test_gram_parsing_and_validation():
    assert parse_gram("1,0;0,1") == ((1, 0), (0, 1))
    with pytest.raises(Exception):
        FiniteQuadraticSpace(3, ((1, 2), (0, 1)))
    with pytest.raises(Exception):
        FiniteQuadraticSpace(4, ((1,),))


def test_workers_do_not_change_enumeration():
    assert enumerate_generatrices(SIGMA2, 4, workers=3) == enumerate_generatrices(SIGMA2, 4)
