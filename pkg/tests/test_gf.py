import pytest
from hypothesis import given
from hypothesis import strategies as st

from supersingular import gf
from supersingular.oracles import oracle_modulus

FIELDS = [(3, 1), (3, 2), (3, 4), (5, 2), (7, 2), (5, 3)]


@pytest.mark.parametrize("p,m", sorted(gf.MODULI))
def test_frozen_moduli_follow_the_minimal_code_rule(p, m):
    assert gf.MODULI[(p, m)] == oracle_modulus(p, m)
    assert gf.find_modulus(p, m) == gf.MODULI[(p, m)]


def test_f9_modulus_is_t_squared_plus_one():
    F = gf.field(3, 2)
    t = F.from_coeffs((0, 1))
    assert F.mul(t, t) == F.from_int(-1)


@pytest.mark.parametrize("p,m", FIELDS)
def test_frobenius_has_order_m_and_fixes_prime_field(p, m):
    F = gf.field(p, m)
    assert all(F.frobenius(a, m) == a for a in range(F.q))
    fixed = [a for a in range(F.q) if F.frobenius(a) == a]
    assert fixed == [F.from_int(k) for k in range(p)] or sorted(fixed) == sorted(
        F.from_int(k) for k in range(p))
    if m > 1:
        assert any(F.frobenius(a, d) != a for a in range(F.q) for d in range(1, m))


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms(p, m):
    F = gf.field(p, m)

    @given(st.integers(0, F.q - 1), st.integers(0, F.q - 1), st.integers(0, F.q - 1))
    def check(a, b, c):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.add(a, F.neg(a)) == 0
        assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
        assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
        if a:
            assert F.mul(a, F.inv(a)) == 1

    check()


def test_large_field_without_tables():
    F = gf.field(3, 7)                      # q = 2187, above the table limit
    a = F.from_coeffs((1, 2, 0, 1, 0, 0, 1))
    assert F.mul(a, F.inv(a)) == 1
    assert F.pow(a, F.q - 1) == 1
    assert F.frobenius(a, 7) == a


def test_squares_and_primes():
    assert gf.is_prime(7) and not gf.is_prime(9) and not gf.is_prime(1)
    F = gf.field(5)
    assert {a for a in range(1, 5) if F.is_square(a)} == {1, 4}
