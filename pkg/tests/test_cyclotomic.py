from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kforge.errors import DomainError
from kforge.cyclotomic import (
    GaloisElt,
    RootOfUnity,
    absolute_norm,
    conjugate,
    cyclotomic_polynomial,
    divide_into_subfield,
    elt_inverse,
    embed_up,
    galois_apply,
    get_field,
    is_in_real_subfield,
    minimal_polynomial,
    one_minus_root_inverse,
    relative_norm,
    restrict_down,
    tower_subgroup,
)
from kforge.exact_arith import euler_phi, factorize, ip_divmod_monic, ip_mul, ip_trim, poly_trim


def mobius(n):
    out = 1
    for _, k in factorize(n).items():
        if k > 1:
            return 0
        out = -out
    return out


def cyclotomic_oracle(m):
    """Independent construction: prod over d | m of (x^(m/d) - 1)^mu(d)."""
    num = (1,)
    den = (1,)
    for d in range(1, m + 1):
        if m % d:
            continue
        mu = mobius(d)
        f = tuple([-1] + [0] * (m // d - 1) + [1])
        if mu == 1:
            num = ip_mul(num, f)
        elif mu == -1:
            den = ip_mul(den, f)
    quo, rem = ip_divmod_monic(num, den)
    assert rem == ()
    return quo


class TestCyclotomicPolynomial:
    def test_small(self):
        assert cyclotomic_polynomial(1) == (-1, 1)
        assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
        assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)

    @pytest.mark.parametrize("m", list(range(1, 31)))
    def test_against_mobius_oracle(self, m):
        assert cyclotomic_polynomial(m) == cyclotomic_oracle(m)

    @pytest.mark.parametrize("m", [6, 15, 24, 35])
    def test_divisor_product(self, m):
        prod = (1,)
        for d in range(1, m + 1):
            if m % d == 0:
                prod = ip_mul(prod, cyclotomic_polynomial(d))
        assert prod == ip_trim([-1] + [0] * (m - 1) + [1])

    def test_zero_conductor_rejected(self):
        with pytest.raises(DomainError):
            cyclotomic_polynomial(0)


def rand_elt(field, draw_ints):
    return field.from_coeffs([Fraction(c, 1 + abs(d)) for c, d in draw_ints])


small_coeffs = st.lists(
    st.tuples(st.integers(-5, 5), st.integers(0, 3)), min_size=4, max_size=4
)


class TestEltArithmetic:
    def test_inverse_examples(self):
        f5 = get_field(5)
        assert elt_inverse(f5.root(1)) == f5.root(4)
        f3 = get_field(3)
        assert elt_inverse(f3.one + f3.root(1)) == -f3.root(1)
        with pytest.raises(DomainError, match="division by zero"):
            elt_inverse(f5.zero)

    @settings(max_examples=40, deadline=None)
    @given(small_coeffs)
    def test_inverse_round_trip(self, coeffs):
        f = get_field(5)
        x = rand_elt(f, coeffs)
        if x.is_zero():
            return
        assert x * elt_inverse(x) == f.one

    @settings(max_examples=40, deadline=None)
    @given(small_coeffs, small_coeffs)
    def test_field_axioms_sample(self, ca, cb):
        f = get_field(5)
        a, b = rand_elt(f, ca), rand_elt(f, cb)
        assert (a + b) - b == a
        assert a * b == b * a

    def test_closed_form_unity_inverse(self):
        for m in (5, 7, 12, 55):
            f = get_field(m)
            for k in (1, 2, m - 1):
                inv = one_minus_root_inverse(f, k)
                assert (f.one - f.root(k)) * inv == f.one


class TestGalois:
    def test_action_examples(self):
        f5 = get_field(5)
        assert galois_apply(GaloisElt(f5, 2), f5.root(1)) == f5.root(2)
        real = f5.root(1) + f5.root(-1)
        assert galois_apply(GaloisElt(f5, 4), real) == real

    def test_composition(self):
        f7 = get_field(7)
        x = f7.root(1)
        lhs = galois_apply(GaloisElt(f7, 3), galois_apply(GaloisElt(f7, 2), x))
        assert lhs == galois_apply(GaloisElt(f7, 6), x)

    def test_bad_residue_rejected(self):
        with pytest.raises(DomainError):
            GaloisElt(get_field(10), 5)

    @settings(max_examples=30, deadline=None)
    @given(small_coeffs, small_coeffs, st.sampled_from([1, 2, 3, 4]))
    def test_ring_homomorphism(self, ca, cb, a):
        f = get_field(5)
        x, y = rand_elt(f, ca), rand_elt(f, cb)
        s = GaloisElt(f, a)
        assert galois_apply(s, x + y) == galois_apply(s, x) + galois_apply(s, y)
        assert galois_apply(s, x * y) == galois_apply(s, x) * galois_apply(s, y)

    @settings(max_examples=30, deadline=None)
    @given(small_coeffs)
    def test_times_conjugate_is_real(self, ca):
        f = get_field(5)
        x = rand_elt(f, ca)
        assert is_in_real_subfield(x * conjugate(x))


class TestTower:
    def test_embed_examples(self):
        f5, f15 = get_field(5), get_field(15)
        assert embed_up(f5.root(1), 15) == f15.root(3)
        assert embed_up(f5.from_rational(Fraction(7, 3)), 15) == f15.from_rational(
            Fraction(7, 3)
        )
        prod = embed_up(get_field(3).root(1), 15) * embed_up(f5.root(1), 15)
        assert prod == f15.root(8)

    def test_embed_requires_divisibility(self):
        with pytest.raises(DomainError):
            embed_up(get_field(5).root(1), 12)

    def test_embed_associative(self):
        x = get_field(5).root(1) + get_field(5).from_rational(2)
        assert embed_up(embed_up(x, 15), 45) == embed_up(x, 45)

    def test_embed_commutes_with_galois(self):
        f5 = get_field(5)
        x = f5.root(1) + f5.root(2).scale(3)
        a = 2
        lift = 17  # 17 = 2 mod 5 and is a unit mod 15
        lhs = embed_up(galois_apply(GaloisElt(f5, a), x), 15)
        rhs = galois_apply(GaloisElt(get_field(15), lift % 15), embed_up(x, 15))
        assert lhs == rhs

    def test_restrict_round_trip(self):
        f5 = get_field(5)
        x = f5.root(1).scale(Fraction(2, 3)) + f5.from_rational(5)
        assert restrict_down(embed_up(x, 35), 5) == x

    def test_restrict_rejects_outsiders(self):
        f15 = get_field(15)
        with pytest.raises(DomainError):
            restrict_down(f15.root(1), 5)

    def test_divide_into_subfield(self):
        f5, f55 = get_field(5), get_field(55)
        y = f5.root(1) + f5.from_rational(3)
        mult = f55.root(7) + f55.from_rational(2)
        target = embed_up(y, 55) * mult
        assert divide_into_subfield(target, mult, 5) == y


class TestNorms:
    def test_relative_norm_full_group(self):
        f5 = get_field(5)
        H = [GaloisElt(f5, a) for a in f5.unit_group]
        x = f5.one - f5.root(1)
        assert relative_norm(x, H) == f5.from_rational(5)

    def test_rational_power(self):
        f5 = get_field(5)
        H = [GaloisElt(f5, 1), GaloisElt(f5, 4)]
        assert relative_norm(f5.from_rational(3), H) == f5.from_rational(9)

    def test_conjugate_pair(self):
        f5 = get_field(5)
        H = [GaloisElt(f5, 1), GaloisElt(f5, 4)]
        assert relative_norm(f5.root(1), H) == f5.one

    def test_subgroup_verified(self):
        f5 = get_field(5)
        with pytest.raises(DomainError, match="not a subgroup"):
            relative_norm(f5.root(1), [GaloisElt(f5, 1), GaloisElt(f5, 2)])

    def test_absolute_norm_examples(self):
        f5 = get_field(5)
        assert absolute_norm(f5.root(1)) == 1
        assert absolute_norm(f5.from_rational(2)) == 16
        golden = -(f5.root(2) + f5.root(3))
        assert absolute_norm(golden) == 1
        assert absolute_norm(f5.zero) == 0

    @settings(max_examples=25, deadline=None)
    @given(small_coeffs, small_coeffs)
    def test_norm_multiplicative(self, ca, cb):
        f = get_field(5)
        x, y = rand_elt(f, ca), rand_elt(f, cb)
        assert absolute_norm(x * y) == absolute_norm(x) * absolute_norm(y)

    @settings(max_examples=20, deadline=None)
    @given(small_coeffs)
    def test_relative_equals_absolute_over_full_group(self, ca):
        f = get_field(5)
        x = rand_elt(f, ca)
        H = [GaloisElt(f, a) for a in f.unit_group]
        assert relative_norm(x, H) == f.from_rational(absolute_norm(x))

    def test_tower_subgroup(self):
        f15 = get_field(15)
        H = tower_subgroup(f15, 5)
        assert sorted(h.a for h in H) == [1, 11]


class TestMinimalPolynomial:
    def test_examples(self):
        f3 = get_field(3)
        assert minimal_polynomial(f3.root(1)) == poly_trim([1, 1, 1])
        f5 = get_field(5)
        golden = -(f5.root(2) + f5.root(3))
        assert minimal_polynomial(golden) == poly_trim([-1, -1, 1])
        assert minimal_polynomial(f5.from_rational(Fraction(3, 2))) == poly_trim(
            [Fraction(-3, 2), 1]
        )

    @settings(max_examples=20, deadline=None)
    @given(small_coeffs)
    def test_annihilates(self, ca):
        f = get_field(5)
        x = rand_elt(f, ca)
        mp = minimal_polynomial(x)
        acc = f.zero
        for c in reversed(mp):
            acc = acc * x + f.from_rational(c)
        assert acc.is_zero()


class TestRootOfUnity:
    def test_canonicalization(self):
        assert RootOfUnity(15, 5).canonical() == RootOfUnity(3, 1)
        assert RootOfUnity(15, 0).canonical() == RootOfUnity(1, 0)

    def test_times_and_inverse(self):
        z3, z5 = RootOfUnity(3, 1), RootOfUnity(5, 1)
        assert z3.times(z5) == RootOfUnity(15, 8)
        assert z5.times(z5.inverse()) == RootOfUnity(1, 0)

    def test_as_elt(self):
        f15 = get_field(15)
        assert RootOfUnity(5, 1).as_elt(f15) == f15.root(3)


def test_field_cache_identity():
    assert get_field(35) is get_field(35)
    assert euler_phi(35) == get_field(35).phi
