import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecgroups.errors import PreconditionError
from ecgroups.sieve import (
    DiscrepancyQuery,
    RhoSpec,
    SieveInstance,
    T_sum,
    character,
    euler_product,
    fundamental_discriminant,
    l1_reference,
    legendre_identity_count,
    psi_discrepancy,
    rho,
    sieve_main_term,
    sieve_survivors,
    theorem_ratios,
)

from oracles import brute_roots, brute_T, eratosthenes, euler_legendre, von_mangoldt_table

PRIMES_1E4 = np.flatnonzero(eratosthenes(10**4)).tolist()


def _squarefree(n):
    return all(n % (p * p) for p in range(2, math.isqrt(n) + 1))


@pytest.mark.parametrize("k, j, d, expected", [(1, 0, 2, 1), (1, 0, 3, 0), (2, 1, 5, 0), (1, 1, 2, 0)])
def test_rho_examples(k, j, d, expected):
    assert rho(RhoSpec(k, j), d) == expected
    assert rho(RhoSpec(k, j), d, "brute") == expected


def test_rho_formula_matches_brute_force():
    for k in range(1, 31):
        for j in range(-10, 11):
            spec = RhoSpec(k, j)
            for d in range(1, 51):
                assert rho(spec, d) == brute_roots(k, j, d), (k, j, d)
                if _squarefree(d):
                    assert rho(spec, d, "formula") == brute_roots(k, j, d), (k, j, d)


def test_rho_formula_path_rejects_non_squarefree():
    with pytest.raises(PreconditionError):
        rho(RhoSpec(1, 0), 12, "formula")
    with pytest.raises(PreconditionError):
        rho(RhoSpec(1, 0), 0)


@settings(max_examples=300)
@given(st.integers(1, 20), st.integers(-8, 8), st.integers(1, 1000), st.integers(1, 1000))
def test_rho_multiplicative(k, j, d1, d2):
    if math.gcd(d1, d2) != 1 or not (_squarefree(d1) and _squarefree(d2)):
        return
    spec = RhoSpec(k, j)
    assert rho(spec, d1 * d2) == rho(spec, d1) * rho(spec, d2)


def test_rho_at_primes_bounded():
    for k in range(1, 40):
        for j in range(-12, 13):
            spec = RhoSpec(k, j)
            assert rho(spec, 2) <= 1
            assert all(rho(spec, ell) <= 2 for ell in PRIMES_1E4[:200])


def test_rho_generic_prime_is_one_plus_legendre():
    for ell in PRIMES_1E4[1:60]:
        for k in range(1, 12):
            if k % ell == 0:
                continue
            for j in range(-6, 7):
                assert rho(RhoSpec(k, j), ell) == 1 + euler_legendre(j * j - 4 * k, ell)


def _trial_survivors(k, j, M, y):
    primes = [p for p in range(2, y + 1) if all(p % q for q in range(2, p))]
    return sum(1 for m in range(1, M + 1) if all((k * m * m + j * m + 1) % p for p in primes))


def test_vanishing_value_survives_only_the_empty_sieve():
    inst = SieveInstance(1, -2, 1)
    assert sieve_survivors(inst, 1) == legendre_identity_count(inst, 1) == 1
    assert sieve_survivors(inst, 2) == legendre_identity_count(inst, 2) == 0


def test_sieve_survivor_examples():
    assert sieve_survivors(SieveInstance(1, 0, 10), 1) == 10
    assert sieve_survivors(SieveInstance(1, 0, 10), 2) == 5
    assert sieve_survivors(SieveInstance(1, 0, 100), 7) == _trial_survivors(1, 0, 100, 7)


@given(st.integers(1, 30), st.integers(-10, 10), st.integers(0, 300), st.integers(1, 40))
def test_sieve_survivors_match_trial_division(k, j, M, y):
    assert sieve_survivors(SieveInstance(k, j, M), y) == _trial_survivors(k, j, M, y)


@pytest.mark.parametrize("k, j", [(1, 0), (2, 1), (5, -3), (3, 3)])
def test_legendre_identity(k, j):
    inst = SieveInstance(k, j, 2000)
    for y in (1, 2, 10, 30):
        assert sieve_survivors(inst, y) == legendre_identity_count(inst, y)


def test_main_term_examples():
    assert sieve_main_term(SieveInstance(1, 0, 100), 2) == pytest.approx(50, rel=1e-12)
    assert sieve_main_term(SieveInstance(1, 0, 100), 3) == pytest.approx(50, rel=1e-12)
    assert sieve_main_term(SieveInstance(4, 1, 77), 1) == 77


def test_main_term_remainders_bounded_by_rho():
    inst = SieveInstance(2, 1, 5000)
    vals = inst.values()
    for d in (2, 3, 5, 7, 15, 21, 105):
        r = rho(inst.rho_spec, d)
        assert abs(int(np.count_nonzero(vals % d == 0)) - inst.M * r / d) <= r


def test_euler_product_examples():
    assert euler_product(4, 10) == pytest.approx(128 / 105, rel=1e-12)
    assert euler_product(7, 1) == 1.0
    assert euler_product(4, 10**6) == pytest.approx(4 / math.pi, rel=0.01)


def test_euler_product_partial_ranges_compose():
    whole = euler_product(7, 10**5)
    assert whole == pytest.approx(euler_product(7, 777) * euler_product(7, 10**5, 777), rel=1e-12)


@pytest.mark.parametrize("d", [3, 4, 7, 8, 11, 15, 20])
def test_euler_product_tends_to_reciprocal_l1(d):
    assert abs(euler_product(d, 10**6) * l1_reference(d, 10**6) - 1) < 0.02


def test_l1_reference_for_minus_four_is_leibniz():
    assert l1_reference(4, 10**6) == pytest.approx(math.pi / 4, abs=1e-5)


@pytest.mark.parametrize("d, expected", [(3, (3, 1)), (4, (4, 1)), (12, (3, 2)), (7, (7, 1)), (8, (8, 1)), (1, (4, Fraction(1, 2)))])
def test_fundamental_discriminant_examples(d, expected):
    assert fundamental_discriminant(d) == expected


@given(st.integers(1, 10**6))
def test_fundamental_discriminant_properties(d):
    d1, a = fundamental_discriminant(d)
    assert a * a * d1 == d
    assert d1 % 4 == 3 or (d1 % 16 in (4, 8) and (d1 // 4) % 4 in (1, 2))
    core = d1 if d1 % 4 == 3 else d1 // 4
    assert _squarefree(core)


@pytest.mark.parametrize("d", [3, 4, 7, 8, 12, 20, 27, 44, 75, 100, 300])
def test_kronecker_character_consistent_with_conductor(d):
    chi = character(d)
    for ell in PRIMES_1E4:
        if (2 * d) % ell:
            assert chi.value(ell) == chi.primitive_value(ell) == euler_legendre(-d, ell)


def test_odd_table_is_character():
    chi = character(11)
    table = chi.odd_table()
    for n in range(1, 500, 2):
        assert table[n % 44] == chi.value(n)


@pytest.mark.parametrize("d, K, expected", [(3, 10, Fraction(22, 3)), (1, 1, 0), (4, 2, 5)])
def test_T_sum_examples(d, K, expected):
    assert T_sum(d, K, exact=True) == expected
    assert T_sum(d, K) == pytest.approx(float(expected), rel=1e-12)


@given(st.integers(1, 200), st.integers(1, 200))
def test_T_sum_matches_enumeration(d, K):
    if d > 4 * K:
        with pytest.raises(PreconditionError):
            T_sum(d, K)
        return
    assert T_sum(d, K, exact=True) == brute_T(d, K)


def test_psi_examples():
    expected = 10 - math.log(2520)
    assert psi_discrepancy(DiscrepancyQuery(0, 10)) == pytest.approx(expected, rel=1e-12)
    assert psi_discrepancy(DiscrepancyQuery(0, 0, 7, 3)) == 0


LAMBDA = von_mangoldt_table(10**6)


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.sampled_from([1, 2, 3, 4, 10, 30, 97]), st.data())
def test_psi_matches_von_mangoldt_oracle(y, h, q, data):
    h = min(h, 10**6 - y)
    a = data.draw(st.sampled_from([r for r in range(q) if math.gcd(r, q) == 1]))
    n = np.arange(y + 1, y + h + 1)
    sel = n[n % q == a]
    psi = math.fsum(LAMBDA[sel].tolist())
    phi = sum(1 for r in range(q) if math.gcd(r, q) == 1)
    expected = abs(psi - h / phi)
    assert math.isclose(psi_discrepancy(DiscrepancyQuery(y, h, q, a)), expected, rel_tol=1e-9, abs_tol=1e-9)


def test_psi_rejects_non_coprime_residue():
    with pytest.raises(PreconditionError):
        DiscrepancyQuery(0, 10, 6, 2)
    with pytest.raises(PreconditionError):
        DiscrepancyQuery(10**10, 1)


def test_theorem_ratio_examples():
    assert theorem_ratios(1, 1)["thm13_density"] == 1.0
    assert theorem_ratios(2, 1)["thm13_density"] == 1.0
    r = theorem_ratios(11, 1)
    assert r["thm13_density"] <= 10 / 11 and r["count"] == 10
    assert r["thm12"] == pytest.approx(10 * math.log(11) / 11, rel=1e-12)
