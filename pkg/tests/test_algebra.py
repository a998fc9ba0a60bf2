"""Clifford core: axioms, involutions, splits, norms, serialization.

The product oracle below multiplies basis blades as explicit generator
lists with bubble-sort transposition counting, independent of the bitmask
sign rule used by the implementation.
"""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cliffordforms.algebra import (
    Multivector,
    Paravector,
    HalfSpacePoint,
    conjugation,
    format_text,
    from_json,
    geometric_product,
    main_involution,
    parse_text,
    paravector_inverse,
    pq_join,
    pq_split,
    pseudo_norm,
    reversion,
    star,
    to_json,
)
from cliffordforms.blades import algebra, gp, pairwise_sum


def oracle_blade_product(a_mask, b_mask):
    """Multiply e_A e_B by explicit transposition counting.

    Returns (sign, mask).  Generators anticommute and square to -1.
    """
    gens = [i for i in range(8) if a_mask & (1 << i)] + [
        i for i in range(8) if b_mask & (1 << i)
    ]
    sign = 1
    # bubble sort, one swap at a time
    changed = True
    while changed:
        changed = False
        for i in range(len(gens) - 1):
            if gens[i] > gens[i + 1]:
                gens[i], gens[i + 1] = gens[i + 1], gens[i]
                sign = -sign
                changed = True
    # contract equal neighbours with e_i^2 = -1
    out = []
    i = 0
    while i < len(gens):
        if i + 1 < len(gens) and gens[i] == gens[i + 1]:
            sign = -sign
            i += 2
        else:
            out.append(gens[i])
            i += 1
    mask = 0
    for g in out:
        mask |= 1 << g
    return sign, mask


def oracle_product(a, b, n):
    out = np.zeros(1 << n)
    for i in range(1 << n):
        if a.coeffs[i] == 0:
            continue
        for j in range(1 << n):
            if b.coeffs[j] == 0:
                continue
            sign, mask = oracle_blade_product(i, j)
            out[mask] += sign * a.coeffs[i] * b.coeffs[j]
    return out


def random_mv(rng, n):
    return Multivector(n, rng.standard_normal(1 << n))


def test_generator_relations():
    for n in range(1, 6):
        for i in range(1, n + 1):
            ei = Multivector.basis_vector(n, i)
            sq = ei * ei
            assert_allclose(sq.coeffs[0], -1.0, atol=1e-15)
            assert np.all(sq.coeffs[1:] == 0)
            for j in range(i + 1, n + 1):
                ej = Multivector.basis_vector(n, j)
                anti = (ei * ej + ej * ei).coeffs
                assert np.all(anti == 0)


def test_blade_square_frozen():
    # (e1 e2)(e1 e2) = -1: one transposition then two contractions
    e12 = Multivector.blade(3, 0b011)
    assert_allclose((e12 * e12).coeffs[0], -1.0)
    sign, mask = oracle_blade_product(0b011, 0b011)
    assert (sign, mask) == (-1, 0)


def test_product_matches_oracle():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 5):
        for _ in range(20):
            a, b = random_mv(rng, n), random_mv(rng, n)
            assert_allclose((a * b).coeffs, oracle_product(a, b, n), atol=1e-12)


def test_product_batch_matches_scalar_path():
    rng = np.random.default_rng(8)
    for n in (3, 6):
        A = rng.standard_normal((4, 1 << n))
        B = rng.standard_normal((4, 1 << n))
        batch = gp(A, B, algebra(n))
        for r in range(4):
            single = gp(A[r], B[r], algebra(n))
            assert_allclose(batch[r], single, atol=1e-12)


def test_associativity_and_distributivity():
    rng = np.random.default_rng(9)
    for n in (2, 3, 4):
        for _ in range(25):
            a, b, c = (random_mv(rng, n) for _ in range(3))
            lhs = (a * b) * c
            rhs = a * (b * c)
            scale = max(pseudo_norm(lhs), 1.0)
            assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12 * scale)
            d1 = a * (b + c)
            d2 = a * b + a * c
            assert_allclose(d1.coeffs, d2.coeffs, atol=1e-12 * scale)


def test_involution_signs_on_blades():
    # reversion flips grade-2 and grade-3 blades, conjugation flips 1 and 2
    e1 = Multivector.basis_vector(3, 1)
    e12 = Multivector.blade(3, 0b011)
    e123 = Multivector.blade(3, 0b111)
    assert reversion(e12) == -e12
    assert reversion(e123) == -e123
    assert reversion(e1) == e1
    assert conjugation(e1) == -e1
    assert conjugation(e12) == -e12
    assert conjugation(e123) == e123
    # main involution negates each generator: odd grades flip
    assert main_involution(e1) == -e1
    assert main_involution(e12) == e12
    assert main_involution(e123) == -e123


def test_involutions_are_antiautomorphisms():
    rng = np.random.default_rng(10)
    for _ in range(20):
        a, b = random_mv(rng, 4), random_mv(rng, 4)
        ab = a * b
        assert_allclose(
            reversion(ab).coeffs, (reversion(b) * reversion(a)).coeffs, atol=1e-12
        )
        assert_allclose(
            conjugation(ab).coeffs, (conjugation(b) * conjugation(a)).coeffs, atol=1e-12
        )
        # main involution and star are automorphisms
        assert_allclose(
            main_involution(ab).coeffs,
            (main_involution(a) * main_involution(b)).coeffs,
            atol=1e-12,
        )
        assert_allclose(star(ab).coeffs, (star(a) * star(b)).coeffs, atol=1e-12)


def test_conjugation_on_paravector():
    x = Multivector.from_paravector(3, [1.0, 2.0, -3.0, 4.0])
    cx = conjugation(x)
    assert_allclose(cx.paravector_components(), [1.0, -2.0, 3.0, -4.0])


def test_star_fixed_frozen():
    e12 = Multivector.blade(3, 0b011)
    e13 = Multivector.blade(3, 0b101)
    e3 = Multivector.basis_vector(3, 3)
    assert star(e12) == e12
    assert star(e13) == -e13
    assert star(e3) == -e3


def test_pq_split_frozen():
    # a = e1 + 2 e1e3 in Cl_3 splits as P = e1, Q = 2 e1
    a = Multivector.blade(3, 0b001) + 2.0 * Multivector.blade(3, 0b101)
    p, q = pq_split(a)
    assert p.n == 2 and q.n == 2
    assert_allclose(p.coeffs, [0.0, 1.0, 0.0, 0.0])
    assert_allclose(q.coeffs, [0.0, 2.0, 0.0, 0.0])


def test_pq_split_reconstructs():
    rng = np.random.default_rng(11)
    for n in (1, 3, 5):
        a = random_mv(rng, n)
        p, q = pq_split(a)
        en = Multivector.basis_vector(n, n)
        lifted_p = Multivector(n, np.concatenate([p.coeffs, np.zeros_like(p.coeffs)]))
        lifted_q = Multivector(n, np.concatenate([q.coeffs, np.zeros_like(q.coeffs)]))
        rebuilt = lifted_p + lifted_q * en
        assert_allclose(rebuilt.coeffs, a.coeffs, atol=1e-14)
        assert_allclose(pq_join(p, q).coeffs, a.coeffs, atol=0)


def test_paravector_inverse_frozen():
    # (1 + e1)^{-1} = (1 - e1)/2
    x = Multivector.from_paravector(2, [1.0, 1.0, 0.0])
    inv = paravector_inverse(x)
    assert_allclose(inv.paravector_components(), [0.5, -0.5, 0.0])


def test_paravector_inverse_property():
    rng = np.random.default_rng(12)
    for n in (2, 3, 5):
        for _ in range(10):
            comps = rng.standard_normal(n + 1)
            x = Multivector.from_paravector(n, comps)
            prod = x * paravector_inverse(x)
            assert_allclose(prod.coeffs[0], 1.0, atol=1e-12)
            assert_allclose(prod.coeffs[1:], 0.0, atol=1e-12)


def test_paravector_inverse_rejects_general_element():
    a = Multivector.blade(3, 0b011)
    with pytest.raises(ValueError):
        paravector_inverse(a)


def test_pseudo_norm_frozen():
    a = (
        Multivector.scalar(3, 1.0)
        + Multivector.basis_vector(3, 1)
        + Multivector.blade(3, 0b011)
    )
    assert_allclose(pseudo_norm(a), np.sqrt(3.0))


def test_pseudo_norm_multiplicative_on_paravectors():
    rng = np.random.default_rng(13)
    for n in (2, 3, 4):
        for _ in range(10):
            x = Multivector.from_paravector(n, rng.standard_normal(n + 1))
            y = Multivector.from_paravector(n, rng.standard_normal(n + 1))
            assert_allclose(
                pseudo_norm(x * y), pseudo_norm(x) * pseudo_norm(y), rtol=1e-12
            )


def test_half_space_point_guard():
    HalfSpacePoint(3, [0.0, 0.0, 0.0, 1e-9])
    with pytest.raises(ValueError):
        HalfSpacePoint(3, [0.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        HalfSpacePoint(3, [1.0, 0.0, 0.0, -1.0])


def test_text_format_frozen():
    a = (
        Multivector.scalar(3, 1.0)
        + 2.0 * Multivector.basis_vector(3, 1)
        - 0.5 * Multivector.blade(3, 0b011)
    )
    assert format_text(a) == "1.0 + 2.0*e1 - 0.5*e1e2"
    back = parse_text(format_text(a), 3)
    assert np.array_equal(back.coeffs, a.coeffs)


def test_text_round_trip_random():
    rng = np.random.default_rng(14)
    for n in (1, 3, 5):
        a = random_mv(rng, n)
        back = parse_text(format_text(a), n)
        assert np.array_equal(back.coeffs, a.coeffs)


def test_json_round_trip_bit_exact():
    rng = np.random.default_rng(15)
    for n in (1, 3, 6):
        a = random_mv(rng, n)
        back = from_json(to_json(a))
        assert back.n == n
        assert np.array_equal(back.coeffs, a.coeffs)
    payload = json.loads(to_json(Multivector.blade(3, 3, -0.5) + Multivector.scalar(3, 1.0)))
    assert payload == {"dim": 3, "coeffs": {"0": 1.0, "3": -0.5}}


def test_json_complex_round_trip():
    a = Multivector(2, np.array([1 + 2j, 0, 0.5j, 0]))
    back = from_json(to_json(a))
    assert np.array_equal(back.coeffs, a.coeffs)


def test_pairwise_sum_matches_plain_sum():
    rng = np.random.default_rng(16)
    arr = rng.standard_normal((1000, 8))
    assert_allclose(pairwise_sum(arr, axis=0), arr.sum(axis=0), rtol=1e-12)
    assert pairwise_sum(np.zeros((0, 4))).shape == (4,)


def test_geometric_product_alias():
    a = Multivector.basis_vector(2, 1)
    b = Multivector.basis_vector(2, 2)
    assert geometric_product(a, b) == a * b
