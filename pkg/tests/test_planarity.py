import numpy as np
import pytest

from ffplanar.field import new_ctx
from ffplanar.linpoly import LinearizedPoly
from ffplanar.planarity import (
    PlanarCandidate,
    VerificationReport,
    check_witness,
    criterion_quadratic,
    eval_general,
    fq_value_subspace,
    is_planar_bruteforce,
    is_planar_bruteforce_general,
    is_planar_rank,
    is_planar_reduction,
)

F9 = new_ctx(3, 1, 2)
F27 = new_ctx(3, 1, 3)
F81_T = new_ctx(3, 2, 2)
F243 = new_ctx(3, 1, 5)
F625 = new_ctx(5, 2, 2)


def monomial_candidate(ctx, a, b, t):
    return PlanarCandidate(ctx, a, LinearizedPoly.monomial(ctx, b, t))


def square_candidate(ctx):
    # a = 0 and ell = identity realizes f(x) = x^2
    return PlanarCandidate(ctx, 0, LinearizedPoly.identity(ctx))


def perm_example_candidate(ctx):
    # x^(p^3k) - x^(p^2k) - x^(p^k) - x for m = 2k, acting as -2u on F_q
    neg = ctx.neg(1)
    ell = LinearizedPoly(ctx, (neg, neg, neg, 1))
    return PlanarCandidate(ctx, ctx.inv(2), ell)


def test_eval_square():
    cand = square_candidate(F9)
    for x in F9.elements():
        assert cand(x) == F9.mul(x, x)


def test_eval_normalized_is_x_q_plus_1():
    # Tr(a) = 1 and ell = 0 gives f(x) = x^(q+1) on the quadratic tower
    a = F81_T.inv(2)
    assert F81_T.rel_trace(a) == 1
    cand = PlanarCandidate(F81_T, a, LinearizedPoly.zero(F81_T))
    for x in F81_T.elements():
        assert cand(x) == F81_T.pow(x, F81_T.q + 1)


def test_eval_table_matches_scalar_and_shifts():
    cand = PlanarCandidate(F27, 1, LinearizedPoly.identity(F27))
    tab = cand.f_table()
    for x in F27.elements():
        expected = F27.add(F27.rel_trace(F27.pow(x, 4)), F27.mul(x, x))
        assert int(tab[x]) == cand(x) == expected
    # difference tables computed from the value table re-verify pointwise
    for c in (1, 5):
        for x in (0, 2, 20):
            d = F27.sub(cand(F27.add(x, c)), cand(x))
            assert d == F27.sub(int(tab[F27.add(x, c)]), int(tab[x]))


def test_bruteforce_square_is_planar():
    assert is_planar_bruteforce(square_candidate(F9)).planar
    assert is_planar_bruteforce(square_candidate(F27)).planar


def test_bruteforce_classical_trinomial_f9():
    neg = F9.neg(1)
    rep = is_planar_bruteforce_general(F9, [(1, 10), (1, 6), (neg, 2)])
    assert rep.planar


def test_bruteforce_x4_27_planar_x4_9_not():
    planar = is_planar_bruteforce_general(F27, [(1, 4)])
    assert planar.planar
    bad = is_planar_bruteforce_general(F9, [(1, 4)])
    assert not bad.planar
    assert bad.witness is not None
    assert check_witness(lambda x: eval_general(F9, [(1, 4)], x), F9, bad.witness)


def test_bruteforce_x14_on_f243():
    # x^((3^3+1)/2), gcd(3, 5) = 1 and the power's exponent odd
    assert is_planar_bruteforce_general(F243, [(1, 14)]).planar


def test_bruteforce_ding_family_f27_all_u():
    for u in F27.elements():
        mono = [(1, 10), (F27.neg(u), 6), (F27.neg(F27.mul(u, u)), 2)]
        assert is_planar_bruteforce_general(F27, mono).planar


def test_bruteforce_constant_not_planar():
    rep = is_planar_bruteforce_general(F9, [(2, 0)])
    assert not rep.planar and rep.witness is not None


def test_bruteforce_size_cap():
    with pytest.raises(ValueError):
        is_planar_bruteforce(square_candidate(F27), brute_cap=10)


def test_bruteforce_beyond_add_table_cap():
    # F_3^7 exceeds the dense addition-table cap, exercising digit arithmetic
    ctx = new_ctx(3, 1, 7)
    assert ctx.add_matrix is None
    cand = square_candidate(ctx)
    assert is_planar_bruteforce(cand).planar
    assert is_planar_rank(cand).planar
    bad = PlanarCandidate(ctx, 0, LinearizedPoly.monomial(ctx, 1, 1)
                          - LinearizedPoly.identity(ctx))
    rep = is_planar_bruteforce(bad)
    assert not rep.planar
    assert check_witness(bad, ctx, rep.witness)


def test_rank_permutation_example_planar_q25():
    cand = perm_example_candidate(F625)
    assert is_planar_rank(cand).planar
    assert is_planar_bruteforce(cand).planar
    assert criterion_quadratic(cand)


def test_permutation_example_degenerates_in_characteristic_3():
    # ell(u)^2 - u^2 = 3u^2 vanishes when p = 3, so the q = 9 instance of the
    # same shape is not planar; every method agrees
    cand = perm_example_candidate(F81_T)
    assert not criterion_quadratic(cand)
    assert not is_planar_bruteforce(cand).planar
    assert not is_planar_rank(cand).planar


def test_rank_a0_nonpermutation_not_planar():
    cand = PlanarCandidate(F9, 0, LinearizedPoly.zero(F9))
    rep = is_planar_rank(cand)
    assert not rep.planar
    # and a = 0 with a permutation ell is planar
    cand = PlanarCandidate(F9, 0, LinearizedPoly.identity(F9))
    assert is_planar_rank(cand).planar


def test_methods_agree_on_all_monomials_f9():
    for a in F9.elements():
        for b in F9.elements():
            for t in range(2):
                cand = monomial_candidate(F9, a, b, t)
                verdicts = {
                    is_planar_bruteforce(cand).planar,
                    is_planar_rank(cand).planar,
                    is_planar_reduction(cand).planar,
                }
                assert len(verdicts) == 1


def test_methods_agree_on_random_f27():
    rng = np.random.default_rng(0x5EED)
    for _ in range(50):
        a = int(rng.integers(0, 27))
        ell = LinearizedPoly(F27, tuple(int(v) for v in rng.integers(0, 27, 3)))
        cand = PlanarCandidate(F27, a, ell)
        verdicts = {
            is_planar_bruteforce(cand).planar,
            is_planar_rank(cand).planar,
            is_planar_reduction(cand).planar,
        }
        assert len(verdicts) == 1


def test_reduction_skipped_u_never_vanish():
    # u with ell(u) outside F_q cannot satisfy the two-variable equation
    rng = np.random.default_rng(12)
    ell = LinearizedPoly(F27, tuple(int(v) for v in rng.integers(0, 27, 3)))
    a = 1
    for u in range(1, 27):
        lu = ell(u)
        if F27.pow(lu, 3) == lu:
            continue
        for v in range(1, 27):
            t = F27.rel_trace(
                F27.add(
                    F27.mul(F27.mul(a, F27.frobenius(u, 1)), F27.pow(v, 1 - 3)),
                    F27.mul(F27.mul(a, u), F27.pow(v, 3 - 1)),
                )
            )
            assert F27.add(t, F27.mul(2, lu)) != 0


def test_reduction_a0_matches_permutation():
    rng = np.random.default_rng(13)
    for _ in range(20):
        ell = LinearizedPoly(F27, tuple(int(v) for v in rng.integers(0, 27, 3)))
        cand = PlanarCandidate(F27, 0, ell)
        assert is_planar_reduction(cand).planar == ell.is_permutation()


def test_criterion_requires_quadratic_tower_and_nonzero_trace():
    with pytest.raises(ValueError):
        criterion_quadratic(PlanarCandidate(F27, 1, LinearizedPoly.zero(F27)))
    tr0 = next(a for a in range(1, 81) if F81_T.rel_trace(a) == 0)
    with pytest.raises(ValueError):
        criterion_quadratic(PlanarCandidate(F81_T, tr0, LinearizedPoly.zero(F81_T)))


def test_criterion_zero_ell_fails():
    a = F9.inv(2)
    cand = PlanarCandidate(F9, a, LinearizedPoly.zero(F9))
    assert not criterion_quadratic(cand)
    assert not is_planar_bruteforce(cand).planar


def test_criterion_linear_ell_depends_on_norm():
    # ell(x) = b x: planar iff 1 - N(b)^-1 is a nonzero square in F_q
    a = F9.inv(2)
    for b in range(1, 9):
        cand = PlanarCandidate(F9, a, LinearizedPoly.monomial(F9, b, 0))
        want = (
            F9.quadratic_character(
                F9.sub(1, F9.inv(F9.rel_norm(b))), level=1
            )
            == 1
        )
        assert criterion_quadratic(cand) == want
        assert is_planar_bruteforce(cand).planar == want


def test_criterion_agrees_with_bruteforce_on_monomials_f9():
    a = F9.inv(2)
    for b in F9.elements():
        for t in range(2):
            cand = monomial_candidate(F9, a, b, t)
            assert criterion_quadratic(cand) == is_planar_bruteforce(cand).planar


def test_fq_value_subspace():
    ell = LinearizedPoly.monomial(F9, 2, 0)  # u -> 2u, values in F_q iff u in F_q
    sub = fq_value_subspace(ell)
    assert sorted(sub.elements()) == F9.subfield_elements()


def test_substitution_and_scaling_preserve_verdicts():
    rng = np.random.default_rng(14)
    for _ in range(8):
        a = int(rng.integers(0, 9))
        ell = LinearizedPoly(F9, tuple(int(v) for v in rng.integers(0, 9, 2)))
        cand = PlanarCandidate(F9, a, ell)
        base = is_planar_bruteforce(cand).planar
        for lam in range(1, 9):
            assert is_planar_bruteforce(cand.substituted(lam)).planar == base
        for c in (1, 2):
            assert is_planar_bruteforce(cand.scaled(c)).planar == base


def test_candidate_and_report_json_round_trip():
    cand = perm_example_candidate(F81_T)
    back = PlanarCandidate.from_json(cand.to_json())
    assert back == cand
    rep = is_planar_bruteforce_general(F9, [(1, 4)])
    obj = rep.to_json(F9)
    back_rep = VerificationReport.from_json(F9, obj)
    assert back_rep.planar == rep.planar
    assert back_rep.witness == rep.witness
    assert back_rep.to_json(F9) == obj


def test_report_witness_consistency_enforced():
    with pytest.raises(ValueError):
        VerificationReport(False, "bruteforce", None, 0.0)
    with pytest.raises(ValueError):
        VerificationReport(True, "bruteforce", (1, 0, 1), 0.0)
