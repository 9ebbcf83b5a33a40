import random
from fractions import Fraction

import pytest

from padic_fourier.ainf import AinfElt, dirac_q, rescale_pushforward
from padic_fourier.errors import UncertifiedTailError
from padic_fourier.fourier import (
    UnifFn,
    eval_unif,
    forward_transform,
    forward_transform_diracs,
    integrate_unif,
    pullback_rescale,
)
from padic_fourier.iwasawa import IwasawaElt, MahlerFn, integrate
from padic_fourier.padic import PadicScalar, SExponent, comb_int


def quadrature_integral(f, q_prime, level, prec):
    """Independent oracle for the pairing against Tt^(q').

    Tt^(q') is approached by the Dirac combination
    (Delta(1/p^level) - 1)^(p^level · q'), whose integral against f is the
    finite signed sum Σ_j (-1)^(K-j) C(K, j) f(j / p^level).
    """
    p = f.p
    K = int(Fraction(q_prime) * p**level)
    acc = PadicScalar.zero(p, prec)
    for j in range(K + 1):
        x = PadicScalar.from_fraction(p, Fraction(j, p**level), prec + 40)
        fx = eval_unif(f, x, prec)
        acc = acc + fx * ((-1) ** (K - j) * comb_int(K, j))
    return acc


class TestOrthogonality:
    @pytest.mark.parametrize("p", [2, 3])
    def test_grid(self, p):
        prec = 12
        ks = range(0, 2 * p**2)  # q = k/p^2 in [0, 2)
        for k1 in ks:
            f = UnifFn.basis(p, Fraction(k1, p**2), prec)
            for k2 in ks:
                mu = AinfElt.monomial(p, Fraction(k2, p**2), prec, degree=2)
                expect = PadicScalar.from_int(p, 1 if k1 == k2 else 0, prec)
                assert integrate_unif(f, mu) == expect

    def test_quadrature_oracle_agrees(self):
        # the level sum against (Delta - 1)^K reproduces the pairing exactly
        p = 2
        for qn in (0, 1, 2, 3):
            for qd in (0, 1, 2, 3):
                f = UnifFn.basis(p, Fraction(qn, 2), 6)
                val = quadrature_integral(f, Fraction(qd, 2), 3, 4)
                expect = 1 if qn == qd else 0
                assert val.residue(2) == expect % 4, (qn, qd)


class TestForwardTransform:
    def test_monomial(self):
        mu = AinfElt.monomial(2, Fraction(3, 2), 6, degree=4)
        ft = forward_transform(mu)
        assert set(ft) == {SExponent(2, 3, 1)}
        assert ft[SExponent(2, 3, 1)] == PadicScalar.from_int(2, 1, 6)

    def test_zero(self):
        assert forward_transform(AinfElt.zero(3, 5)) == {}

    def test_stored_series_recovered(self):
        rng = random.Random(3)
        for _ in range(20):
            p = rng.choice([2, 3])
            cs = {rng.randrange(12): rng.randrange(1, p**5) for _ in range(4)}
            mu = AinfElt(p, 5, 2, 4, cs)
            ft = forward_transform(mu)
            back = {q.num * p ** (2 - q.logden): v.residue(5) for q, v in ft.items()}
            assert back == dict(mu.with_depth(2).coeffs)

    @pytest.mark.parametrize("p", [2, 3])
    def test_dirac_combination_matches_realization(self, p):
        # coefficients of the depth-m Dirac realization agree with the
        # generalized binomial at the certified congruence level 1 + m + v(s)
        m = 2
        for s in (Fraction(1, p**2), Fraction(3, p), Fraction(2)):
            d = dirac_q(p, s, m, 6, 2)
            vs = -2 if s.denominator == p**2 else (-1 if s.denominator == p else 0)
            level = 1 + m + vs
            qs = [q for q, _ in d.items_sexp()]
            ft = forward_transform_diracs(p, [(1, s)], qs, 6)
            stored = dict(d.items_sexp())
            for q in qs:
                assert ft[q].truncate(level) == PadicScalar.from_int(
                    p, stored[q], 6
                ).truncate(level)


class TestEval:
    def test_constant_one(self):
        f = UnifFn.constant(3, 1, 6)
        for fr in (Fraction(0), Fraction(5), Fraction(7, 9)):
            x = PadicScalar.from_fraction(3, fr, 40)
            assert eval_unif(f, x) == PadicScalar.from_int(3, 1, 6)

    def test_x_equals_q(self):
        f = UnifFn.basis(3, Fraction(1, 3), 8)
        x = PadicScalar.from_fraction(3, Fraction(1, 3), 60)
        assert eval_unif(f, x, 6) == PadicScalar.from_int(3, 1, 6)

    def test_basis_one_congruent_to_identity(self):
        # (x choose 1) agrees with x at the first congruence level
        f = UnifFn.basis(3, 1, 8)
        for a in (2, 5, 7):
            x = PadicScalar.from_int(3, a, 60)
            got = eval_unif(f, x, 6)
            assert (got - a).val_floor() >= 1

    def test_decay_floor_limits_precision(self):
        f = UnifFn(2, 8, 1, {1: 3}, decay_cert=[(Fraction(0), 4)])
        x = PadicScalar.from_fraction(2, Fraction(1, 2), 60)
        out = eval_unif(f, x)
        assert out.abs_bound == 4

    def test_uncertified_decay_raises(self):
        f = UnifFn(2, 6, 0, {1: 1}, decay_cert=[(Fraction(2), 0)])
        x = PadicScalar.from_int(2, 3, 40)
        with pytest.raises(UncertifiedTailError):
            eval_unif(f, x)


class TestPullback:
    def test_constant_fixed(self):
        f = UnifFn.constant(2, 1, 6)
        assert pullback_rescale(f) == f

    def test_coefficient_contraction(self):
        f = UnifFn.basis(2, 1, 6)
        g = pullback_rescale(f)
        assert [(q.num, q.logden) for q, _ in g.items_sexp()] == [(1, 1)]

    @pytest.mark.parametrize("p", [2, 3])
    def test_adjoint_to_pushforward(self, p):
        rng = random.Random(29 * p)
        for _ in range(15):
            f = UnifFn(
                p, 6, 1,
                {rng.randrange(8): rng.randrange(1, p**6) for _ in range(3)},
                exact_tail=True,
            )
            mu = AinfElt(
                p, 6, 2, 4,
                {rng.randrange(4 * p**2): rng.randrange(1, p**6) for _ in range(3)},
            )
            lhs = integrate_unif(pullback_rescale(f), mu)
            rhs = integrate_unif(f, rescale_pushforward(mu))
            assert lhs == rhs

    def test_pullback_of_limit_binomial_pointwise(self):
        # (px choose 1) = (x choose 1/p) as limit functions: both sides are
        # the same scaling sequence, checked at a point
        p, prec = 2, 6
        f = UnifFn.basis(p, 1, 8)
        g = pullback_rescale(f)
        x = PadicScalar.from_fraction(p, Fraction(3, 4), 60)
        px = x * p
        assert eval_unif(g, x, prec) == eval_unif(f, px, prec)


class TestDiracPairing:
    @pytest.mark.parametrize("p", [2, 3])
    def test_integrating_against_dirac_evaluates(self, p):
        # pairing with the depth-m Dirac realization agrees with direct
        # evaluation at the realization's congruence level 1 + m + v(s)
        rng = random.Random(53 * p)
        m = 2
        for _ in range(6):
            f = UnifFn(
                p, 8, 1,
                {rng.randrange(2 * p): rng.randrange(1, p**8) for _ in range(2)},
                exact_tail=True,
            )
            num = rng.randrange(1, p**3)
            s = Fraction(num, p**m)
            vs = -m if num % p else -m + 1
            level = 1 + m + vs
            mu = dirac_q(p, s, m, 8, 4)
            lhs = integrate_unif(f, mu)
            rhs = eval_unif(f, PadicScalar.from_fraction(p, s, 60), 8)
            assert lhs.truncate(level) == rhs.truncate(level), (p, s)

    def test_total_mass_is_constant_term(self):
        mu = AinfElt(3, 6, 1, 4, {0: 7, 2: 5, 5: 1})
        one = UnifFn.constant(3, 1, 6)
        assert integrate_unif(one, mu) == PadicScalar.from_int(3, 7, 6)


class TestRestrictionConsistency:
    def test_depth_zero_matches_mahler_pairing(self):
        rng = random.Random(41)
        for _ in range(20):
            p = rng.choice([2, 3, 5])
            fc = {rng.randrange(6): rng.randrange(1, p**5) for _ in range(3)}
            mc = {rng.randrange(8): rng.randrange(1, p**5) for _ in range(3)}
            f_q = UnifFn(p, 5, 0, fc, exact_tail=True)
            mu_q = AinfElt(p, 5, 0, 8, mc)
            f_z = MahlerFn(p, 5, fc, max(fc) + 1, exact_tail=True)
            cs = [0] * 8
            for k, c in mc.items():
                cs[k] = c
            mu_z = IwasawaElt(p, 5, 8, cs)
            assert integrate_unif(f_q, mu_q) == integrate(f_z, mu_z)


class TestRoundTrip:
    @pytest.mark.parametrize("p", [2, 3])
    def test_pointwise_reconstruction(self, p):
        # rebuild the function from its transported coefficients and compare
        # at points of p^(-2) Z_p, plus the quadrature oracle at one point
        rng = random.Random(43 * p)
        prec = 6
        f = UnifFn(
            p, prec, 2,
            {rng.randrange(2 * p**2): rng.randrange(1, p**prec) for _ in range(3)},
            exact_tail=True,
        )
        mu = AinfElt(p, prec, f.depth, 2, dict(f.coeffs))
        coeffs = forward_transform(mu)
        rebuilt = UnifFn(
            p, prec, f.depth,
            {q.num * p ** (f.depth - q.logden): v.residue(prec) for q, v in coeffs.items()},
            exact_tail=True,
        )
        assert rebuilt == f
        for _ in range(20):
            x = PadicScalar.from_fraction(
                p, Fraction(rng.randrange(1, 4 * p**2), p**2), 80
            )
            assert eval_unif(rebuilt, x, 5) == eval_unif(f, x, 5)

    def test_quadrature_matches_pairing(self):
        p = 2
        f = UnifFn(p, 5, 1, {0: 3, 1: 2, 2: 1}, exact_tail=True)
        for q in (Fraction(1, 2), Fraction(1)):
            mu = AinfElt.monomial(p, q, 5, degree=2)
            direct = integrate_unif(f, mu)
            oracle = quadrature_integral(f, q, 4, 4)
            assert direct.truncate(3) == oracle.truncate(3)


class TestIntegrateEdges:
    def test_stored_beyond_measure_box_raises(self):
        f = UnifFn(3, 4, 0, {5: 1}, exact_tail=False, decay_cert=[(Fraction(6), 4)])
        mu = AinfElt(3, 4, 0, 4, {1: 1})
        with pytest.raises(UncertifiedTailError):
            integrate_unif(f, mu)

    def test_decay_cert_folds_into_precision(self):
        f = UnifFn(3, 6, 0, {1: 1}, exact_tail=False, decay_cert=[(Fraction(0), 2)])
        mu = AinfElt(3, 6, 0, 4, {1: 5, 2: 9})
        out = integrate_unif(f, mu)
        # the unknown measure tail beyond degree 4 pairs with omitted
        # coefficients of floor 2, so two digits survive
        assert out.abs_bound == 2
        assert out.residue(2) == 5
        # with an exact measure tail only the stored crossing term matters:
        # floor 2 plus v_3(9) = 2 leaves four digits
        mu_exact = AinfElt(3, 6, 0, None, {1: 5, 2: 9}).resize(degree=None)
        out2 = integrate_unif(f, mu_exact)
        assert out2.abs_bound == 4 and out2.residue(4) == 5

    def test_json_round_trip(self):
        f = UnifFn(3, 6, 1, {1: 2, 4: 5}, decay_cert=[(Fraction(2), 6)])
        doc = f.to_json()
        assert UnifFn.from_json(doc) == f
        f2 = UnifFn.basis(2, Fraction(1, 2), 5)
        assert UnifFn.from_json(f2.to_json()) == f2
