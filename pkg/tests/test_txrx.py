import itertools

import numpy as np
import pytest

from eigenrac import eigen, rac, txrx
from eigenrac.eigen import InvariantSequence, generating_function_gm, simplest_seed
from eigenrac.sequence import basis
from eigenrac.txrx import (
    FrameConfig,
    OpCount,
    SignaturePool,
    ad_convert,
    add_noise,
    da_convert,
    dynamic_range,
    estimate_signature,
    receive_coefficients,
    receive_fast2,
    receive_full,
    transmit,
)

from conftest import M1, MJ, P1, PJ, REFERENCE, crandn, random_invariant


def table_sigs(n, lams):
    return [InvariantSequence(REFERENCE[n][lam], lam) for lam in lams]


class TestFrameConfig:
    @pytest.mark.parametrize("kw", [dict(b=0, M=1), dict(b=2, M=0), dict(b=2, M=1, E_max=-1), dict(b=1.5, M=1)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            FrameConfig(**kw)

    def test_levels(self):
        cfg = FrameConfig(3, 2.0)
        assert cfg.levels == 8 and cfg.step == pytest.approx(4 / 7) and cfg.bits_per_frame == 3


class TestConverters:
    def test_two_levels(self):
        cfg = FrameConfig(1, 2.5)
        assert da_convert(0, cfg) == -2.5 and da_convert(1, cfg) == 2.5

    def test_uniform_level(self):
        assert da_convert(4, FrameConfig(3, 1.0)) == pytest.approx(1 / 7, abs=1e-15)

    @pytest.mark.parametrize("b", range(1, 13))
    def test_round_trip_exhaustive(self, b):
        cfg = FrameConfig(b, 1.7)
        w = np.arange(2**b)
        a = da_convert(w, cfg)
        assert a[0] == -1.7 and a[-1] == 1.7
        assert np.all(np.diff(a) > 0)
        np.testing.assert_array_equal(ad_convert(a, cfg), w)

    def test_out_of_range(self):
        cfg = FrameConfig(2, 1.0)
        for w in (-1, 4):
            with pytest.raises(ValueError):
                da_convert(w, cfg)

    def test_endpoints_and_clamp(self):
        cfg = FrameConfig(3, 1.0)
        assert ad_convert(-1.0, cfg) == 0 and ad_convert(1.0, cfg) == 7
        assert ad_convert(-50.0, cfg) == 0 and ad_convert(50.0, cfg) == 7

    def test_tie_goes_low(self):
        assert ad_convert(0.0, FrameConfig(1, 1.0)) == 0
        cfg = FrameConfig(2, 3.0)  # levels -3, -1, 1, 3
        assert ad_convert(2.0, cfg) == 2 and ad_convert(-2.0, cfg) == 0

    def test_nearest_matches_brute_force(self, rng):
        cfg = FrameConfig(5, 1.3)
        levels = da_convert(np.arange(32), cfg)
        for a in rng.uniform(-2, 2, 500):
            assert ad_convert(a, cfg) == int(np.argmin(np.abs(a - levels)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ad_convert(np.nan, FrameConfig(2, 1.0))


class TestDynamicRange:
    def test_unit_signatures(self):
        e = np.eye(4)
        assert dynamic_range(2.0, [e[0], e[1]]) == 1.0

    def test_table_rows(self):
        x1, x2 = REFERENCE[8][P1], REFERENCE[8][M1]
        M = dynamic_range(100.0, [x1, x2])
        assert M == pytest.approx(np.sqrt(100 / (np.sum(np.square(x1)) + np.sum(np.square(x2)))))
        for s1, s2 in itertools.product((-1, 1), repeat=2):
            assert np.sum(np.square(s1 * M * np.asarray(x1) + s2 * M * np.asarray(x2))) <= 100 * (1 + 1e-12)

    def test_single_signature_tight(self):
        x = np.asarray(REFERENCE[6][MJ])
        M = dynamic_range(9.0, [x])
        assert M == pytest.approx(3.0 / np.linalg.norm(x))
        assert np.sum(np.square(M * x)) == pytest.approx(9.0, rel=1e-14)

    def test_errors(self):
        with pytest.raises(ValueError):
            dynamic_range(1.0, [np.zeros(4)])
        with pytest.raises(ValueError):
            dynamic_range(1.0, [])
        with pytest.raises(ValueError):
            dynamic_range(1.0, [np.ones(4), np.ones(4) + basis("delta", 0, 4)])  # not orthogonal


class TestTransmit:
    def test_single_user(self):
        cfg = FrameConfig(2, 3.0)
        x = np.asarray(REFERENCE[8][P1])
        np.testing.assert_allclose(transmit([2], [x], cfg), 1.0 * x, atol=1e-15)

    def test_two_users(self):
        cfg = FrameConfig(4, 1.5)
        x1, x2 = np.asarray(REFERENCE[8][P1]), np.asarray(REFERENCE[8][M1])
        a1, a2 = -1.5 + 11 * 3.0 / 15, -1.5 + 3 * 3.0 / 15
        np.testing.assert_allclose(transmit([11, 3], [x1, x2], cfg), a1 * x1 + a2 * x2, atol=1e-14)

    def test_peak_energy(self):
        sigs = [REFERENCE[8][lam] for lam in rac.FULL]
        M = dynamic_range(10.0, sigs)
        cfg = FrameConfig(3, M, 10.0)
        for w in itertools.product((0, 7), repeat=4):
            assert np.sum(np.abs(transmit(w, sigs, cfg)) ** 2) <= 10.0 * (1 + 1e-12)

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            transmit([1, 2], [np.ones(4)], FrameConfig(2, 1.0))

    def test_batched(self, rng):
        cfg = FrameConfig(3, 1.0)
        sigs = [REFERENCE[6][P1], REFERENCE[6][MJ]]
        w = rng.integers(0, 8, (5, 2))
        y = transmit(w, sigs, cfg)
        for f in range(5):
            np.testing.assert_allclose(y[f], transmit(w[f], sigs, cfg), atol=1e-15)


class TestReceiveFull:
    def test_two_user_random_words(self, rng):
        sigs = table_sigs(8, (P1, M1))
        cfg = FrameConfig(8, 2.0)
        words = rng.integers(0, 256, (16, 2))
        np.testing.assert_array_equal(receive_full(transmit(words, sigs, cfg), sigs, (P1, M1), cfg), words)

    def test_silent_user(self):
        sigs = table_sigs(8, (P1, M1))
        cfg = FrameConfig(3, 1.0)
        y = 0.4 * sigs[0].seq.real
        words = receive_full(y, sigs, (P1, M1), cfg)
        assert words[1] == ad_convert(0.0, cfg)
        assert words[0] == ad_convert(0.4, cfg)

    def test_four_users(self, rng):
        sigs = [random_invariant(rng, 16, lam) for lam in rac.FULL]
        cfg = FrameConfig(6, 1.0)
        words = rng.integers(0, 64, (20, 4))
        np.testing.assert_array_equal(receive_full(transmit(words, sigs, cfg), sigs, rac.FULL, cfg), words)

    def test_selection_mismatch(self):
        sigs = table_sigs(8, (P1, M1))
        with pytest.raises(ValueError):
            receive_full(np.zeros(8), sigs, (P1, PJ), FrameConfig(2, 1.0))


class TestFastReceiver:
    def test_table_signatures(self):
        x1, x2 = np.asarray(REFERENCE[8][P1]), np.asarray(REFERENCE[8][M1])
        assert x1[0] == pytest.approx(2 + np.sqrt(2)) and x2[0] == -2
        a1, a2 = receive_fast2(x1 + x2, x1, x2)
        assert a1 == pytest.approx(1, abs=1e-10) and a2 == pytest.approx(1, abs=1e-10)

    def test_zero(self):
        x1, x2 = REFERENCE[8][P1], REFERENCE[8][M1]
        assert receive_fast2(np.zeros(8), x1, x2) == (0.0, 0.0)

    def test_agrees_with_full(self, rng):
        sigs = table_sigs(8, (P1, M1))
        for _ in range(20):
            a = rng.uniform(-3, 3, 2)
            y = a[0] * sigs[0].seq.real + a[1] * sigs[1].seq.real
            fast = receive_fast2(y, sigs[0].seq, sigs[1].seq)
            full = receive_coefficients(y, sigs, (P1, M1))
            np.testing.assert_allclose(fast, full, atol=1e-10)
            np.testing.assert_allclose(fast, a, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 5, 8, 33])
    def test_operation_budget(self, rng, n):
        x1 = random_invariant(rng, n, P1, real=True).seq
        x2 = random_invariant(rng, n, M1, real=True).seq
        ops = OpCount()
        receive_fast2(x1 - 2 * x2, x1, x2, ops)
        assert ops.adds == n + 1 and ops.mults == 3 and ops.shifts == 2

    def test_zero_dc_rejected(self):
        x1 = REFERENCE[8][P1]
        with pytest.raises(ValueError):
            receive_fast2(np.ones(8), x1, REFERENCE[8][PJ])


def distinct_pool(rng, n=16, per_group=3, groups=(P1,)):
    entries = []
    for lam in groups:
        for _ in range(per_group):
            entries.append(random_invariant(rng, n, lam, real=True))
    return SignaturePool(tuple(entries))


class TestEstimator:
    def test_picks_scaled_signature(self):
        seed = simplest_seed(12)
        pool = SignaturePool(tuple(generating_function_gm(seed, m, 0) for m in (1, 2, 3)))
        est = estimate_signature(3.5 * pool[2].seq, pool, P1)
        assert est.signature_index == 2
        assert est.a_hat == pytest.approx(3.5, abs=1e-12)
        assert est.variance_score <= 1e-18

    def test_singleton_pool(self, rng):
        pool = distinct_pool(rng, per_group=1)
        comp = crandn(rng, 16)
        est = estimate_signature(comp, pool, P1)
        assert est.signature_index == 0
        assert est.a_hat == pytest.approx(np.mean(comp / pool[0].seq).real)

    def test_zero_component_tie(self, rng):
        pool = distinct_pool(rng)
        est = estimate_signature(np.zeros(16), pool, P1)
        assert (est.signature_index, est.a_hat, est.variance_score) == (0, 0.0, 0.0)

    def test_masks_zero_samples(self):
        # odd signatures vanish at n = 0 and n = N/2
        pool = SignaturePool(tuple(InvariantSequence(REFERENCE[8][lam], lam) for lam in (PJ,)))
        scores = txrx.signature_scores(-2 * pool[0].seq, pool, PJ)
        assert scores[0].samples == 6
        assert estimate_signature(-2 * pool[0].seq, pool, PJ).a_hat == pytest.approx(-2)

    def test_too_few_samples(self):
        x = basis("delta", 0, 4) + np.ones(4) / 2  # +1 eigenvector with full support
        pool = SignaturePool((InvariantSequence(x, P1),))
        assert estimate_signature(x, pool, P1).signature_index == 0
        sparse = InvariantSequence(np.array([0, 1, 0, -1.0]), MJ)
        with pytest.raises(ValueError):
            estimate_signature(np.zeros(4), SignaturePool((sparse, InvariantSequence(np.array([0, 0, 0, 0.0]), MJ, zero=True))), MJ)

    def test_empty_group(self, rng):
        with pytest.raises(ValueError):
            estimate_signature(np.zeros(16), distinct_pool(rng), M1)

    def test_pool_rejects_proportional(self, rng):
        g = random_invariant(rng, 8, P1)
        with pytest.raises(ValueError):
            SignaturePool((g, InvariantSequence(-3 * g.seq, P1)))

    def test_pool_groups(self, rng):
        pool = distinct_pool(rng, groups=(M1, P1))
        assert pool.groups == [M1, P1]
        assert pool.indices(P1) == [3, 4, 5]

    def test_wins_against_non_proportional(self, rng):
        pool = distinct_pool(rng, per_group=6)
        for k in range(6):
            scores = txrx.signature_scores(0.8 * pool[k].seq, pool, P1)
            assert scores[k].variance <= 1e-18
            assert all(s.variance > 1e-6 for i, s in enumerate(scores) if i != k)

    def test_detect_pooled(self, rng):
        pool = distinct_pool(rng, per_group=4, groups=rac.FULL)
        active = [1, 6, 8, 15]
        a = [0.5, -1.25, 2.0, -0.75]
        y = sum(c * pool[i].seq for c, i in zip(a, active))
        est = txrx.detect_pooled(y, pool, rac.FULL)
        assert [e.signature_index for e in est] == active
        np.testing.assert_allclose([e.a_hat for e in est], a, atol=1e-9)


class TestNoise:
    def test_zero_sigma(self, rng):
        y = rng.standard_normal(8)
        np.testing.assert_array_equal(add_noise(y, 0.0, 3), y)

    def test_deterministic(self):
        a = add_noise(np.zeros(16), 0.5, (7, 3))
        b = add_noise(np.zeros(16), 0.5, (7, 3))
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, add_noise(np.zeros(16), 0.5, (7, 4)))

    def test_statistics(self):
        n = add_noise(np.zeros(100_000), 0.25, 11)
        assert abs(n.std() / 0.25 - 1) <= 0.02
        assert abs(n.mean()) <= 0.01

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            add_noise(np.zeros(3), -1.0)
