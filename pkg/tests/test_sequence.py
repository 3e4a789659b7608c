import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eigenrac import sequence as sq
from eigenrac.sequence import Eigenvalue, basis, cyclic_convolve, dft, even_part, idft, odd_part, time_reverse

from conftest import crandn, direct_dft, rel_err

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
seqs = st.integers(1, 32).flatmap(
    lambda n: st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite))
).map(lambda t: t[0] + 1j * t[1])


class TestEigenvalue:
    def test_fourth_power_is_one(self):
        for lam in sq.EIGENVALUES:
            assert lam.complex**4 == 1
            assert lam**4 is Eigenvalue.PLUS_ONE
        assert len({lam.complex for lam in sq.EIGENVALUES}) == 4

    @pytest.mark.parametrize("text, lam", [("+1", "PLUS_ONE"), ("1", "PLUS_ONE"), ("-1", "MINUS_ONE"),
                                           ("j", "PLUS_J"), ("+j", "PLUS_J"), ("-j", "MINUS_J"),
                                           ("minus_j", "MINUS_J"), (-1j, "MINUS_J")])
    def test_parse(self, text, lam):
        assert Eigenvalue.parse(text) is Eigenvalue[lam]

    def test_parse_rejects(self):
        with pytest.raises(ValueError):
            Eigenvalue.parse("2")

    def test_algebra(self):
        assert Eigenvalue.PLUS_J * Eigenvalue.PLUS_J is Eigenvalue.MINUS_ONE
        assert Eigenvalue.PLUS_J.conjugate() is Eigenvalue.MINUS_J
        assert Eigenvalue.PLUS_J**3 is Eigenvalue.MINUS_J


class TestDFT:
    def test_impulse(self):
        np.testing.assert_allclose(dft(basis("delta", 0, 4)), [0.5] * 4, atol=1e-15)

    def test_simplest_invariant(self):
        x = basis("delta", 0, 8) + np.ones(8) / np.sqrt(8)
        np.testing.assert_allclose(dft(x), x, atol=1e-14)

    def test_matches_direct_sum(self, rng):
        x = crandn(rng, 16)
        assert rel_err(dft(x), direct_dft(x)) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 64, 256])
    def test_radix2_agrees_with_direct(self, rng, n):
        x = crandn(rng, 3, n)
        assert rel_err(dft(x, "radix2"), dft(x, "direct")) <= 1e-12
        assert rel_err(dft(x, "auto"), dft(x)) <= 1e-12

    def test_radix2_rejects_other_lengths(self):
        with pytest.raises(ValueError):
            dft(np.ones(6), "radix2")

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            dft([])
        with pytest.raises(ValueError):
            idft([])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            dft([1.0, np.nan])

    def test_batched(self, rng):
        x = crandn(rng, 5, 7)
        np.testing.assert_allclose(dft(x), np.stack([dft(r) for r in x]), atol=1e-13)

    def test_idft_of_constant(self):
        np.testing.assert_allclose(idft([0.5] * 4), basis("delta", 0, 4), atol=1e-15)

    def test_round_trip(self, rng):
        x = crandn(rng, 12)
        assert rel_err(dft(idft(x)), x) <= 1e-12
        assert rel_err(idft(dft(x)), x) <= 1e-12

    def test_idft_is_three_forward(self, rng):
        X = crandn(rng, 10)
        assert rel_err(idft(X), dft(dft(dft(X)))) <= 1e-12

    def test_square_is_reversal(self, rng):
        x = crandn(rng, 9)
        assert rel_err(dft(dft(x)), time_reverse(x)) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(seqs)
    def test_properties(self, x):
        nx = np.linalg.norm(x)
        X = dft(x)
        assert abs(np.linalg.norm(X) - nx) <= 1e-12 * max(nx, 1e-300) + 1e-300
        assert np.linalg.norm(dft(dft(dft(X))) - x) <= 1e-10 * nx + 1e-300
        assert np.linalg.norm(dft(time_reverse(x)) - time_reverse(X)) <= 1e-12 * nx + 1e-300


class TestTimeReverse:
    def test_unrolled(self):
        np.testing.assert_array_equal(time_reverse([1, 2, 3, 4]), [1, 4, 3, 2])

    def test_shifted_impulse(self):
        np.testing.assert_array_equal(time_reverse(basis("delta", 2, 6)), basis("delta", 4, 6))

    def test_involution(self, rng):
        x = crandn(rng, 11)
        np.testing.assert_array_equal(time_reverse(time_reverse(x)), x)


class TestConvolution:
    def test_identity(self, rng):
        x = crandn(rng, 8)
        np.testing.assert_allclose(cyclic_convolve(x, basis("delta", 0, 8)), x, atol=1e-15)

    def test_shift(self, rng):
        x = crandn(rng, 6)
        np.testing.assert_allclose(cyclic_convolve(x, basis("delta", 2, 6)), np.roll(x, 2), atol=1e-15)

    def test_convolution_theorem(self, rng):
        x, y = crandn(rng, 16), crandn(rng, 16)
        assert rel_err(dft(cyclic_convolve(x, y)), 4 * dft(x) * dft(y)) <= 1e-10

    def test_direct_definition(self, rng):
        x, y = crandn(rng, 7), crandn(rng, 7)
        ref = [sum(x[m] * y[(n - m) % 7] for m in range(7)) for n in range(7)]
        assert rel_err(cyclic_convolve(x, y), ref) <= 1e-13

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cyclic_convolve(np.ones(4), np.ones(5))

    @pytest.mark.parametrize("n", [1, 5, 16, 32])
    def test_commutative_bilinear(self, rng, n):
        x, y, z = crandn(rng, n), crandn(rng, n), crandn(rng, n)
        a, b = 0.3 - 2j, 1.7
        assert rel_err(cyclic_convolve(x, y), cyclic_convolve(y, x)) <= 1e-12
        lhs = cyclic_convolve(a * x + b * z, y)
        assert rel_err(lhs, a * cyclic_convolve(x, y) + b * cyclic_convolve(z, y)) <= 1e-12


class TestParity:
    def test_reconstruct(self, rng):
        x = crandn(rng, 7)
        np.testing.assert_allclose(even_part(x) + odd_part(x), x, atol=1e-15)

    def test_odd_zero_at_origin(self, rng):
        assert odd_part(crandn(rng, 9))[0] == 0

    def test_orthogonal(self, rng):
        x = crandn(rng, 10)
        assert abs(np.vdot(even_part(x), odd_part(x))) <= 1e-12 * np.vdot(x, x).real


class TestBasis:
    def test_delta(self):
        np.testing.assert_array_equal(basis("delta", 0, 4), [1, 0, 0, 0])

    def test_cosine(self):
        np.testing.assert_array_equal(basis("cosine", 1, 4), [1, 0, -1, 0])

    def test_sine_exact_zeros(self):
        np.testing.assert_array_equal(basis("sine", 2, 4), [0, 0, 0, 0])

    def test_exponential_pair(self):
        # under the omega**(-nk) kernel sqrt(N)*F(delta_m) is w_{-m}, not w_m
        n, m = 8, 3
        assert rel_err(dft(basis("delta", m, n)) * np.sqrt(n), basis("exponential", (-m) % n, n)) <= 1e-12
        assert rel_err(dft(basis("delta", m, n)) * np.sqrt(n), basis("exponential", m, n)) > 0.1

    def test_cos_sin_from_exponentials(self):
        n, m = 10, 3
        w, wm = basis("exponential", m, n), basis("exponential", n - m, n)
        np.testing.assert_allclose(basis("cosine", m, n), (w + wm) / 2, atol=1e-15)
        np.testing.assert_allclose(basis("sine", m, n), (w - wm) / 2j, atol=1e-15)
        assert np.all(basis("sine", m, n).imag == 0)

    @pytest.mark.parametrize("m", [-1, 4])
    def test_range(self, m):
        with pytest.raises(ValueError):
            basis("delta", m, 4)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            basis("ramp", 0, 4)
