"""Periodic complex sequences and the unitary DFT.

Sequences are plain numpy arrays. Every routine works on the last axis, so a
stack of frames with shape ``(..., N)`` is processed in one call. Indexing is
modulo ``N`` throughout.

The transform is fixed to

    X[k] = N**-0.5 * sum_n x[n] * exp(-2j*pi*n*k/N)

so that applying it twice time-reverses a sequence and four times is the
identity. Nothing downstream works under any other normalization.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

#: default relative tolerance for "equal" and for eigenvector residuals
RTOL = 1e-9
#: absolute floor for values that should vanish
ATOL = 1e-12


class Eigenvalue(enum.Enum):
    """The four fourth roots of unity, i.e. the only possible DFT eigenvalues."""

    PLUS_ONE = "+1"
    PLUS_J = "+j"
    MINUS_ONE = "-1"
    MINUS_J = "-j"

    @property
    def exponent(self) -> int:
        """``p`` such that the eigenvalue equals ``j**p``."""
        return _EXPONENT[self]

    @property
    def complex(self) -> complex:
        return _COMPLEX[self.exponent]

    @classmethod
    def from_exponent(cls, p: int) -> "Eigenvalue":
        return _BY_EXPONENT[p % 4]

    @classmethod
    def parse(cls, text) -> "Eigenvalue":
        """Accept ``"+1"``, ``"-j"``, ``"j"``, ``"1"``, enum names or complex numbers."""
        if isinstance(text, Eigenvalue):
            return text
        if isinstance(text, (complex, float, int)) and not isinstance(text, bool):
            return cls.from_complex(complex(text))
        s = str(text).strip().lower().replace(" ", "")
        if s.upper() in cls.__members__:
            return cls[s.upper()]
        if s in ("1", "+1"):
            return cls.PLUS_ONE
        if s == "-1":
            return cls.MINUS_ONE
        if s in ("j", "+j", "1j", "+1j", "i", "+i"):
            return cls.PLUS_J
        if s in ("-j", "-1j", "-i"):
            return cls.MINUS_J
        raise ValueError(f"not a fourth root of unity: {text!r}")

    @classmethod
    def from_complex(cls, z: complex, tol: float = 1e-9) -> "Eigenvalue":
        for p, ref in enumerate(_COMPLEX):
            if abs(z - ref) <= tol:
                return _BY_EXPONENT[p]
        raise ValueError(f"not a fourth root of unity: {z!r}")

    def conjugate(self) -> "Eigenvalue":
        return Eigenvalue.from_exponent(-self.exponent)

    def __mul__(self, other):
        if isinstance(other, Eigenvalue):
            return Eigenvalue.from_exponent(self.exponent + other.exponent)
        return self.complex * other

    def __rmul__(self, other):
        return other * self.complex

    def __pow__(self, p: int) -> "Eigenvalue":
        return Eigenvalue.from_exponent(self.exponent * p)

    def __complex__(self) -> complex:
        return self.complex

    def __str__(self) -> str:
        return self.value


_EXPONENT = {
    Eigenvalue.PLUS_ONE: 0,
    Eigenvalue.PLUS_J: 1,
    Eigenvalue.MINUS_ONE: 2,
    Eigenvalue.MINUS_J: 3,
}
_BY_EXPONENT = {p: lam for lam, p in _EXPONENT.items()}
_COMPLEX = (1 + 0j, 1j, -1 + 0j, -1j)

EIGENVALUES = (Eigenvalue.PLUS_ONE, Eigenvalue.MINUS_ONE, Eigenvalue.PLUS_J, Eigenvalue.MINUS_J)


def as_sequence(x, *, name: str = "x") -> np.ndarray:
    """Validate and coerce to a complex array whose last axis is the period."""
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0 or a.shape[-1] == 0:
        raise ValueError(f"{name} must be a non-empty sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def _same_length(x: np.ndarray, y: np.ndarray) -> int:
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"length mismatch: {x.shape[-1]} != {y.shape[-1]}")
    return x.shape[-1]


def root_cos_sin(r, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos`` and ``sin`` of ``2*pi*r/n`` for integer ``r``, exact at quarter turns.

    ``r`` is reduced modulo ``n`` first so large index products keep their
    phase accuracy.
    """
    r = np.asarray(r) % n
    phase = 2 * np.pi * r / n
    c, s = np.cos(phase), np.sin(phase)
    quarter = (4 * r) % n == 0
    q = (4 * r) // n
    c = np.where(quarter, np.choose(q % 4, [1.0, 0.0, -1.0, 0.0]), c)
    s = np.where(quarter, np.choose(q % 4, [0.0, 1.0, 0.0, -1.0]), s)
    return c, s


@lru_cache(maxsize=128)
def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix ``[omega**(-n*k)] / sqrt(N)`` (read-only, cached)."""
    if n < 1:
        raise ValueError("N must be positive")
    idx = np.arange(n)
    c, s = root_cos_sin(np.outer(idx, idx), n)
    w = (c - 1j * s) / np.sqrt(n)
    w.setflags(write=False)
    return w


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    if bits == 0:
        return np.zeros(1, dtype=int)
    return np.array([int(format(i, f"0{bits}b")[::-1], 2) for i in range(n)])


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    batch = x.shape[:-1]
    a = x[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        c, s = root_cos_sin(np.arange(half), size)
        twiddle = c - 1j * s
        a = a.reshape(*batch, n // size, size)
        even = a[..., :half]
        odd = a[..., half:] * twiddle
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(*batch, n)
        size *= 2
    return a / np.sqrt(n)


def dft(x, method: str = "direct") -> np.ndarray:
    """Unitary DFT along the last axis.

    Parameters
    ----------
    x : array_like
        Sequence, or stack of sequences, of period ``N``.
    method : {"direct", "radix2", "auto"}
        ``"direct"`` is the O(N^2) matrix product used as the reference.
        ``"radix2"`` is an iterative Cooley-Tukey path for power-of-two
        ``N``; ``"auto"`` picks it whenever it applies.
    """
    x = as_sequence(x)
    n = x.shape[-1]
    if method == "auto":
        method = "radix2" if _is_pow2(n) else "direct"
    if method == "direct":
        return x @ dft_matrix(n)
    if method == "radix2":
        if not _is_pow2(n):
            raise ValueError(f"radix-2 path needs a power-of-two length, got {n}")
        return _fft_radix2(x)
    raise ValueError(f"unknown DFT method {method!r}")


def idft(X) -> np.ndarray:
    """Inverse unitary DFT (same as three forward transforms)."""
    X = as_sequence(X, name="X")
    return X @ dft_matrix(X.shape[-1]).conj()


def time_reverse(x) -> np.ndarray:
    """``x[(N - n) mod N]``; index 0 stays put."""
    x = as_sequence(x)
    return np.roll(x[..., ::-1], 1, axis=-1)


def cyclic_convolve(x, y) -> np.ndarray:
    """Cyclic convolution ``sum_m x[m] * y[(n - m) mod N]`` along the last axis."""
    x = as_sequence(x)
    y = as_sequence(y, name="y")
    n = _same_length(x, y)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return np.einsum("...nm,...m->...n", y[..., idx], x)


def even_part(x) -> np.ndarray:
    x = as_sequence(x)
    return (x + time_reverse(x)) / 2


def odd_part(x) -> np.ndarray:
    x = as_sequence(x)
    return (x - time_reverse(x)) / 2


def basis(kind: str, m: int, n: int) -> np.ndarray:
    """Elementary sequences of length ``n``.

    ``delta``: unit sample at index ``m``; ``exponential``: ``omega**(m*n)``;
    ``cosine`` and ``sine``: the real and imaginary parts of the exponential,
    i.e. ``(w_m + w_-m)/2`` and ``(w_m - w_-m)/2j``.
    """
    if n < 1:
        raise ValueError("N must be positive")
    if not 0 <= m < n:
        raise ValueError(f"index m={m} out of range for N={n}")
    c, s = root_cos_sin(m * np.arange(n), n)
    if kind == "delta":
        out = np.zeros(n, dtype=complex)
        out[m] = 1.0
        return out
    if kind == "exponential":
        return c + 1j * s
    if kind == "cosine":
        return c.astype(complex)
    if kind == "sine":
        return s.astype(complex)
    raise ValueError(f"unknown basis kind {kind!r}")


def norm(x) -> float:
    return float(np.linalg.norm(np.asarray(x)))


def allclose(a, b, rtol: float = RTOL, atol: float = ATOL) -> bool:
    """Relative comparison on the whole vector, with an absolute floor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    diff = np.linalg.norm(a - b)
    return bool(diff <= max(atol, rtol * max(np.linalg.norm(a), np.linalg.norm(b))))


def realify(x: np.ndarray, tol: float = ATOL) -> np.ndarray:
    """Drop an imaginary part that is numerically zero; leave complex data alone."""
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.all(np.abs(x.imag) <= tol * max(1.0, float(np.max(np.abs(x), initial=0.0)))):
        return x.real.copy()
    return x
