"""Construction of DFT eigenvectors ("invariant sequences").

Three generators are provided:

* :func:`generate_prop1` folds a sequence through one full DFT cycle,
  ``x + lam*X + lam**2*x_rev + lam**3*X_rev``;
* :func:`generate_prop2` does the same with a pair of sequences using the
  convolution theorem;
* :func:`generate_family` specialises the pair version to an invariant seed,
  and :func:`generating_function_gm` / :func:`mapping_matrix` give its closed
  forms for unit-sample inputs.

All three fold-style generators land in the eigenspace of ``lam**3`` (the
conjugate of ``lam``), not ``lam`` itself. The closed-form generators ``g_m^(k)``
send a seed in ``V_mu`` to ``V_{mu * (-j)**k}``; with the seed
``delta_0 + w_0/sqrt(N)`` and ``m = 1`` they give, at unit scale:

    k = 0 -> +1,   k = 1 -> -j,   k = 2 -> -1,   k = 3 -> +j
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sequence import (
    EIGENVALUES,
    RTOL,
    Eigenvalue,
    as_sequence,
    basis,
    cyclic_convolve,
    dft,
    root_cos_sin,
    time_reverse,
)

#: outputs smaller than this fraction of their input scale are reported as zero
ZERO_RTOL = 1e-10

_MINUS_J = Eigenvalue.MINUS_J


def residual(x, lam: Eigenvalue) -> float:
    """Relative eigen-residual ``||F x - lam x|| / ||x||`` (0 for the zero sequence)."""
    x = as_sequence(x)
    nx = np.linalg.norm(x)
    if nx == 0:
        return 0.0
    return float(np.linalg.norm(dft(x) - lam.complex * x) / nx)


@dataclass(frozen=True, eq=False)
class InvariantSequence:
    """A sequence together with the eigenvalue it satisfies.

    ``zero`` marks a generator output that cancelled completely; such a
    sequence is stored as exact zeros and carries no eigenspace information.
    """

    seq: np.ndarray
    lam: Eigenvalue
    zero: bool = False
    tol: float = field(default=RTOL, repr=False)

    def __post_init__(self):
        seq = as_sequence(self.seq, name="seq")
        if seq.ndim != 1:
            raise ValueError("InvariantSequence holds a single 1-D sequence")
        object.__setattr__(self, "seq", seq)
        object.__setattr__(self, "lam", Eigenvalue.parse(self.lam))
        if not self.zero:
            if not np.any(seq):
                object.__setattr__(self, "zero", True)
            elif self.residual > self.tol:
                raise ValueError(
                    f"sequence is not an eigenvector for {self.lam} "
                    f"(relative residual {self.residual:.3g} > {self.tol:g})"
                )

    @property
    def N(self) -> int:
        return self.seq.shape[0]

    @property
    def residual(self) -> float:
        return residual(self.seq, self.lam)

    def __len__(self) -> int:
        return self.N

    def __array__(self, dtype=None, copy=None):
        return self.seq if dtype is None else self.seq.astype(dtype)


def _finish(g: np.ndarray, lam: Eigenvalue, scale: float) -> InvariantSequence:
    if np.linalg.norm(g) <= ZERO_RTOL * scale:
        return InvariantSequence(np.zeros_like(g), lam, zero=True)
    return InvariantSequence(g, lam)


def _coerce_invariant(x, tol: float = RTOL) -> InvariantSequence:
    if isinstance(x, InvariantSequence):
        return x
    seq = as_sequence(x)
    lam = classify(seq, tol)
    if lam is None:
        raise ValueError("seed sequence is not an invariant sequence")
    return InvariantSequence(seq, lam)


def generate_prop1(x, lam) -> InvariantSequence:
    """Fold ``x`` over one DFT period: ``x + lam X + lam^2 x_rev + lam^3 X_rev``.

    The result is an eigenvector with eigenvalue ``lam**3``. Inputs with no
    component in that eigenspace give the (flagged) zero sequence.
    """
    lam = Eigenvalue.parse(lam)
    x = as_sequence(x)
    X = dft(x)
    c = lam.complex
    terms = (x, c * X, c**2 * time_reverse(x), c**3 * time_reverse(X))
    scale = sum(np.linalg.norm(t) for t in terms)
    return _finish(sum(terms), lam**3, scale)


def generate_prop2(x, y, lam) -> InvariantSequence:
    """Pair generator built on the convolution theorem.

    Returns ``x*y + lam sqrt(N) X Y + lam^2 x_rev*y_rev + lam^3 sqrt(N) X_rev Y_rev``
    where ``*`` is cyclic convolution and products are entrywise. Eigenvalue
    ``lam**3``.
    """
    lam = Eigenvalue.parse(lam)
    x = as_sequence(x)
    y = as_sequence(y, name="y")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[-1]} != {y.shape[-1]}")
    rt = np.sqrt(x.shape[-1])
    X, Y = dft(x), dft(y)
    xr, yr = time_reverse(x), time_reverse(y)
    c = lam.complex
    terms = (
        cyclic_convolve(x, y),
        c * rt * X * Y,
        c**2 * cyclic_convolve(xr, yr),
        c**3 * rt * time_reverse(X) * time_reverse(Y),
    )
    scale = sum(np.linalg.norm(t) for t in terms) + rt * np.linalg.norm(x) * np.linalg.norm(y)
    return _finish(sum(terms), lam**3, scale)


def generate_family(x, y, lam, tol: float = RTOL) -> InvariantSequence:
    """Family generator around an invariant seed ``x`` with eigenvalue ``lam'``.

    ``g = x*y + lam lam' sqrt(N) x Y + lam^2 x_rev*y_rev + lam^3 lam' sqrt(N) x_rev Y_rev``

    Only ``y`` is transformed; the seed's own transform is replaced by
    ``lam' x``. Eigenvalue ``lam**3``.
    """
    seed = _coerce_invariant(x, tol)
    if not seed.zero and seed.residual > tol:
        raise ValueError("seed fails the invariance test")
    lam = Eigenvalue.parse(lam)
    xs = seed.seq
    y = as_sequence(y, name="y")
    if xs.shape != y.shape:
        raise ValueError(f"length mismatch: {xs.shape[-1]} != {y.shape[-1]}")
    rt = np.sqrt(xs.shape[-1])
    Y = dft(y)
    xr, yr = time_reverse(xs), time_reverse(y)
    c, cp = lam.complex, seed.lam.complex
    terms = (
        cyclic_convolve(xs, y),
        c * cp * rt * xs * Y,
        c**2 * cyclic_convolve(xr, yr),
        c**3 * cp * rt * xr * time_reverse(Y),
    )
    scale = sum(np.linalg.norm(t) for t in terms) + rt * np.linalg.norm(xs) * np.linalg.norm(y)
    return _finish(sum(terms), lam**3, scale)


def target_eigenvalue(source: Eigenvalue, k: int) -> Eigenvalue:
    """Eigenspace reached by ``g^(k)`` from a seed in ``V_source``."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"generator index k must be 0..3, got {k}")
    return Eigenvalue.parse(source) * _MINUS_J**k


def generating_function_gm(x, m: int, k: int, tol: float = RTOL) -> InvariantSequence:
    """Closed-form generating function ``g_m^(k)`` for an invariant seed ``x``.

    ====  ===============================================
    k=0   ``x * (d_m + d_-m) + 2 x cos_m``
    k=1   ``x * (d_m - d_-m) + 2 x sin_m``
    k=2   ``x * (d_m + d_-m) - 2 x cos_m``
    k=3   ``x * (d_m - d_-m) - 2 x sin_m``
    ====  ===============================================

    Output eigenvalue is ``lam' * (-j)**k``.
    """
    seed = _coerce_invariant(x, tol)
    xs = seed.seq
    n = xs.shape[-1]
    target = target_eigenvalue(seed.lam, k)
    if not 0 <= m < n:
        raise ValueError(f"index m={m} out of range for N={n}")
    d_pos = basis("delta", m, n)
    d_neg = basis("delta", (-m) % n, n)
    if k % 2 == 0:
        conv = cyclic_convolve(xs, d_pos + d_neg)
        mod = 2 * xs * basis("cosine", m, n)
    else:
        conv = cyclic_convolve(xs, d_pos - d_neg)
        mod = 2 * xs * basis("sine", m, n)
    g = conv + mod if k < 2 else conv - mod
    return _finish(g, target, 4 * np.linalg.norm(xs))


def _gm_columns(xs: np.ndarray, k: int) -> np.ndarray:
    # column m = g_m^(k); shifts of x realised as index gathers
    n = xs.shape[-1]
    idx = np.arange(n)
    m = idx[None, :]
    fwd = xs[(idx[:, None] - m) % n]  # x[n - m]
    bwd = xs[(idx[:, None] + m) % n]  # x[n + m]
    cos, sin = root_cos_sin(idx[:, None] * m, n)
    if k % 2 == 0:
        conv, mod = fwd + bwd, 2 * xs[:, None] * cos
    else:
        conv, mod = fwd - bwd, 2 * xs[:, None] * sin
    cols = conv + mod if k < 2 else conv - mod
    # each term is bounded by 2||x||; cancellation is judged against the seed
    cols[:, np.linalg.norm(cols, axis=0) <= ZERO_RTOL * 4 * np.linalg.norm(xs)] = 0
    return cols


@dataclass(frozen=True, eq=False)
class MappingMatrix:
    """Dense ``N x N`` matrix whose column ``m`` is ``g_m^(k)``.

    ``G @ y`` lies in ``V_lam`` for any ``y``, with ``lam`` given by
    :attr:`lam` (``source_lambda * (-j)**k``).
    """

    matrix: np.ndarray
    k: int
    source_lambda: Eigenvalue

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("mapping matrix must be square")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "source_lambda", Eigenvalue.parse(self.source_lambda))
        target_eigenvalue(self.source_lambda, self.k)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @property
    def lam(self) -> Eigenvalue:
        return target_eigenvalue(self.source_lambda, self.k)

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, m] for m in range(self.N)]

    def column_residuals(self) -> np.ndarray:
        """Relative residual of each column (0 for zero columns)."""
        cols = self.matrix.T
        res = np.linalg.norm(dft(cols) - self.lam.complex * cols, axis=1)
        nrm = np.linalg.norm(cols, axis=1)
        return np.divide(res, nrm, out=np.zeros_like(res), where=nrm > 0)

    def apply(self, y) -> InvariantSequence:
        y = as_sequence(y, name="y")
        if y.shape != (self.N,):
            raise ValueError(f"expected a length-{self.N} sequence")
        g = self.matrix @ y
        scale = float(np.sum(np.abs(y) * np.linalg.norm(self.matrix, axis=0)))
        return _finish(g, self.lam, scale)

    def __matmul__(self, y):
        return self.apply(y)


def mapping_matrix(x, k: int, tol: float = RTOL) -> MappingMatrix:
    """Eigenvector mapping matrix ``G^(k)`` built from the invariant seed ``x``.

    Columns run over ``m = 0 .. N-1`` in order.
    """
    seed = _coerce_invariant(x, tol)
    target_eigenvalue(seed.lam, k)
    return MappingMatrix(_gm_columns(seed.seq, k), k, seed.lam)


def classify(x, tol: float = RTOL) -> Eigenvalue | None:
    """Eigenvalue whose residual is smallest, or ``None`` if none is within ``tol``."""
    x = as_sequence(x)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("cannot classify the zero sequence")
    X = dft(x)
    best = min(EIGENVALUES, key=lambda lam: np.linalg.norm(X - lam.complex * x))
    if np.linalg.norm(X - best.complex * x) / nx <= tol:
        return best
    return None


def project_array(x, lam) -> np.ndarray:
    """Orthogonal projection onto ``V_lam`` along the last axis (batched)."""
    lam = Eigenvalue.parse(lam)
    x = as_sequence(x)
    X = dft(x)
    c = lam.conjugate().complex
    return (x + c * X + c**2 * time_reverse(x) + c**3 * time_reverse(X)) / 4


def project(x, lam) -> InvariantSequence:
    """Orthogonal projection of a single sequence onto ``V_lam``.

    The four projections are idempotent, mutually orthogonal and sum to ``x``.
    """
    lam = Eigenvalue.parse(lam)
    x = as_sequence(x)
    if x.ndim != 1:
        raise ValueError("project takes one sequence; use project_array for stacks")
    return _finish(project_array(x, lam), lam, float(np.linalg.norm(x)))


def simplest_seed(n: int) -> InvariantSequence:
    """``delta_0 + w_0 / sqrt(N)``, an invariant sequence with eigenvalue +1."""
    return InvariantSequence(basis("delta", 0, n) + np.ones(n) / np.sqrt(n), Eigenvalue.PLUS_ONE)


#: generator index k that sends the +1 seed to each eigenspace
K_FOR_TARGET = {target_eigenvalue(Eigenvalue.PLUS_ONE, k): k for k in range(4)}


@dataclass(frozen=True, eq=False)
class TableRow:
    """One representative invariant sequence and how it was obtained."""

    lam: Eigenvalue
    seq: InvariantSequence | None
    method: str
    k: int | None = None
    m: int | None = None


def representative(n: int, lam) -> TableRow:
    """A representative non-zero invariant sequence of length ``n`` in ``V_lam``.

    Tries ``g_m^(k)`` on :func:`simplest_seed` for ``m = 1, 2, ...`` (``m = 1``
    reproduces the classical listings for N = 6 and 8), then falls back to
    projecting unit samples. ``seq`` is ``None`` when ``V_lam`` is trivial for
    this ``n`` (e.g. ``+j`` for N = 4).
    """
    lam = Eigenvalue.parse(lam)
    seed = simplest_seed(n)
    k = K_FOR_TARGET[lam]
    for m in list(range(1, n)) + [0]:
        g = generating_function_gm(seed, m, k)
        if not g.zero:
            return TableRow(lam, g, "gm", k=k, m=m)
    for i in range(n):
        g = project(basis("delta", i, n), lam)
        if not g.zero:
            return TableRow(lam, g, "project-delta", m=i)
    return TableRow(lam, None, "empty")


def table(n: int) -> list[TableRow]:
    """One representative per eigenvalue, in the order +1, -1, +j, -j."""
    if n < 2:
        raise ValueError("table needs N >= 2")
    return [representative(n, lam) for lam in EIGENVALUES]


def fit_scale(candidate, reference) -> tuple[float, float]:
    """Positive real scale ``s`` minimising ``||s*candidate - reference||``.

    Returns ``(s, relative_error)``. A negative or complex best fit is
    reported with ``s`` set to NaN.
    """
    c = np.asarray(candidate, dtype=complex)
    r = np.asarray(reference, dtype=complex)
    cc = np.vdot(c, c).real
    if cc == 0:
        return float("nan"), float("inf")
    s = np.vdot(c, r) / cc
    err = float(np.linalg.norm(s * c - r) / max(np.linalg.norm(r), 1e-300))
    if abs(s.imag) > 1e-12 * abs(s) or s.real <= 0:
        return float("nan"), err
    return float(s.real), err
