"""Digital transmission over the real adder channel.

Users send ``b``-bit words. A uniform D/A maps each word to a coefficient
``a`` in ``[-M, M]`` which scales the user's signature; the channel adds the
scaled signatures. The receiver separates eigenspaces with :mod:`eigenrac.rac`
and quantizes the recovered coefficients back to words.

In the pooled multiuser mode every eigenspace hosts a group of signatures, one
active per frame, and the receiver picks the active one blind with
:func:`estimate_signature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rac
from .eigen import InvariantSequence
from .sequence import RTOL, Eigenvalue, as_sequence, realify

#: relative threshold below which a signature sample is excluded from division
EPS_DIV = 1e-9
#: normalized inner product at or above which two signatures count as proportional
PROPORTIONAL_TOL = 1e-9


@dataclass(frozen=True)
class FrameConfig:
    """Per-frame transmission parameters.

    Each user sends ``b`` bits per frame interval; the interval itself is not
    simulated.
    """

    b: int
    M: float
    E_max: float = math.inf
    N: int | None = None

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise ValueError(f"bit depth b must be a positive integer, got {self.b}")
        if not self.M > 0 or not math.isfinite(self.M):
            raise ValueError(f"peak amplitude M must be positive and finite, got {self.M}")
        if not self.E_max > 0:
            raise ValueError(f"E_max must be positive, got {self.E_max}")
        if self.N is not None and self.N < 1:
            raise ValueError("N must be positive")

    @property
    def levels(self) -> int:
        return 2**self.b

    @property
    def step(self) -> float:
        """Spacing between adjacent D/A levels."""
        return 2 * self.M / (self.levels - 1)

    @property
    def bits_per_frame(self) -> int:
        return self.b


def da_convert(word, cfg: FrameConfig):
    """Map ``word`` in ``[0, 2**b)`` to ``-M + word * 2M/(2**b - 1)``.

    Accepts scalars or integer arrays. Endpoints are exact: 0 -> -M and
    ``2**b - 1`` -> +M.
    """
    w = np.asarray(word)
    if w.dtype.kind not in "iu" and not np.all(np.equal(np.mod(w, 1), 0)):
        raise ValueError("words must be integers")
    top = cfg.levels - 1
    if np.any(w < 0) or np.any(w > top):
        raise ValueError(f"word out of range [0, {top}]")
    a = cfg.M * ((2 * w.astype(float) - top) / top)
    return float(a) if a.ndim == 0 else a


def ad_convert(a, cfg: FrameConfig):
    """Nearest D/A level, clamped to the grid.

    Ties go to the smaller word; distances equal to within ``1e-12`` of a
    level step count as ties, so a coefficient that is zero up to rounding
    behaves like an exact zero.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficient must be finite")
    top = cfg.levels - 1
    t = (a / cfg.M + 1) * top / 2
    lo = np.clip(np.floor(t), 0, top).astype(np.int64)
    hi = np.minimum(lo + 1, top)
    d_lo = np.abs(a - da_convert(lo, cfg))
    d_hi = np.abs(a - da_convert(hi, cfg))
    w = np.where(d_hi < d_lo - 1e-12 * cfg.step, hi, lo)
    return int(w) if w.ndim == 0 else w


def dynamic_range(E_max: float, signatures) -> float:
    """Largest peak ``M`` with ``||sum a_i x_i||^2 <= E_max`` whenever ``|a_i| <= M``.

    ``M = sqrt(E_max / sum ||x_i||^2)``. The bound is only valid for mutually
    orthogonal signatures, which is what one-per-eigenspace assignment gives;
    anything else is rejected.
    """
    if not E_max > 0:
        raise ValueError("E_max must be positive")
    xs = [as_sequence(x, name="signature") for x in signatures]
    if not xs:
        raise ValueError("no signatures given")
    norms = [float(np.linalg.norm(x)) for x in xs]
    total = sum(n * n for n in norms)
    if total == 0:
        raise ValueError("all signatures are zero")
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if norms[i] and norms[j]:
                c = abs(np.vdot(xs[i], xs[j])) / (norms[i] * norms[j])
                if c > 1e-9:
                    raise ValueError(
                        f"signatures {i} and {j} are not orthogonal (|cos| = {c:.3g}); "
                        "the energy bound does not apply"
                    )
    return math.sqrt(E_max / total)


def _stack(signatures) -> np.ndarray:
    rows = [as_sequence(np.asarray(s), name="signature") for s in signatures]
    if any(r.ndim != 1 for r in rows) or len({r.shape for r in rows}) != 1:
        raise ValueError("signatures must be 1-D sequences of one length")
    return np.stack(rows)


def transmit(words, signatures, cfg: FrameConfig) -> np.ndarray:
    """Channel output ``sum_i da_convert(word_i) * x_i``.

    ``words`` may be ``(users,)`` for one frame or ``(frames, users)``; the
    result is ``(N,)`` or ``(frames, N)``.
    """
    sig = _stack(signatures)
    w = np.asarray(words)
    if w.shape[-1:] != (sig.shape[0],):
        raise ValueError(f"{w.shape[-1] if w.ndim else 1} words for {sig.shape[0]} signatures")
    a = np.asarray(da_convert(w, cfg), dtype=float)
    return realify(a @ sig)


def _signature_lambdas(signatures, sel: rac.EigenspaceSelection):
    lams = tuple(s.lam for s in signatures)
    if lams != sel.lambdas:
        raise ValueError(
            f"signature eigenvalues {','.join(map(str, lams))} do not match selection {sel}"
        )


def receive_coefficients(y, signatures, sel) -> np.ndarray:
    """Separate users and estimate each coefficient as ``Re<x_i, part_i> / ||x_i||^2``.

    Works on one frame ``(N,)`` or a stack ``(frames, N)``; returns
    ``(users,)`` or ``(frames, users)``.
    """
    sel = rac.EigenspaceSelection.parse(sel)
    signatures = list(signatures)
    _signature_lambdas(signatures, sel)
    parts = rac.decode(y, sel)
    out = []
    for x, part in zip(signatures, parts):
        xs = x.seq
        e = np.vdot(xs, xs).real
        if e == 0:
            raise ValueError("zero signature")
        out.append((part @ xs.conj()).real / e)
    return np.stack(out, axis=-1)


def receive_full(y, signatures, sel, cfg: FrameConfig):
    """Full receiver: RAC separation, projection onto each signature, A/D."""
    return ad_convert(receive_coefficients(y, signatures, sel), cfg)


@dataclass
class OpCount:
    """Arithmetic tally for :func:`receive_fast2`. Halvings are counted as shifts."""

    adds: int = 0
    mults: int = 0
    shifts: int = 0


def receive_fast2(y, x1, x2, ops: OpCount | None = None) -> tuple[float, float]:
    """Noiseless two-user shortcut for signatures in ``V_+1`` and ``V_-1``.

    Uses only the DC sample: ``Y[0] = sum(y) / sqrt(N)``, then
    ``a1 = ((y[0] + Y[0]) / 2) / x1[0]`` and ``a2 = ((y[0] - Y[0]) / 2) / x2[0]``.
    ``1/x1[0]``, ``1/x2[0]`` and ``1/sqrt(N)`` are receiver constants, so a
    frame costs N+1 additions, three multiplications and two halvings. Pass an
    :class:`OpCount` to have them tallied.
    """
    y = as_sequence(y, name="y")
    if y.ndim != 1:
        raise ValueError("receive_fast2 takes one frame")
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    if x1[0] == 0 or x2[0] == 0:
        raise ValueError("both signatures need a non-zero sample at index 0")
    if ops is None:
        ops = OpCount()
    n = y.shape[0]
    inv1, inv2, inv_rt = 1 / x1[0], 1 / x2[0], 1 / math.sqrt(n)

    total = y[0]
    for v in y[1:]:
        total = total + v
        ops.adds += 1
    Y0 = total * inv_rt
    ops.mults += 1
    s, d = y[0] + Y0, y[0] - Y0
    ops.adds += 2
    a1 = (s * 0.5) * inv1
    a2 = (d * 0.5) * inv2
    ops.shifts += 2
    ops.mults += 2
    return float(np.real(a1)), float(np.real(a2))


@dataclass(frozen=True, eq=False)
class SignaturePool:
    """Signatures grouped by eigenspace; indices are positions in ``entries``."""

    entries: tuple[InvariantSequence, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("empty signature pool")
        n = entries[0].N
        for i, e in enumerate(entries):
            if not isinstance(e, InvariantSequence):
                raise TypeError("pool entries must be InvariantSequence")
            if e.N != n:
                raise ValueError("pool entries must share one length")
            if e.zero:
                raise ValueError(f"pool entry {i} is the zero sequence")
            if e.residual > RTOL:
                raise ValueError(f"pool entry {i} fails the invariance test")
        for lam in self.groups:
            idx = self.indices(lam)
            for a in range(len(idx)):
                for b in range(a + 1, len(idx)):
                    xa, xb = entries[idx[a]].seq, entries[idx[b]].seq
                    c = abs(np.vdot(xa, xb)) / (np.linalg.norm(xa) * np.linalg.norm(xb))
                    if c >= 1 - PROPORTIONAL_TOL:
                        raise ValueError(f"pool entries {idx[a]} and {idx[b]} are proportional")

    @property
    def N(self) -> int:
        return self.entries[0].N

    @property
    def groups(self) -> list[Eigenvalue]:
        seen = []
        for e in self.entries:
            if e.lam not in seen:
                seen.append(e.lam)
        return seen

    def indices(self, lam) -> list[int]:
        lam = Eigenvalue.parse(lam)
        return [i for i, e in enumerate(self.entries) if e.lam is lam]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i) -> InvariantSequence:
        return self.entries[i]


@dataclass(frozen=True)
class SymbolEstimate:
    signature_index: int
    a_hat: float
    variance_score: float


@dataclass(frozen=True)
class SignatureScore:
    index: int
    variance: float
    mean: complex
    samples: int = field(default=0)


def signature_scores(component, pool: SignaturePool, group) -> list[SignatureScore]:
    """Sample mean and variance of ``component / x_i`` for every ``x_i`` in ``group``.

    Samples where ``|x_i[n]| < EPS_DIV * max|x_i|`` are dropped. The variance
    is the unbiased sample variance, ``sum |z - mean|^2 / (n - 1)``.
    """
    comp = as_sequence(component, name="component")
    if comp.shape != (pool.N,):
        raise ValueError(f"component must have length {pool.N}")
    idx = pool.indices(group)
    if not idx:
        raise ValueError(f"pool has no signatures in group {Eigenvalue.parse(group)}")
    scores = []
    for i in idx:
        x = pool[i].seq
        mag = np.abs(x)
        mask = mag >= EPS_DIV * mag.max()
        if mask.sum() < 2:
            raise ValueError(f"pool entry {i} has fewer than 2 usable samples")
        z = comp[mask] / x[mask]
        mean = z.mean()
        var = float(np.sum(np.abs(z - mean) ** 2) / (z.size - 1))
        scores.append(SignatureScore(i, var, complex(mean), int(z.size)))
    return scores


def estimate_signature(component, pool: SignaturePool, group) -> SymbolEstimate:
    """Blind signature detection by minimum ratio variance.

    For each pooled signature ``x_i`` of the group, ``z_i = component / x_i``
    is constant exactly when the component is a multiple of ``x_i``. The
    winner (lowest index on ties) gives ``a_hat = mean(z)``.
    """
    scores = signature_scores(component, pool, group)
    best = min(scores, key=lambda s: s.variance)  # min keeps the first on ties
    return SymbolEstimate(best.index, float(best.mean.real), best.variance)


def detect_pooled(y, pool: SignaturePool, sel) -> list[SymbolEstimate]:
    """Separate eigenspaces, then estimate the active signature in each group."""
    sel = rac.EigenspaceSelection.parse(sel)
    parts = rac.decode(y, sel)
    return [estimate_signature(p, pool, lam) for p, lam in zip(parts, sel.lambdas)]


def add_noise(y, sigma: float, seed=None) -> np.ndarray:
    """Add i.i.d. real Gaussian noise of standard deviation ``sigma``.

    ``seed`` may be an int or a sequence of ints (e.g. ``(seed, frame)``) and
    fixes the draw exactly.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    y = np.asarray(y)
    if sigma == 0:
        return y.copy()
    rng = np.random.default_rng(seed)
    return y + rng.normal(0.0, sigma, size=y.shape)
