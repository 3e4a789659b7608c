"""Real adder channel: superposition and closed-form user separation.

Each user transmits an invariant sequence from its own eigenspace; the channel
adds them. Because the DFT acts on every user by a known fourth root of unity,
``y`` together with ``Y = F y`` (and, for three or four users, the even/odd
split of each) gives enough independent equations to recover every user.

Supported selections (user order is significant and never canonicalised):

* two users: ``(+1,-1) (+1,+j) (+1,-j) (-1,+j) (-1,-j) (+j,-j)``
* three users: ``(+1,-1,+j) (+1,-1,-j) (+1,+j,-j) (-1,+j,-j)``
* four users: ``(+1,-1,+j,-j)``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import classify
from .sequence import Eigenvalue, as_sequence, dft, even_part, odd_part

P1, M1, PJ, MJ = Eigenvalue.PLUS_ONE, Eigenvalue.MINUS_ONE, Eigenvalue.PLUS_J, Eigenvalue.MINUS_J

PAIRS = ((P1, M1), (P1, PJ), (P1, MJ), (M1, PJ), (M1, MJ), (PJ, MJ))
TRIPLES = ((P1, M1, PJ), (P1, M1, MJ), (P1, PJ, MJ), (M1, PJ, MJ))
FULL = (P1, M1, PJ, MJ)
VALID = PAIRS + TRIPLES + (FULL,)


@dataclass(frozen=True)
class EigenspaceSelection:
    """Ordered eigenspace assignment; user ``i`` transmits from ``lambdas[i]``."""

    lambdas: tuple[Eigenvalue, ...]

    def __post_init__(self):
        lams = tuple(Eigenvalue.parse(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if len(set(lams)) != len(lams):
            raise ValueError(f"eigenspaces must be distinct: {self}")
        if lams not in VALID:
            raise ValueError(f"unsupported eigenspace selection {self}")

    @classmethod
    def parse(cls, text) -> "EigenspaceSelection":
        if isinstance(text, EigenspaceSelection):
            return text
        if isinstance(text, str):
            text = [t for t in text.split(",") if t.strip()]
        return cls(tuple(text))

    def __len__(self) -> int:
        return len(self.lambdas)

    def __iter__(self):
        return iter(self.lambdas)

    def __str__(self) -> str:
        return ",".join(lam.value for lam in self.lambdas)


def selections(users: int | None = None) -> list[EigenspaceSelection]:
    return [EigenspaceSelection(s) for s in VALID if users is None or len(s) == users]


def channel_superpose(users) -> np.ndarray:
    """Entrywise sum of 2 to 4 user sequences (noiseless channel)."""
    users = [as_sequence(u, name="user") for u in users]
    if not 2 <= len(users) <= 4:
        raise ValueError(f"the channel carries 2 to 4 users, got {len(users)}")
    shape = users[0].shape
    if any(u.shape != shape for u in users):
        raise ValueError("user sequences must share one length")
    y = np.sum(users, axis=0)
    return y.real if not np.any(y.imag) else y


# Two-user closed forms, (y, Y) -> (x1, x2), each solving
# {y = x1 + x2, Y = l1 x1 + l2 x2}. Note (+1,+j) user 1 is (Y - jy)/(1-j)
# and (+1,-j) user 2 is (y - Y)/(1+j).
_J = 1j
_DECODE2 = {
    (P1, M1): lambda y, Y: ((y + Y) / 2, (y - Y) / 2),
    (P1, PJ): lambda y, Y: ((-_J * y + Y) / (1 - _J), (y - Y) / (1 - _J)),
    (P1, MJ): lambda y, Y: ((_J * y + Y) / (1 + _J), (y - Y) / (1 + _J)),
    (M1, PJ): lambda y, Y: ((_J * y - Y) / (1 + _J), (y + Y) / (1 + _J)),
    (M1, MJ): lambda y, Y: ((-_J * y - Y) / (1 - _J), (y + Y) / (1 - _J)),
    (PJ, MJ): lambda y, Y: ((y - _J * Y) / 2, (y + _J * Y) / 2),
}

# Three-user closed forms, (E{y}, O{y}, Y) -> (x1, x2, x3).
_DECODE3 = {
    (P1, M1, PJ): lambda e, o, Y: ((e - _J * o + Y) / 2, (e + _J * o - Y) / 2, o),
    (P1, M1, MJ): lambda e, o, Y: ((e + _J * o + Y) / 2, (e - _J * o - Y) / 2, o),
    (P1, PJ, MJ): lambda e, o, Y: (e, (o + _J * e - _J * Y) / 2, (o - _J * e + _J * Y) / 2),
    (M1, PJ, MJ): lambda e, o, Y: (e, (o - _J * e - _J * Y) / 2, (o + _J * e + _J * Y) / 2),
}


def _check_selection(sel, users: int) -> EigenspaceSelection:
    sel = EigenspaceSelection.parse(sel)
    if len(sel) != users:
        raise ValueError(f"expected a {users}-user selection, got {sel}")
    return sel


def _validate(parts, sel: EigenspaceSelection) -> None:
    bad = []
    for i, (x, lam) in enumerate(zip(parts, sel.lambdas)):
        for row in np.atleast_2d(x):
            if np.linalg.norm(row) > 0 and classify(row) is not lam:
                bad.append(i + 1)
                break
    if bad:
        raise ValueError(f"users {bad} are not in their assigned eigenspaces for {sel}")


def decode2(y, sel, validate: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Separate two users from ``y = x1 + x2``."""
    sel = _check_selection(sel, 2)
    y = as_sequence(y, name="y")
    parts = _DECODE2[sel.lambdas](y, dft(y))
    if validate:
        _validate(parts, sel)
    return parts


def decode3(y, sel, validate: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Separate three users from ``y = x1 + x2 + x3`` using the even/odd split."""
    sel = _check_selection(sel, 3)
    y = as_sequence(y, name="y")
    parts = _DECODE3[sel.lambdas](even_part(y), odd_part(y), dft(y))
    if validate:
        _validate(parts, sel)
    return parts


def decode4(y, sel=FULL, validate: bool = False):
    """Separate four users, ordered ``(+1, -1, +j, -j)``."""
    sel = _check_selection(sel, 4)
    y = as_sequence(y, name="y")
    Y = dft(y)
    ey, oy, eY, oY = even_part(y), odd_part(y), even_part(Y), odd_part(Y)
    parts = ((ey + eY) / 2, (ey - eY) / 2, (oy - _J * oY) / 2, (oy + _J * oY) / 2)
    if validate:
        _validate(parts, sel)
    return parts


def decode(y, sel, validate: bool = False):
    """Dispatch to :func:`decode2`, :func:`decode3` or :func:`decode4`."""
    sel = EigenspaceSelection.parse(sel)
    return {2: decode2, 3: decode3, 4: decode4}[len(sel)](y, sel, validate=validate)
