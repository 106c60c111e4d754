"""The four calculi of the duality diamond.

Each corner fixes a step operator acting on polynomials.  With twist entry
``x`` the step is

=========  ======================  =========================
corner     step(p, x)              many-body model
=========  ======================  =========================
q          x * p(q z)              trigonometric RS (tRS)
eps        x * p(z + eps)          trigonometric CM (tCM)
rational   p'(z) + x p(z)          rational CM (rCM)
trig       z p'(z) + x p(z)        rational RS (rRS)
=========  ======================  =========================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .scalar import is_exact, to_exact

__all__ = ["CornerKind", "Corner", "parse_corner"]


class CornerKind(str, enum.Enum):
    QMULT = "q"
    EPSADD = "eps"
    RATDIFF = "rational"
    TRIGDIFF = "trig"


_ALIASES = {
    "q": CornerKind.QMULT,
    "qmult": CornerKind.QMULT,
    "xxz": CornerKind.QMULT,
    "trs": CornerKind.QMULT,
    "eps": CornerKind.EPSADD,
    "epsilon": CornerKind.EPSADD,
    "epsadd": CornerKind.EPSADD,
    "xxx": CornerKind.EPSADD,
    "tcm": CornerKind.EPSADD,
    "rational": CornerKind.RATDIFF,
    "rat": CornerKind.RATDIFF,
    "ratdiff": CornerKind.RATDIFF,
    "rgaudin": CornerKind.RATDIFF,
    "rcm": CornerKind.RATDIFF,
    "trig": CornerKind.TRIGDIFF,
    "trigdiff": CornerKind.TRIGDIFF,
    "tgaudin": CornerKind.TRIGDIFF,
    "rrs": CornerKind.TRIGDIFF,
}

LAX_TAG = {
    CornerKind.QMULT: "tRS",
    CornerKind.EPSADD: "tCM",
    CornerKind.RATDIFF: "rCM",
    CornerKind.TRIGDIFF: "rRS",
}


@dataclass(frozen=True)
class Corner:
    kind: CornerKind
    param: object = None

    def __post_init__(self):
        if self.kind is CornerKind.QMULT:
            if self.param is None or self.param == 0:
                raise ValueError("q-multiplicative corner needs a nonzero q")
        elif self.kind is CornerKind.EPSADD:
            if self.param is None:
                raise ValueError("additive corner needs eps")
        elif self.param is not None:
            raise ValueError(f"{self.kind.value} corner takes no parameter")

    @classmethod
    def q(cls, q):
        return cls(CornerKind.QMULT, q)

    @classmethod
    def eps(cls, eps):
        return cls(CornerKind.EPSADD, eps)

    @classmethod
    def rational(cls):
        return cls(CornerKind.RATDIFF)

    @classmethod
    def trig(cls):
        return cls(CornerKind.TRIGDIFF)

    @property
    def is_shift(self) -> bool:
        return self.kind in (CornerKind.QMULT, CornerKind.EPSADD)

    @property
    def lax_tag(self) -> str:
        return LAX_TAG[self.kind]

    def exact(self) -> "Corner":
        if self.param is None:
            return self
        return Corner(self.kind, to_exact(self.param))

    @property
    def is_exact(self) -> bool:
        return self.param is None or is_exact(self.param)

    def step(self, p, x):
        """Apply the twisted step operator with twist entry ``x`` to ``p``."""
        if self.kind is CornerKind.QMULT:
            return p.scale_arg(self.param) * x
        if self.kind is CornerKind.EPSADD:
            return p.translate(self.param) * x
        if self.kind is CornerKind.RATDIFF:
            return p.derivative() + p * x
        return p.euler() + p * x

    def _qpow(self, n: int):
        q = to_exact(self.param) if is_exact(self.param) else self.param
        return q ** n

    def move(self, z, n: int = 1):
        """Image of the point ``z`` under the n-th power of the shift."""
        if self.kind is CornerKind.QMULT:
            return z * self._qpow(n)
        if self.kind is CornerKind.EPSADD:
            return z + n * self.param
        raise ValueError(f"{self.kind.value} corner has no shift")

    def shift_poly(self, p, n: int = 1):
        """``p`` composed with the n-th power of the shift."""
        if self.kind is CornerKind.QMULT:
            return p.scale_arg(self._qpow(n))
        if self.kind is CornerKind.EPSADD:
            return p.translate(n * self.param)
        raise ValueError(f"{self.kind.value} corner has no shift")

    def vandermonde_base(self, x):
        """Node entering the Vandermonde matrix for twist entry ``x``."""
        if self.kind is CornerKind.QMULT:
            return self.param * x
        if self.kind is CornerKind.TRIGDIFF:
            return 1 + x
        return x

    def to_json(self) -> dict:
        out = {"corner": self.kind.value}
        if self.kind is CornerKind.QMULT:
            out["q"] = self.param
        elif self.kind is CornerKind.EPSADD:
            out["eps"] = self.param
        return out


def parse_corner(name: str, param=None) -> Corner:
    try:
        kind = _ALIASES[str(name).strip().lower()]
    except KeyError:
        raise ValueError(f"unknown corner {name!r}") from None
    if kind in (CornerKind.RATDIFF, CornerKind.TRIGDIFF):
        return Corner(kind)
    return Corner(kind, param)
