"""Exact scalars: rationals and the quadratic field Q(sqrt 3).

Certificates use plain rationals (`fractions.Fraction`); the extremal
constants alpha = 2*sqrt(3) - 3 and gamma = (3 - sqrt(3))/2 live in
Q(sqrt 3), so comparisons against them must be decided without floating
point. `QSqrt3` supports field arithmetic and an exact total order via
sign analysis of a + b*sqrt(3).
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


def _frac(x) -> Fraction:
    if isinstance(x, QSqrt3):
        if x.b != 0:
            raise ValueError(f"{x} is irrational")
        return x.a
    return Fraction(x)


@total_ordering
class QSqrt3:
    """An element a + b*sqrt(3) with rational a, b, kept in canonical form."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, *args):
        raise AttributeError("QSqrt3 is immutable")

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "QSqrt3":
        if isinstance(x, QSqrt3):
            return x
        return QSqrt3(Fraction(x), 0)

    def __add__(self, other):
        o = self._coerce(other)
        return QSqrt3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt3(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QSqrt3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QSqrt3":
        nrm = self.a * self.a - 3 * self.b * self.b
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt3)")
        return QSqrt3(self.a / nrm, -self.b / nrm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QSqrt3(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order -------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(3)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2
        d = a * a - 3 * b * b
        if a > 0:  # b < 0
            return (d > 0) - (d < 0)
        return (d < 0) - (d > 0)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    # -- misc ----------------------------------------------------------------

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * 3 ** 0.5

    def __repr__(self):
        return f"QSqrt3({self.a!r}, {self.b!r})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt3"
        return f"{self.a}+{self.b}*sqrt3" if self.b > 0 else f"{self.a}{self.b}*sqrt3"


SQRT3 = QSqrt3(0, 1)
ALPHA = QSqrt3(-3, 2)  # 2*sqrt(3) - 3, the limiting edge density
GAMMA = QSqrt3(Fraction(3, 2), Fraction(-1, 2))  # (3 - sqrt(3))/2, top part ratio


def scalar_from_string(s: str):
    """Parse "p/q" into Fraction or "a+b*sqrt3" / "a-b*sqrt3" into QSqrt3."""
    s = s.strip().replace(" ", "")
    if "sqrt3" not in s:
        return Fraction(s)
    body = s[: s.rindex("*sqrt3")] if "*sqrt3" in s else s
    # split into the rational part and the sqrt3 coefficient
    # forms: "b*sqrt3", "a+b*sqrt3", "a-b*sqrt3"
    idx = None
    depth_guard = body
    for i in range(len(depth_guard) - 1, 0, -1):
        if depth_guard[i] in "+-" and depth_guard[i - 1] not in "+-/*":
            idx = i
            break
    if idx is None:
        return QSqrt3(0, Fraction(body))
    a = Fraction(body[:idx])
    bstr = body[idx:]
    b = Fraction(bstr) if bstr not in ("+", "-") else Fraction(bstr + "1")
    return QSqrt3(a, b)


def scalar_to_string(x) -> str:
    if isinstance(x, QSqrt3):
        return str(x)
    return str(Fraction(x))


def as_fraction(x) -> Fraction:
    """Coerce a Scalar known to be rational into Fraction."""
    return _frac(x)
