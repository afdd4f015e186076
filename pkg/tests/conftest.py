"""Shared helpers for the test suite."""

from fractions import Fraction

from hypothesis import settings

settings.register_profile("suite", max_examples=25, deadline=None,
                          derandomize=True)
settings.load_profile("suite")


class QuadExt:
    """Exact arithmetic in Q[sqrt(d)]: values x + y*sqrt(d), Fraction x, y.

    Only needs to be good enough to push a quadratic surd through rational
    formulas and decide signs exactly; d is a fixed nonnegative integer that
    must agree between operands.
    """

    __slots__ = ("x", "y", "d")

    def __init__(self, x, y, d):
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.d = int(d)

    def _lift(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise ValueError(f"mixed radicands {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.d)
        return None

    # ---- ring ops ----

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.x + o.x, self.y + o.y, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.x, -self.y, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.x * o.x + self.y * o.y * self.d,
                       self.x * o.y + self.y * o.x, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        nrm = o.x * o.x - o.y * o.y * o.d
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q[sqrt(d)]")
        inv = QuadExt(o.x / nrm, -o.y / nrm, self.d)
        return self * inv

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QuadExt(1, 0, self.d)
        for _ in range(n):
            out = out * self
        return out

    # ---- exact ordering ----

    def _sign(self):
        x, y = self.x, self.y
        if y == 0:
            return (x > 0) - (x < 0)
        if x == 0:
            return (y > 0) - (y < 0)
        if x > 0 and y > 0:
            return 1
        if x < 0 and y < 0:
            return -1
        mag = x * x - y * y * self.d
        if x > 0:   # y < 0: positive iff x beats |y| sqrt(d)
            return (mag > 0) - (mag < 0)
        return (mag < 0) - (mag > 0)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() == 0

    def __lt__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() < 0

    def __le__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() <= 0

    def __gt__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() > 0

    def __ge__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() >= 0

    __hash__ = None

    def __float__(self):
        import math
        return float(self.x) + float(self.y) * math.sqrt(self.d)

    def __abs__(self):
        return self if self._sign() >= 0 else -self

    def __repr__(self):
        return f"QuadExt({self.x}, {self.y}, d={self.d})"
