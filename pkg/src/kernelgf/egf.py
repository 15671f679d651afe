"""Exact truncated exponential generating functions.

A :class:`TruncatedEGF` holds the prefix ``a_0 .. a_N`` of a labelled counting
sequence, i.e. the series ``sum a_n z^n / n!``.  Coefficients are kept as the
*counts* ``a_n`` (``int`` when integral, :class:`~fractions.Fraction` otherwise)
so that the binomial convolutions behind products, exponentials and logarithms
run in integer arithmetic for counting series.  The ordinary coefficients
``c_n = a_n / n!`` are available through :attr:`TruncatedEGF.coeffs`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


class SeriesError(ValueError):
    """Raised when a series operation is undefined for its arguments."""


def _norm(x) -> Number:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        x = Fraction(x.numerator, x.denominator)
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


@lru_cache(maxsize=None)
def _binom_row(n: int) -> tuple[int, ...]:
    return tuple(comb(n, k) for k in range(n + 1))


class TruncatedEGF:
    """Exponential generating function known up to ``z^order``.

    Binary operations truncate to the smaller of the two orders.
    """

    __slots__ = ("_a",)

    def __init__(self, counts: Iterable, order: int | None = None):
        a = [_norm(x) for x in counts]
        if order is not None:
            if order < 0:
                raise SeriesError("order must be nonnegative")
            a = (a + [0] * (order + 1))[: order + 1]
        if not a:
            raise SeriesError("a series needs at least one coefficient")
        self._a = tuple(a)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int | None = None) -> "TruncatedEGF":
        """Build from ordinary coefficients ``c_n`` (so ``a_n = n! c_n``)."""
        return cls([Fraction(c) * factorial(n) for n, c in enumerate(coeffs)], order)

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedEGF":
        return cls([c], order)

    @classmethod
    def z(cls, order: int) -> "TruncatedEGF":
        return cls([0, 1], order)

    @classmethod
    def monomial(cls, k: int, order: int, coeff=1) -> "TruncatedEGF":
        """``coeff * z^k`` (ordinary coefficient ``coeff``)."""
        a = [0] * (order + 1)
        if k <= order:
            a[k] = _norm(Fraction(coeff) * factorial(k))
        return cls(a)

    # -- views ------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._a) - 1

    @property
    def counts(self) -> tuple[Number, ...]:
        """``a_n = n! [z^n]`` for ``n = 0..order``."""
        return self._a

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a) / factorial(n) for n, a in enumerate(self._a))

    def count(self, n: int) -> Number:
        return self._a[n]

    def coeff(self, n: int) -> Fraction:
        return Fraction(self._a[n]) / factorial(n)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for zero."""
        for n, a in enumerate(self._a):
            if a:
                return n
        return None

    def is_counting(self) -> bool:
        """True iff every ``a_n`` is a nonnegative integer."""
        return all(isinstance(a, int) and a >= 0 for a in self._a)

    def check_counting(self, name: str = "series") -> "TruncatedEGF":
        for n, a in enumerate(self._a):
            if not (isinstance(a, int) and a >= 0):
                raise SeriesError(f"{name}: a_{n} = {a} is not a nonnegative integer")
        return self

    def truncate(self, order: int) -> "TruncatedEGF":
        if order > self.order:
            raise SeriesError(f"cannot extend order {self.order} to {order}")
        return TruncatedEGF(self._a[: order + 1])

    # -- ring operations --------------------------------------------------

    def _coerce(self, other) -> "TruncatedEGF":
        if isinstance(other, TruncatedEGF):
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedEGF.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedEGF([x + y for x, y in zip(self._a, other._a)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedEGF([-x for x in self._a])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedEGF([x - y for x, y in zip(self._a, other._a)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedEGF([x * other for x in self._a])
        if not isinstance(other, TruncatedEGF):
            return NotImplemented
        N = min(self.order, other.order)
        a, b = self._a, other._a
        out = []
        for n in range(N + 1):
            row = _binom_row(n)
            out.append(sum(row[k] * a[k] * b[n - k] for k in range(n + 1) if a[k] and b[n - k]))
        return TruncatedEGF(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = TruncatedEGF.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "TruncatedEGF":
        """Multiplicative inverse; needs a nonzero constant term."""
        a = self._a
        if not a[0]:
            raise SeriesError("inverse needs a nonzero constant term")
        inv0 = Fraction(1) / a[0]
        q = [_norm(inv0)]
        for n in range(1, len(a)):
            row = _binom_row(n)
            s = sum(row[k] * a[k] * q[n - k] for k in range(1, n + 1) if a[k])
            q.append(_norm(-s * inv0))
        return TruncatedEGF(q)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedEGF([Fraction(x) / other for x in self._a])
        if not isinstance(other, TruncatedEGF):
            return NotImplemented
        v = other.valuation()
        if v is None:
            raise SeriesError("division by the zero series")
        if v == 0:
            return self * other.inverse()
        # both sides lose v powers of z; the quotient is known to order N - v
        if self.valuation() is not None and self.valuation() < v:
            raise SeriesError("quotient is not a power series")
        return self.shift_down(v) * other.shift_down(v).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, TruncatedEGF):
            return self._a == other._a
        return NotImplemented

    def __hash__(self):
        return hash(self._a)

    def __repr__(self):
        return f"TruncatedEGF({list(self._a)!r})"

    # -- calculus ---------------------------------------------------------

    def derivative(self) -> "TruncatedEGF":
        """d/dz; the counts shift left, order drops by one."""
        if self.order == 0:
            return TruncatedEGF([0])
        return TruncatedEGF(self._a[1:])

    def antiderivative(self) -> "TruncatedEGF":
        """Integral from 0; the counts shift right, order rises by one."""
        return TruncatedEGF((0,) + self._a)

    def shift_down(self, k: int = 1) -> "TruncatedEGF":
        """Divide by ``z^k`` in the monomial sense; needs ``c_0..c_{k-1} = 0``."""
        if any(self._a[:k]):
            raise SeriesError(f"series is not divisible by z^{k}")
        out = []
        for n in range(self.order - k + 1):
            # c'_n = c_{n+k}  =>  a'_n = a_{n+k} n! / (n+k)!
            fall = factorial(n + k) // factorial(n)
            out.append(Fraction(self._a[n + k], fall))
        return TruncatedEGF(out)

    def scale(self, s) -> "TruncatedEGF":
        """The series ``f(s z)``."""
        s = _norm(s)
        p = 1
        out = []
        for a in self._a:
            out.append(a * p)
            p *= s
        return TruncatedEGF(out)

    # -- transcendental operations ------------------------------------------

    def exp(self) -> "TruncatedEGF":
        """exp(f) for f with zero constant term."""
        f = self._a
        if f[0]:
            raise SeriesError("exp needs a zero constant term")
        g = [1]
        for n in range(1, len(f)):
            row = _binom_row(n - 1)
            # g' = f' g
            g.append(sum(row[k - 1] * f[k] * g[n - k] for k in range(1, n + 1) if f[k]))
        return TruncatedEGF(g)

    def log(self) -> "TruncatedEGF":
        """log(f) for f with constant term 1."""
        f = self._a
        if f[0] != 1:
            raise SeriesError("log needs constant term 1")
        # h' f = f'  with  h'_m = h_{m+1}
        hp: list[Number] = []
        for m in range(len(f) - 1):
            row = _binom_row(m)
            s = f[m + 1] - sum(row[k] * f[k] * hp[m - k] for k in range(1, m + 1) if f[k])
            hp.append(s)
        return TruncatedEGF([0] + hp)

    def log_inv_one_minus(self) -> "TruncatedEGF":
        """ln(1/(1 - f)) for f with zero constant term."""
        if self._a[0]:
            raise SeriesError("ln(1/(1-f)) needs a zero constant term")
        return -(1 - self).log()

    def compose(self, inner: "TruncatedEGF") -> "TruncatedEGF":
        """``self(inner(z))``; needs ``inner`` to have zero constant term."""
        if inner.counts[0]:
            raise SeriesError("composition needs an inner series with zero constant term")
        N = min(self.order, inner.order)
        inner = inner.truncate(N)
        # sum a_n * inner^n / n!; the "sets of n" powers stay integral for
        # integral inner counts, unlike Horner with c_n = a_n / n!
        acc = [0] * (N + 1)
        power = TruncatedEGF.constant(1, N)
        for n, a in enumerate(self._a[: N + 1]):
            if n:
                power = power * inner / n
            if a:
                for m, p in enumerate(power.counts):
                    if p:
                        acc[m] += a * p
        return TruncatedEGF(acc)

    def __call__(self, inner: "TruncatedEGF") -> "TruncatedEGF":
        return self.compose(inner)

    def reversion(self) -> "TruncatedEGF":
        """Compositional inverse of f with ``f(0) = 0``, ``f'(0) != 0``."""
        a = self._a
        if a[0] or len(a) < 2 or not a[1]:
            raise SeriesError("reversion needs f(0) = 0 and f'(0) != 0")
        N = self.order
        z = TruncatedEGF.z(N)
        # Newton-free: g <- g - (f(g) - z)/f'(0), N rounds each fixing one coefficient
        g = z / a[1]
        for _ in range(N):
            g = g - (self.compose(g) - z) / a[1]
        return g


def _extend(s: TruncatedEGF, order: int) -> TruncatedEGF:
    return TruncatedEGF(s.counts[: order + 1], order)


def fixed_point(step, order: int, unknowns: int, name: str = "system"):
    """Solve ``x = step(x)`` for a tuple of series by plain iteration.

    ``step(x, k)`` evaluates the right-hand sides to order ``k``.  Every
    right-hand side must have a zero constant term, so after round ``r`` the
    coefficients up to ``z^r`` are final; round ``r`` therefore works to order
    ``r`` only, which gives the same result as full-order iteration.  One
    extra round at full order checks stability.
    """
    x = tuple(TruncatedEGF([0], 0) for _ in range(unknowns))
    for r in range(1, order + 1):
        x = tuple(step(tuple(_extend(s, r) for s in x), r))
    again = tuple(step(x, order))
    if again != x:
        raise SeriesError(f"{name}: fixed-point iteration did not stabilize in {order + 1} rounds")
    return x
