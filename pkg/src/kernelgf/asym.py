"""Asymptotic constants with certified error bounds, and exact ratio tables.

Constants are evaluated in :mod:`mpmath` interval arithmetic, so each
:class:`HPDecimal` carries a guaranteed enclosure.  The singular behaviour of
the tree series at ``z = 1/(2e)`` is also expanded numerically in
``s = sqrt(1 - 2ez)`` (see :func:`puiseux_expansions`), which gives a second,
independent route to every limit and first-order correction.
"""

from __future__ import annotations

import csv
import io
from contextlib import contextmanager
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import factorial
from typing import Callable

import mpmath
from mpmath import iv, mp

from . import series as S

__all__ = [
    "HPDecimal",
    "Constants",
    "RatioRow",
    "RatioTable",
    "SingularData",
    "solve_lambda",
    "constants",
    "singular_expansions",
    "puiseux_expansions",
    "transfer_constants",
    "ratio_table",
    "RATIO_KINDS",
    "fit_inverse_sqrt",
]

DEFAULT_DIGITS = 50


def _bits(digits: int) -> int:
    return int(digits * 3.33) + 24


@contextmanager
def _prec(ctx, bits: int):
    saved = ctx.prec
    ctx.prec = bits
    try:
        yield
    finally:
        ctx.prec = saved


@dataclass(frozen=True)
class HPDecimal:
    """A decimal value with a guaranteed bound ``|true - value| <= error_bound``."""

    value: Decimal
    error_bound: Decimal

    def __post_init__(self):
        if not self.error_bound > 0:
            raise ValueError("error_bound must be positive")

    @classmethod
    def from_interval(cls, x, digits: int = DEFAULT_DIGITS) -> "HPDecimal":
        """Outward-rounded midpoint/radius form of an ``mpmath.iv`` interval."""
        with mp.workprec(_bits(digits) + 20), localcontext() as dctx:
            dctx.prec = digits + 20
            lo, hi = (mp.make_mpf(e) for e in x._mpi_)
            mid = (lo + hi) / 2
            value = Decimal(mpmath.nstr(mid, digits + 5, strip_zeros=False, min_fixed=-mp.inf, max_fixed=mp.inf))
            # decimal rounding of the midpoint is absorbed by the pad
            pad = Decimal(10) ** -(digits + 3)
            rad = Decimal(mpmath.nstr((hi - lo) / 2, 5, min_fixed=-mp.inf, max_fixed=mp.inf))
            return cls(value, rad * Decimal("1.01") + pad)

    def interval(self):
        with localcontext() as dctx:
            dctx.prec = len(self.value.as_tuple().digits) + 20
            lo = str(self.value - self.error_bound)
            hi = str(self.value + self.error_bound)
        return iv.mpf([lo, hi])

    def __float__(self):
        return float(self.value)

    def contains(self, x) -> bool:
        return abs(Decimal(str(x)) - self.value) <= self.error_bound

    def digits(self, k: int) -> str:
        """``value`` truncated (not rounded) to ``k`` decimals."""
        sign = "-" if self.value < 0 else ""
        whole, _, frac = str(abs(self.value)).partition(".")
        return f"{sign}{whole}.{(frac + '0' * k)[:k]}"

    def __str__(self):
        return f"{self.value} ± {self.error_bound:.1E}"


def solve_lambda(digits: int = DEFAULT_DIGITS) -> HPDecimal:
    """Root of ``2x = exp(-x)`` by Newton's method, certified by a sign change."""
    if digits < 1:
        raise ValueError("digits must be positive")
    with mp.workprec(_bits(digits)):
        x = mp.mpf("0.35")
        tol = mp.mpf(10) ** -(digits + 5)
        for _ in range(200):
            e = mp.exp(-x)
            step = (2 * x - e) / (2 + e)
            x -= step
            if abs(step) < tol:
                break
        value = Decimal(mpmath.nstr(x, digits + 5, min_fixed=-mp.inf, max_fixed=mp.inf))
    err = Decimal(10) ** -digits
    with _prec(iv, _bits(digits)), localcontext() as dctx:
        dctx.prec = digits + 20
        lo = iv.mpf(str(value - err))
        hi = iv.mpf(str(value + err))
        f_lo = 2 * lo - iv.exp(-lo)
        f_hi = 2 * hi - iv.exp(-hi)
        # f is increasing; the enclosures must sit strictly on either side of 0
        if not (f_lo.b < 0 < f_hi.a):
            raise ArithmeticError("could not certify the root of 2x = exp(-x)")
    return HPDecimal(value, err)


@dataclass(frozen=True)
class Constants:
    lam: HPDecimal
    green_root_limit: HPDecimal
    green_root_1n_coeff: HPDecimal
    red_circuit_limit: HPDecimal
    unicircuit_limit: HPDecimal
    unicircuit_1n_coeff: HPDecimal
    unicycle_sqrt_coeff: HPDecimal

    def as_dict(self) -> dict[str, HPDecimal]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def constants(lam: HPDecimal | None = None, digits: int = DEFAULT_DIGITS) -> Constants:
    """Closed-form limits and first-order corrections at ``lam``.

    ``unicircuit_1n_coeff`` has no closed form and comes from the transfer of
    the singular expansions (:func:`transfer_constants`).
    """
    lam = lam or solve_lambda(digits)
    with _prec(iv, _bits(digits)):
        L = lam.interval()
        one = iv.mpf(1)
        green = (one - L) / (one + L)
        green_1n = -(L**2) * (L + 4) / (one + L) ** 5
        red = one / 2 - one / (2 * iv.sqrt(5))
        unic = (3 * L**3 + L**2 - L - 1) / ((one + L) ** 2 * (L - 1))
        unicyc = 2 * L**3 * iv.sqrt(2) / ((one + L) ** 2 * (one - L) * iv.sqrt(iv.pi))
        tc = transfer_constants(lam, digits)
        h = lambda x: HPDecimal.from_interval(x, digits)  # noqa: E731
        return Constants(
            lam=lam,
            green_root_limit=h(green),
            green_root_1n_coeff=h(green_1n),
            red_circuit_limit=h(red),
            unicircuit_limit=h(unic),
            unicircuit_1n_coeff=h(tc["unicircuit_1n_coeff"]),
            unicycle_sqrt_coeff=h(unicyc),
        )


# -- singular expansions ------------------------------------------------------


@dataclass(frozen=True)
class SingularData:
    """``f(z) = constant + sqrt_coeff * sqrt(1 - 2ez) + O(1 - 2ez)``."""

    constant: HPDecimal
    sqrt_coeff: HPDecimal


def singular_expansions(lam: HPDecimal | None = None, digits: int = DEFAULT_DIGITS) -> dict[str, SingularData]:
    """Leading singular data of ``T``, ``T_r``, ``T_g`` at ``z = 1/(2e)``.

    ``T = C(2z)/2`` and ``C(1/e) = 1`` put the constant of ``T`` at 1/2.
    """
    lam = lam or solve_lambda(digits)
    with _prec(iv, _bits(digits)):
        L = lam.interval()
        one = iv.mpf(1)
        r2 = iv.sqrt(2)
        raw = {
            "T": (one / 2, -one / r2),
            "Tr": (L, -L * r2 / (one + L)),
            "Tg": (one / 2 - L, -(one / r2) * (one - L) / (one + L)),
        }
        # additivity T = T_r + T_g, term by term
        for i in range(2):
            diff = raw["T"][i] - raw["Tr"][i] - raw["Tg"][i]
            if not (diff.a <= 0 <= diff.b):
                raise ArithmeticError("singular data of T_r and T_g do not add up to T")
        h = lambda x: HPDecimal.from_interval(x, digits)  # noqa: E731
        return {k: SingularData(h(c), h(q)) for k, (c, q) in raw.items()}


class _Series:
    """Truncated power series over an mpmath context (``iv`` or ``mp``)."""

    def __init__(self, c, K):
        self.c = list(c)[: K + 1] + [0] * max(0, K + 1 - len(c))
        self.K = K

    def __add__(self, o):
        o = o if isinstance(o, _Series) else _Series([o], self.K)
        return _Series([a + b for a, b in zip(self.c, o.c)], self.K)

    __radd__ = __add__

    def __neg__(self):
        return _Series([-a for a in self.c], self.K)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, _Series):
            return _Series([a * o for a in self.c], self.K)
        return _Series([sum(self.c[i] * o.c[n - i] for i in range(n + 1)) for n in range(self.K + 1)], self.K)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, _Series):
            return _Series([a / o for a in self.c], self.K)
        q = []
        for n in range(self.K + 1):
            q.append((self.c[n] - sum(o.c[k] * q[n - k] for k in range(1, n + 1))) / o.c[0])
        return _Series(q, self.K)

    def exp(self, ctx):
        # g' = f' g with g_0 = exp(f_0)
        g = [ctx.exp(self.c[0])]
        for n in range(1, self.K + 1):
            g.append(sum(k * self.c[k] * g[n - k] for k in range(1, n + 1)) / n)
        return _Series(g, self.K)

    def log(self, ctx):
        f0 = self.c[0]
        u = self / f0
        # h' = u'/u
        h = [ctx.log(f0)]
        d = [0] * (self.K + 1)
        for n in range(1, self.K + 1):
            d[n] = n * u.c[n] - sum(u.c[k] * d[n - k] for k in range(1, n))
            h.append(d[n] / n)
        return _Series(h, self.K)

    def compose(self, inner):
        acc = _Series([self.c[self.K]], self.K)
        for n in range(self.K - 1, -1, -1):
            acc = acc * inner + self.c[n]
        return acc

    def reversion(self):
        # f = a1 x + ..., find g with f(g(x)) = x, one coefficient per round
        a1 = self.c[1]
        x = _Series([0, 1], self.K)
        g = x / a1
        for _ in range(self.K):
            g = g - (self.compose(g) - x) / a1
        return g


@dataclass(frozen=True)
class Puiseux:
    """``log_coeff * ln(1/s) + sum regular[k] s^k`` with ``s = sqrt(1 - 2ez)``."""

    log_coeff: object
    regular: list


def puiseux_expansions(lam: HPDecimal | None = None, order: int = 6, digits: int = DEFAULT_DIGITS, ctx=iv):
    """Expansions in ``s = sqrt(1 - 2ez)`` of every series used asymptotically.

    Returns a dict of :class:`Puiseux` for ``T, Tr, Tg, U, D, F, V, G``.
    """
    lam = lam or solve_lambda(digits)
    K = order + 2
    with _prec(ctx, _bits(digits)):
        L = lam.interval() if ctx is iv else mp.mpf(str(lam.value))
        one = ctx.mpf(1)
        # C(w) = 1 - y with (1 - y) e^y = 1 - t^2, t = sqrt(1 - ew); for
        # T = C(2z)/2, t = s.  With 1 - (1-y)e^y = y^2 q(y), solve
        # y sqrt(2 q(y)) = tau := sqrt(2) s.
        qser = _Series([one * (k - 1) / factorial(k) for k in range(2, K + 3)], K)
        root = ((2 * qser).log(ctx) / 2).exp(ctx)
        x = _Series([0, 1], K)
        y_of_tau = (x * root).reversion()
        s_scale = _Series([0, ctx.sqrt(2)], K)
        y = y_of_tau.compose(s_scale)
        T = (1 - y) / 2
        # T_r = lam + rho, (lam + rho) e^rho = 2 lam T
        g = (x + L) * x.exp(ctx) - L
        rho = g.reversion().compose(T * (2 * L) - L)
        Tr = rho + L
        Tg = T - Tr
        T_unr = T - T * T
        D = -(1 - Tr * Tr).log(ctx) / 2
        U = T_unr - Tg - (1 - Tg - T * Tr).log(ctx)
        F = T_unr - (1 - T).log(ctx) - T
        # 1 - 2T = y = sqrt(2) s (y / tau); -ln(1 - 2T)/2 = ln(1/s)/2 - ln(sqrt 2)/2 - ln(y/tau)/2
        y_over = _Series(y_of_tau.c[1:] + [0], K).compose(s_scale)
        half_log = -(y_over.log(ctx)) / 2 - ctx.log(ctx.sqrt(2)) / 2
        V_reg = T_unr - T + Tr - T * T / 2 - (1 + Tr).log(ctx) + half_log
        G_reg = T_unr + half_log - T - T * T / 2
        half = one / 2
        out = {
            "T": Puiseux(0, T.c[: order + 1]),
            "Tr": Puiseux(0, Tr.c[: order + 1]),
            "Tg": Puiseux(0, Tg.c[: order + 1]),
            "U": Puiseux(0, U.c[: order + 1]),
            "D": Puiseux(0, D.c[: order + 1]),
            "F": Puiseux(0, F.c[: order + 1]),
            "V": Puiseux(half, V_reg.c[: order + 1]),
            "G": Puiseux(half, G_reg.c[: order + 1]),
        }
    return out


def _ratio_1n(num: list, den: list):
    """Limit and 1/n coefficient of ``[z^n] num / [z^n] den`` for sqrt-type singularities.

    ``[x^n](1-x)^(3/2) / [x^n](1-x)^(1/2) = -3/(2n) + O(n^-2)``.
    """
    b1, b3 = num[1], num[3]
    B1, B3 = den[1], den[3]
    return b1 / B1, -(b3 * B1 - b1 * B3) * 3 / (2 * B1**2)


def transfer_constants(lam: HPDecimal | None = None, digits: int = DEFAULT_DIGITS) -> dict:
    """Limits and first-order corrections obtained from :func:`puiseux_expansions`.

    Returned as ``mpmath.iv`` intervals.
    """
    lam = lam or solve_lambda(digits)
    P = puiseux_expansions(lam, digits=digits)
    with _prec(iv, _bits(digits)):
        green, green_1n = _ratio_1n(P["Tg"].regular, P["T"].regular)
        UD = [a - b for a, b in zip(P["U"].regular, P["D"].regular)]
        unic, unic_1n = _ratio_1n(UD, P["F"].regular)
        # log terms cancel to leading order: ratio = 1 - c / sqrt(n)
        VD = [a - b for a, b in zip(P["V"].regular, P["D"].regular)]
        c = (VD[1] - P["G"].regular[1]) / (P["V"].log_coeff * iv.sqrt(iv.pi))
        return {
            "green_root_limit": green,
            "green_root_1n_coeff": green_1n,
            "unicircuit_limit": unic,
            "unicircuit_1n_coeff": unic_1n,
            "unicycle_sqrt_coeff": c,
        }


# -- exact ratio tables ---------------------------------------------------------


@dataclass(frozen=True)
class RatioRow:
    n: int
    num: int
    den: int
    ratio: Decimal
    limit: Decimal
    scaled_residual: Decimal


@dataclass
class RatioTable:
    kind: str
    law: str  # "1/n" or "1/sqrt(n)"
    predicted: Decimal  # predicted scaled residual
    rows: list[RatioRow] = field(default_factory=list)

    def row(self, n: int) -> RatioRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "num", "den", "ratio", "limit", "scaled_residual"])
        for r in self.rows:
            w.writerow([r.n, r.num, r.den, r.ratio, r.limit, r.scaled_residual])
        return buf.getvalue()

    def to_text(self, places: int = 10) -> str:
        q = Decimal(10) ** -places
        head = f"{'n':>5} {'ratio':>{places + 4}} {'limit':>{places + 4}} {'scaled_residual':>{places + 6}}"
        lines = [f"# {self.kind}: ratio -> limit, scaled residual ({self.law} law) -> {self.predicted.quantize(q)}", head]
        for r in self.rows:
            lines.append(
                f"{r.n:>5} {r.ratio.quantize(q):>{places + 4}} {r.limit.quantize(q):>{places + 4}} "
                f"{r.scaled_residual.quantize(q):>{places + 6}}"
            )
        return "\n".join(lines) + "\n"


def _red_circuit_counts(N: int):
    biv = S.red_circuit_bivariate(N)
    du, L = biv.du_at_1(), biv.marginal()
    return lambda n: (du.count(n), n * L.count(n))


def _counts(kind: str, N: int) -> Callable[[int], tuple[int, int]]:
    if kind == "green_root":
        ts = S.trees(N, check=False)
        return lambda n: (ts.Tg.count(n), ts.T.count(n))
    if kind == "red_circuit":
        return _red_circuit_counts(N)
    if kind == "unicircuit":
        U, D = S.unicircuit_series(N, check=False), S.two_kernel_series(N, check=False)
        F, _ = S.uncolored_series(N, check=False)
        return lambda n: (U.count(n) - D.count(n), F.count(n))
    if kind == "unicycle":
        V, D = S.unicycle_series(N, check=False), S.two_kernel_series(N, check=False)
        _, G = S.uncolored_series(N, check=False)
        return lambda n: (V.count(n) - D.count(n), G.count(n))
    raise KeyError(kind)


RATIO_KINDS = ("green_root", "red_circuit", "unicircuit", "unicycle")


def ratio_table(kind: str, n_max: int, digits: int = 30, consts: Constants | None = None) -> RatioTable:
    """Exact count ratios for ``n = 2..n_max`` with scaled residuals.

    The residual is scaled by ``n`` for the 1/n laws and by ``sqrt(n)`` for
    the unicycle law.
    """
    if kind not in RATIO_KINDS:
        raise KeyError(f"unknown ratio kind {kind!r}")
    if not 2 <= n_max <= 400:
        raise ValueError("n_max must be in 2..400")
    consts = consts or constants()
    limit, predicted, law = {
        "green_root": (consts.green_root_limit, consts.green_root_1n_coeff, "1/n"),
        "red_circuit": (consts.red_circuit_limit, None, "1/n"),
        "unicircuit": (consts.unicircuit_limit, consts.unicircuit_1n_coeff, "1/n"),
        "unicycle": (None, consts.unicycle_sqrt_coeff, "1/sqrt(n)"),
    }[kind]
    lim = Decimal(1) if limit is None else limit.value
    pred = Decimal(0) if predicted is None else predicted.value
    if kind == "unicycle":
        pred = -pred
    counts = _counts(kind, n_max)
    with localcontext() as dctx:
        dctx.prec = digits
        lim, pred = +lim, +pred
        table = RatioTable(kind=kind, law=law, predicted=pred)
        for n in range(2, n_max + 1):
            num, den = counts(n)
            if den == 0:
                raise ZeroDivisionError(f"{kind}: zero denominator at n={n}")
            # one rounding, at the final division
            frac = Fraction(num) / Fraction(den)
            ratio = Decimal(frac.numerator) / Decimal(frac.denominator)
            scale = Decimal(n) if law == "1/n" else Decimal(n).sqrt()
            table.rows.append(RatioRow(n, int(num), int(den), ratio, lim, (ratio - lim) * scale))
    return table


def fit_inverse_sqrt(table: RatioTable, n_lo: int, n_hi: int) -> float:
    """Least-squares ``c`` in ``ratio ~ 1 - c/sqrt(n)`` over ``n_lo..n_hi``."""
    xs, ys = [], []
    for r in table.rows:
        if n_lo <= r.n <= n_hi:
            xs.append(float(r.n) ** -0.5)
            ys.append(1.0 - float(r.ratio))
    return sum(x * y for x, y in zip(xs, ys)) / sum(x * x for x in xs)
