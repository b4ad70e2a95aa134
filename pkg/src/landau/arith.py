"""Exact factored rationals, the additive prime-power cost l, and
high-precision logarithms with an exact comparison fallback.

A PrimeFraction is a product prod p^e with signed exponents, always kept in
canonical form (sorted primes, no zero exponents).  l(p^e) = p^e for e > 0
and the cost of a fraction is l(num) - l(den), so l is additive over
coprime parts.  Values are compared through cached high-precision logs; when
two logs agree to within a small guard band the comparison is redone with
exact integer cross-multiplication, which makes the order total and immune
to rounding.
"""

import math
import re

from mpmath import mp, mpf

from .errors import CapacityError

DEFAULT_PRECISION = 30
MIN_PRECISION = 20
# widths, in ulps at working precision, below which cmp distrusts the logs
CMP_GUARD_ULPS = 10

mp.dps = DEFAULT_PRECISION

_log_cache = {}


def set_precision(digits):
    """Fix the global working precision (significant decimal digits).

    Must be called before any computation whose cached logs should use it;
    raising it mid-run would silently mix precisions, so caches are cleared.
    """
    if digits < MIN_PRECISION:
        raise ValueError("working precision below %d digits is unsafe" % MIN_PRECISION)
    mp.dps = digits
    _log_cache.clear()


def log_int(n):
    """log n as an mpf, cached (used for primes and small constants)."""
    v = _log_cache.get(n)
    if v is None:
        v = _log_cache[n] = mp.log(n)
    return v


def log_product(ints):
    """Sum of log over an iterable of ints, chunking into exact products
    so the mpf rounding error stays at a few ulps regardless of length."""
    total = mpf(0)
    chunk = 1
    bits = 0
    for v in ints:
        chunk *= v
        bits += v.bit_length()
        if bits >= 4096:
            total += mp.log(chunk)
            chunk, bits = 1, 0
    if chunk != 1:
        total += mp.log(chunk)
    return total


def ell_pp(p, e):
    """l contribution of p^e: p^e for e > 0, -p^(-e) for e < 0, 0 for e = 0."""
    if e > 0:
        return p**e
    if e < 0:
        return -(p ** (-e))
    return 0


def _tree_product(values):
    values = list(values)
    if not values:
        return 1
    while len(values) > 1:
        values = [
            values[i] * values[i + 1] if i + 1 < len(values) else values[i]
            for i in range(0, len(values), 2)
        ]
    return values[0]


class PrimeFraction:
    """An exact positive rational in factored form with cached l and log."""

    __slots__ = ("factors", "ell", "_log")

    def __init__(self, factors, _ell=None):
        # factors: tuple of (prime, nonzero exponent), primes strictly ascending
        self.factors = factors
        self.ell = (
            _ell
            if _ell is not None
            else sum(ell_pp(p, e) for p, e in factors)
        )
        self._log = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def one(cls):
        return _ONE

    @classmethod
    def from_factors(cls, mapping):
        items = tuple(sorted((int(p), int(e)) for p, e in dict(mapping).items() if e))
        return cls(items)

    @classmethod
    def from_int(cls, n):
        """Factor a positive integer by trial division (small inputs only)."""
        if n <= 0:
            raise ValueError("PrimeFraction represents positive values")
        fac = []
        d = 2
        while d * d <= n:
            e = 0
            while n % d == 0:
                e += 1
                n //= d
            if e:
                fac.append((d, e))
            d += 1 if d == 2 else 2
        if n > 1:
            fac.append((n, 1))
        return cls(tuple(fac))

    @classmethod
    def from_prime_power(cls, p, e):
        return cls(((p, e),)) if e else _ONE

    # -- basic properties ----------------------------------------------------

    @property
    def log(self):
        if self._log is None:
            self._log = mp.fsum(e * log_int(p) for p, e in self.factors)
        return self._log

    def exponent(self, p):
        for q, e in self.factors:
            if q == p:
                return e
            if q > p:
                return 0
        return 0

    def is_one(self):
        return not self.factors

    def is_integer(self):
        return all(e > 0 for _, e in self.factors)

    def numerator(self):
        return _tree_product(p**e for p, e in self.factors if e > 0)

    def denominator(self):
        return _tree_product(p ** (-e) for p, e in self.factors if e < 0)

    def max_prime(self):
        return self.factors[-1][0] if self.factors else 1

    # -- arithmetic ------------------------------------------------------------

    def mul(self, other):
        if other.is_one():
            return self
        if self.is_one():
            return other
        a, b = self.factors, other.factors
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            if a[i][0] < b[j][0]:
                out.append(a[i])
                i += 1
            elif a[i][0] > b[j][0]:
                out.append(b[j])
                j += 1
            else:
                e = a[i][1] + b[j][1]
                if e:
                    out.append((a[i][0], e))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return PrimeFraction(tuple(out))

    def mul_prime_power(self, p, e):
        if e == 0:
            return self
        return self.mul(PrimeFraction(((p, e),)))

    def inverse(self):
        return PrimeFraction(tuple((p, -e) for p, e in self.factors), _ell=-self.ell)

    def div(self, other):
        return self.mul(other.inverse())

    __mul__ = mul

    def __truediv__(self, other):
        return self.div(other)

    # -- comparison --------------------------------------------------------------

    def cmp(self, other):
        """-1, 0 or +1; exact even when the logs nearly tie."""
        if self.factors == other.factors:
            return 0
        d = self.log - other.log
        guard = mpf(CMP_GUARD_ULPS) * mpf(10) ** (-mp.dps + 1)
        scale = max(abs(self.log), abs(other.log), mpf(1))
        if abs(d) > guard * scale:
            return 1 if d > 0 else -1
        q = self.div(other)
        num, den = q.numerator(), q.denominator()
        if num == den:
            return 0
        return 1 if num > den else -1

    def __eq__(self, other):
        return isinstance(other, PrimeFraction) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    # -- rendering -------------------------------------------------------------------

    def to_decimal(self, digit_budget=10**7):
        """The exact integer value; refuses non-integers and huge expansions."""
        if not self.is_integer():
            raise ValueError("fraction is not an integer; use rational()")
        digits = self.log / log_int(10)
        if digits > digit_budget:
            raise CapacityError(
                "decimal expansion needs ~%d digits, budget is %d"
                % (int(digits) + 1, digit_budget)
            )
        return self.numerator()

    def rational(self):
        """(numerator, denominator) as exact coprime integers."""
        return self.numerator(), self.denominator()

    def render(self, table=None):
        return render_factored(self.factors, table)

    def __repr__(self):
        return "PrimeFraction(%s)" % (self.render() or "1")


_ONE = PrimeFraction(())


def render_factored(factors, table=None):
    """Canonical text form: `2^9 * 3^6 * [11-41]^2 * [43-3923]`.

    Maximal runs of consecutive primes sharing an exponent are compressed to
    bracket ranges; this needs a prime table to certify adjacency, otherwise
    every factor is rendered alone.  Exponent 1 is omitted.
    """
    if not factors:
        return "1"
    parts = []
    i = 0
    while i < len(factors):
        p, e = factors[i]
        j = i
        if table is not None and p <= table.limit:
            while (
                j + 1 < len(factors)
                and factors[j + 1][1] == e
                and factors[j + 1][0] <= table.limit
                and factors[j + 1][0] == table.next_prime(factors[j][0])
            ):
                j += 1
        if j > i:
            base = "[%d-%d]" % (p, factors[j][0])
        else:
            base = str(p)
        parts.append(base if e == 1 else "%s^%d" % (base, e))
        i = j + 1
    return " * ".join(parts)


_TERM_RE = re.compile(
    r"^\s*(?:\[\s*(\d+)\s*-\s*(\d+)\s*\]|(\d+))\s*(?:\^\s*(-?\d+))?\s*$"
)


def parse_factored(text, table=None):
    """Parse the canonical rendering back into a PrimeFraction."""
    text = text.strip()
    if text == "1":
        return PrimeFraction.one()
    factors = {}
    for term in text.split("*"):
        m = _TERM_RE.match(term)
        if not m:
            raise ValueError("cannot parse factor %r" % term)
        exp = int(m.group(4)) if m.group(4) else 1
        if m.group(3) is not None:
            ps = [int(m.group(3))]
        else:
            if table is None:
                raise ValueError("bracket ranges need a prime table to expand")
            lo, hi = int(m.group(1)), int(m.group(2))
            a = table.count_upto(lo - 1)
            b = table.count_upto(hi)
            ps = [table.prime(i) for i in range(a + 1, b + 1)]
            if not ps or ps[0] != lo or ps[-1] != hi:
                raise ValueError("range [%d-%d] does not start/end on primes" % (lo, hi))
        for p in ps:
            factors[p] = factors.get(p, 0) + exp
    return PrimeFraction.from_factors(factors)
