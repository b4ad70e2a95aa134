"""The balanced-fraction maximum G(p_k, m) and its two algorithms.

G(p_k, m) is the largest fraction Q_1...Q_s/(q_1...q_s) over primes
3 <= q_s < ... < q_1 <= p_k < p_{k+1} <= Q_1 < ... < Q_s whose swap cost
sum(Q_i - q_i) stays within m.  Writing the window primes P_1 < ... < P_R
around p_k = P_K, the complement trick turns the maximum into a minimum
H(j, P_r; m) over j-tuples of window primes with a sum constraint, which
satisfies a two-term recursion in (j, r).  H(j, P_r; .) is a non-increasing
step function of m, so each state is a breakpoint list and the recursion is
a shift-scale plus a pointwise min; states below their feasibility onset
stay empty, which keeps the total work near quadratic in m.

For large m the recursion over windows is replaced by a reduction to
G(p_{k+1}, m') for small m', valid as soon as an even budget delta with
p_{k+1}+delta-m prime and G(p_{k+1}, delta) >= 1 + delta/p_{k+1} exists
below 2m/9; delta1(p_k) is the smallest even budget making that search
guaranteed, and both algorithms agree on an overlap band of m.
"""

import math
import os
from bisect import bisect_right

from .arith import PrimeFraction
from .errors import CapacityError, Delta1CeilingError, InvariantViolation

SMALL_M_CUTOFF = 3000     # below this the step-function recursion is fast
TRIAL_WIDTH = 10          # first truncated window: ten primes above p_k
UPTO_GRANULARITY = 256    # cache capacity rounding for per-prime G tables
LOG_GUARD = 1e-9          # float-log ties below this are settled exactly

_DELTA1_CACHE_VERSION = "landau-delta1-v2"


class _Node:
    """One H value: a product of distinct window primes, shared as a chain."""

    __slots__ = ("p", "up", "logf")

    def __init__(self, p, up):
        self.p = p
        self.up = up
        self.logf = math.log(p) + (up.logf if up is not None else 0.0)


def _node_primes(node):
    out = []
    while node is not None:
        out.append(node.p)
        node = node.up
    return out


def _node_int(node):
    v = 1
    while node is not None:
        v *= node.p
        node = node.up
    return v


def _node_less(a, b):
    """a < b as exact products; fast path through the cached float logs."""
    la = a.logf if a is not None else 0.0
    lb = b.logf if b is not None else 0.0
    if abs(la - lb) > LOG_GUARD:
        return la < lb
    return _node_int(a) < _node_int(b)


class _StepFn:
    """Non-increasing step function of m: value vs[i] on [ms[i], ms[i+1])."""

    __slots__ = ("ms", "vs")

    def __init__(self, ms, vs):
        self.ms = ms
        self.vs = vs

    def at(self, m):
        i = bisect_right(self.ms, m) - 1
        return self.vs[i] if i >= 0 else _INFEASIBLE

    def __len__(self):
        return len(self.ms)


_INFEASIBLE = object()
_UNIT = _StepFn([0], [None])  # the empty product, available at every m >= 0


def _scale_shift(fn, p, d, M):
    """p * fn(m - d), clipped to [0, M]; None when nothing survives."""
    ms, vs = fn.ms, fn.vs
    out_ms = []
    out_vs = []
    for i in range(len(ms)):
        m = ms[i] + d
        if m > M:
            break
        node = _Node(p, vs[i])
        if m <= 0:
            if out_ms:
                out_vs[0] = node
            else:
                out_ms.append(0)
                out_vs.append(node)
        else:
            out_ms.append(m)
            out_vs.append(node)
    if not out_ms:
        return None
    return _StepFn(out_ms, out_vs)


def _merge_min(a, b):
    """Pointwise minimum of two step functions (None = infeasible)."""
    if a is None:
        return b
    if b is None:
        return a
    ams, avs = a.ms, a.vs
    bms, bvs = b.ms, b.vs
    out_ms, out_vs = [], []
    i = j = 0
    cur_a = cur_b = None
    have_a = have_b = False
    b_won = False
    while i < len(ams) or j < len(bms):
        if j >= len(bms) or (i < len(ams) and ams[i] <= bms[j]):
            m = ams[i]
            if j < len(bms) and bms[j] == m:
                cur_b = bvs[j]
                have_b = True
                j += 1
            cur_a = avs[i]
            have_a = True
            i += 1
        else:
            m = bms[j]
            cur_b = bvs[j]
            have_b = True
            j += 1
        if not have_a:
            best = cur_b
            b_best = True
        elif not have_b:
            best = cur_a
            b_best = False
        elif _node_less(cur_b, cur_a):
            best = cur_b
            b_best = True
        else:
            best = cur_a
            b_best = False
        if not out_vs or best is not out_vs[-1]:
            if out_vs and not _node_less(best, out_vs[-1]):
                continue  # not an improvement over the value already active
            out_ms.append(m)
            out_vs.append(best)
            b_won = b_won or b_best
    if not b_won:
        return a
    return _StepFn(out_ms, out_vs)


class GFraction:
    """A balanced fraction: numerators above p_k ascending, denominators
    below descending, with its exact swap cost."""

    __slots__ = ("Qs", "qs", "cost")

    def __init__(self, Qs, qs, cost=None):
        self.Qs = tuple(Qs)
        self.qs = tuple(qs)
        self.cost = cost if cost is not None else sum(self.Qs) - sum(self.qs)

    @classmethod
    def one(cls):
        return cls((), (), 0)

    @property
    def s(self):
        return len(self.Qs)

    def is_one(self):
        return not self.Qs

    def numerator(self):
        v = 1
        for p in self.Qs:
            v *= p
        return v

    def denominator(self):
        v = 1
        for p in self.qs:
            v *= p
        return v

    def as_fraction(self):
        f = {}
        for p in self.Qs:
            f[p] = 1
        for p in self.qs:
            f[p] = -1
        return PrimeFraction.from_factors(f)

    def check(self, p_k, m):
        if len(self.Qs) != len(self.qs):
            raise InvariantViolation("unbalanced fraction")
        if self.Qs:
            if not (3 <= self.qs[-1] and self.qs[0] <= p_k < self.Qs[0]):
                raise InvariantViolation("fraction primes outside their bands")
            if list(self.Qs) != sorted(self.Qs) or list(self.qs) != sorted(self.qs, reverse=True):
                raise InvariantViolation("fraction primes out of order")
            if len(set(self.Qs)) != len(self.Qs) or len(set(self.qs)) != len(self.qs):
                raise InvariantViolation("repeated prime in fraction")
        if not 0 <= self.cost <= m:
            raise InvariantViolation("fraction cost %d outside [0, %d]" % (self.cost, m))

    def __eq__(self, other):
        return isinstance(other, GFraction) and self.Qs == other.Qs and self.qs == other.qs

    def __hash__(self):
        return hash((self.Qs, self.qs))

    def __repr__(self):
        if not self.Qs:
            return "GFraction(1)"
        return "GFraction(%s / %s, cost=%d)" % (
            "*".join(map(str, self.Qs)), "*".join(map(str, self.qs)), self.cost)


class _UptoEntry:
    """Confirmed-exact G(p_k, m) for all m <= cap, as a step function."""

    __slots__ = ("pk_idx", "cap", "lo_idx", "rhat_idx", "fn", "fracs")

    def __init__(self, pk_idx, cap, lo_idx, rhat_idx, fn):
        self.pk_idx = pk_idx
        self.cap = cap
        self.lo_idx = lo_idx
        self.rhat_idx = rhat_idx
        self.fn = fn
        self.fracs = {}


class GEngine:
    """Computes G(p_k, m) exactly, caching per-prime step functions and the
    delta1 table (in memory and optionally on disk)."""

    def __init__(self, table, cache_dir=None):
        self.table = table
        self.cache_dir = cache_dir
        self._upto = {}
        self._delta1 = None

    # -- shared window machinery ------------------------------------------------

    def _low_idx(self, pk1, M):
        lo_p = max(3, pk1 - M)
        return self.table.count_upto(lo_p - 1) + 1

    def _full_top_idx(self, pk_idx, M):
        p_k = self.table.prime(pk_idx)
        if p_k + M > self.table.limit:
            raise CapacityError(
                "window for G(%d, %d) exceeds sieve limit %d" % (p_k, M, self.table.limit)
            )
        return self.table.count_upto(p_k + M)

    def _run_h(self, pk_idx, lo_idx, rhat_idx, M):
        """Step function of m -> min product H(R-K, P_Rhat; m) on [0, M]."""
        t = self.table
        K = pk_idx - lo_idx + 1
        R = rhat_idx - lo_idx + 1
        P = [0] + [t.prime(lo_idx + i) for i in range(R)]  # local 1-based
        J = R - K
        prev = None  # row j-1, indexed by local r; j=0 row is the unit everywhere
        for j in range(1, J + 1):
            top = t.prime(pk_idx + j)
            row = [None] * (R + 1)
            r_lo = max(j, 1)
            r_hi = min(K + j, R)
            for r in range(r_lo, r_hi + 1):
                if j == 1:
                    below = _UNIT
                else:
                    below = prev[r - 1] if r - 1 >= 1 else None
                cand = None
                if below is not None:
                    cand = _scale_shift(below, P[r], top - P[r], M)
                left = row[r - 1]
                row[r] = _merge_min(left, cand)
            prev = row
        fn = prev[R]
        if fn is None or fn.ms[0] != 0:
            raise InvariantViolation("H has no feasible value at m=0")
        return fn

    def _extract(self, entry, m):
        """GFraction at m from a confirmed step-function entry."""
        i = bisect_right(entry.fn.ms, m) - 1
        frac = entry.fracs.get(i)
        if frac is None:
            node = entry.fn.vs[i]
            pk = self.table.prime(entry.pk_idx)
            chain = _node_primes(node)
            tops_used = {p for p in chain if p > pk}
            qs = sorted((p for p in chain if p <= pk), reverse=True)
            Qs = [
                self.table.prime(idx)
                for idx in range(entry.pk_idx + 1, entry.rhat_idx + 1)
                if self.table.prime(idx) not in tops_used
            ]
            frac = GFraction(Qs, qs)
            frac.check(pk, entry.fn.ms[i + 1] - 1 if i + 1 < len(entry.fn.ms) else entry.cap)
            entry.fracs[i] = frac
        return frac

    def _confirm_segments(self, pk_idx, fn, rhat_idx, cap):
        """Largest prime needed so that the truncated window is provably
        exact on all of [0, cap]; 0 when already confirmed."""
        t = self.table
        p_k = t.prime(pk_idx)
        pk1 = t.prime(pk_idx + 1)
        p_rhat = t.prime(rhat_idx)
        need = 0
        ms, vs = fn.ms, fn.vs
        for i in range(len(ms)):
            m_hi = ms[i + 1] - 1 if i + 1 < len(ms) else cap
            if m_hi > cap:
                m_hi = cap
            if ms[i] > cap:
                break
            chain = _node_primes(vs[i])
            den = 1
            num = 1
            for p in chain:
                den *= p
            for idx in range(pk_idx + 1, rhat_idx + 1):
                num *= t.prime(idx)
            if num == den:
                # no beneficial swap seen: genuine only while m < first gap
                if m_hi >= pk1 - p_k:
                    need = max(need, p_k + m_hi)
                continue
            # exact: P_Rhat > min(p_k + m, m*num/(num - den)) must hold at m_hi
            bound1 = p_k + m_hi
            ok = p_rhat > bound1 or p_rhat * (num - den) > m_hi * num
            if not ok:
                if bound1 * (num - den) > m_hi * num:
                    need_i = m_hi * num // (num - den) + 1
                else:
                    need_i = bound1
                need = max(need, need_i)
        return need

    def _g_upto(self, pk_idx, M):
        """Confirmed-exact step function of G(p_k, .) on [0, max(M, cap)]."""
        entry = self._upto.get(pk_idx)
        if entry is not None and entry.cap >= M:
            return entry
        cap = -(-M // UPTO_GRANULARITY) * UPTO_GRANULARITY
        t = self.table
        pk1 = t.next_prime(t.prime(pk_idx))
        lo_idx = self._low_idx(pk1, cap)
        full_top = self._full_top_idx(pk_idx, cap)
        rhat_idx = min(pk_idx + TRIAL_WIDTH, full_top)
        while True:
            fn = self._run_h(pk_idx, lo_idx, rhat_idx, cap)
            if rhat_idx >= full_top:
                break
            need = self._confirm_segments(pk_idx, fn, rhat_idx, cap)
            if need == 0:
                break
            rhat_idx = min(max(t.count_upto(need) + 1, rhat_idx + TRIAL_WIDTH), full_top)
        entry = _UptoEntry(pk_idx, cap, lo_idx, rhat_idx, fn)
        self._upto[pk_idx] = entry
        return entry

    # -- public operations ----------------------------------------------------------

    def g_small(self, p_k, M):
        """G(p_k, m) for every m in [0, M] by the full-window recursion."""
        pk_idx = self.table.rank(p_k)
        if pk_idx < 2:
            raise ValueError("p_k must be at least 3")
        pk1 = self.table.prime(pk_idx + 1)
        if not 0 <= M <= pk1 - 3:
            raise ValueError("M=%d outside [0, %d]" % (M, pk1 - 3))
        lo_idx = self._low_idx(pk1, M)
        top_idx = self._full_top_idx(pk_idx, M)
        fn = self._run_h(pk_idx, lo_idx, max(top_idx, pk_idx + 1), M)
        entry = _UptoEntry(pk_idx, M, lo_idx, max(top_idx, pk_idx + 1), fn)
        return GRange(self, entry, M)

    def widen_and_confirm(self, p_k, m, trial_width=TRIAL_WIDTH):
        """G(p_k, m) on a truncated window, widening until the largest-prime
        bound certifies the truncation lost nothing."""
        t = self.table
        pk_idx = t.rank(p_k)
        pk1 = t.prime(pk_idx + 1)
        if not 0 <= m <= pk1 - 3:
            raise ValueError("m=%d outside [0, %d]" % (m, pk1 - 3))
        if m < pk1 - p_k:
            return GFraction.one()
        lo_idx = self._low_idx(pk1, m)
        full_top = self._full_top_idx(pk_idx, m)
        rhat_idx = min(pk_idx + max(trial_width, 1), full_top)
        while True:
            fn = self._run_h(pk_idx, lo_idx, rhat_idx, m)
            entry = _UptoEntry(pk_idx, m, lo_idx, rhat_idx, fn)
            frac = self._extract(entry, m)
            if rhat_idx >= full_top:
                return frac
            if frac.is_one():
                # a 1 here carries no widening information; jump to full
                rhat_idx = full_top
                continue
            num, den = frac.numerator(), frac.denominator()
            p_rhat = t.prime(rhat_idx)
            if p_rhat > p_k + m or p_rhat * (num - den) > m * num:
                return frac
            need = min(p_k + m, m * num // (num - den) + 1)
            rhat_idx = min(max(t.count_upto(need) + 1, rhat_idx + trial_width), full_top)

    def g_fraction(self, p_k, m):
        """G(p_k, m), dispatching between the two algorithms."""
        t = self.table
        pk_idx = t.rank(p_k)
        pk1 = t.prime(pk_idx + 1)
        if not 0 <= m <= pk1 - 3:
            raise ValueError("m=%d outside [0, %d]" % (m, pk1 - 3))
        if m < pk1 - p_k:
            return GFraction.one()
        if m >= SMALL_M_CUTOFF:
            d1 = self.delta1(pk1)
            if 2 * m >= 9 * d1:
                frac = self.g_large(p_k, m)
                self._check_sandwich(p_k, pk1, m, frac)
                return frac
        entry = self._g_upto(pk_idx, m)
        frac = self._extract(entry, m)
        self._check_sandwich(p_k, pk1, m, frac)
        return frac

    def _check_sandwich(self, p_k, pk1, m, frac):
        num, den = frac.numerator(), frac.denominator()
        q = self.table.next_prime(pk1 - m - 1)
        if q <= p_k and num * q < den * pk1:
            raise InvariantViolation("G below its single-swap floor")
        if m < pk1 and num * (pk1 - m) > den * pk1:
            raise InvariantViolation("G above p_{k+1}/(p_{k+1}-m)")
        if frac.cost > m:
            raise InvariantViolation("G cost exceeds budget")

    # -- delta1 ------------------------------------------------------------------------

    def _delta1_path(self):
        return os.path.join(self.cache_dir, "delta1.txt") if self.cache_dir else None

    def _load_delta1(self):
        if self._delta1 is not None:
            return
        self._delta1 = {}
        path = self._delta1_path()
        if path and os.path.exists(path):
            try:
                with open(path) as f:
                    if f.readline().strip() == _DELTA1_CACHE_VERSION:
                        for line in f:
                            p, d = map(int, line.split())
                            self._delta1[p] = d
            except Exception:
                self._delta1 = {}

    def _store_delta1(self, p, d):
        self._delta1[p] = d
        path = self._delta1_path()
        if path:
            os.makedirs(self.cache_dir, exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w") as f:
                f.write(_DELTA1_CACHE_VERSION + "\n")
                for q in sorted(self._delta1):
                    f.write("%d %d\n" % (q, self._delta1[q]))
            os.replace(tmp, path)

    def delta1(self, p):
        """Smallest even budget d1 >= Delta(p) such that every even d in
        (d1 - Delta, d1] has G(p, d) >= 1 + d/p.

        Keyed by the prime where G is evaluated; the large-m reduction at
        base p_k consumes delta1(p_{k+1})."""
        if p < 5:
            raise ValueError("delta1 needs p >= 5")
        self._load_delta1()
        cached = self._delta1.get(p)
        if cached is not None:
            return cached
        t = self.table
        p_idx = t.rank(p)
        gap = t.max_gap_upto(p)
        delta = gap + (gap & 1)
        ceiling = int(4 * 2.55 * math.log(p) ** 2) + 2
        last_bad = 0
        d = 2
        entry = self._g_upto(p_idx, min(max(delta, 256), ceiling))
        while True:
            if d > entry.cap:
                entry = self._g_upto(p_idx, min(d + 256, ceiling + 2))
            frac = self._extract(entry, d)
            # G(p, d) >= 1 + d/p, exactly
            if frac.numerator() * p < frac.denominator() * (p + d):
                last_bad = d
            if d >= delta and d - gap + 2 > last_bad:
                self._store_delta1(p, d)
                return d
            d += 2
            if d > ceiling:
                raise Delta1CeilingError(
                    "delta1(%d) exceeded ceiling %d" % (p, ceiling)
                )

    # -- large m -----------------------------------------------------------------------

    def g_large(self, p_k, m):
        """G(p_k, m) via the reduction to G(p_{k+1}, m') for small m'."""
        t = self.table
        m -= m & 1  # odd budgets buy nothing: all swap costs are even
        pk_idx = t.rank(p_k)
        pk1 = t.prime(pk_idx + 1)
        pk2 = t.prime(pk_idx + 2)
        if not pk1 - p_k <= m <= pk1 - 3:
            raise ValueError("m=%d outside [%d, %d]" % (m, pk1 - p_k, pk1 - 3))
        d1 = self.delta1(pk1)
        if 2 * m < 9 * d1:
            raise ValueError("m=%d below the validity floor 9*delta1/2" % m)
        delta = None
        pk1_idx = pk_idx + 1
        probe = self._g_upto(pk1_idx, d1)
        for d in range(d1 - (d1 & 1), -1, -2):
            if 9 * d >= 2 * m:
                continue
            if not t.is_prime(pk1 + d - m):
                continue
            if d == 0:
                delta = 0
                break
            frac = self._extract(probe, d)
            if frac.numerator() * pk1 >= frac.denominator() * (pk1 + d):
                delta = d
                break
        if delta is None:
            raise InvariantViolation("no valid budget delta found for G(%d, %d)" % (p_k, m))
        if delta == 0:
            q = pk1 - m
            return GFraction((pk1,), (q,))
        q_hat = (pk1 * pk2 * (pk1 - m + delta)) // ((pk1 + delta) * (pk1 - 3 * delta // 2))
        q_lo = pk1 - m
        if q_hat < q_lo + delta:
            raise InvariantViolation("empty denominator range in the large-m reduction")
        inner = self._g_upto(pk1_idx, m - pk1 + q_hat)
        best = None
        best_num = best_den = None
        q_idx = t.rank(t.next_prime(q_lo - 1))
        while True:
            q = t.prime(q_idx)
            if q > q_hat:
                break
            inner_frac = self._extract(inner, m - pk1 + q)
            num = pk1 * inner_frac.numerator()
            den = q * inner_frac.denominator()
            if best is None or num * best_den > best_num * den:
                best = (q, inner_frac)
                best_num, best_den = num, den
            q_idx += 1
        q, inner_frac = best
        if pk1 in inner_frac.qs:
            qs = tuple(sorted((p for p in inner_frac.qs if p != pk1), reverse=True))
            Qs = inner_frac.Qs
        else:
            qs = inner_frac.qs
            Qs = (pk1,) + inner_frac.Qs
        qs = tuple(sorted(qs + (q,), reverse=True))
        out = GFraction(Qs, qs)
        out.check(p_k, m)
        return out


class GRange:
    """Mapping view m -> GFraction over [0, M] backed by one recursion run."""

    def __init__(self, engine, entry, M):
        self._engine = engine
        self._entry = entry
        self.M = M

    def __getitem__(self, m):
        if not 0 <= m <= self.M:
            raise IndexError("m=%d outside [0, %d]" % (m, self.M))
        return self._engine._extract(self._entry, m)

    at = __getitem__
