"""Magnitude of a finite metric space as an exact rational function of q.

The similarity matrix of a space X is Z = (q^{d(i,j)}).  A weighting is a
vector w with Z w = 1 (all-ones), and the magnitude is sum(w).  Because all
distances are positive, every leading principal minor of Z has constant
term exactly 1, so fraction-free Gaussian elimination (Bareiss) runs with
no pivoting at all and keeps every intermediate coefficient an integer.

Three independent routes to the same object live here:

* ``formal_magnitude``   -- elimination, any space, exponential only in n;
* ``formal_magnitude_qh``-- closed form n / (row sum) from a common row
                            distance multiset;
* ``path_expansion``     -- alternating sum over paths, truncated by total
                            length; equals the series expansion of the
                            other two wherever both are defined.

``magnitude_at`` evaluates numerically with outward-rounded interval
arithmetic and never returns an uncertified digit.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import iv

from .cyclotomic import _iv_lock, interval_to_fractions, fraction_to_iv
from .errors import BadLength, BadN, PossiblySingular, TooLarge, TypeInvalid
from .genpoly import GenPolynomial, GenRational
from .scalar import (
    FormalScalar,
    Interval,
    scalar_compare,
    scalar_interval,
    scalar_sign,
)
from .space import EdgeMultiset, FiniteMetricSpace

_ZERO = Fraction(0)
_ONE = Fraction(1)


def similarity_matrix(space: FiniteMetricSpace):
    """Z as a matrix of monomials q^{d(i,j)}."""
    n = space.n
    return [
        [GenPolynomial.monomial(space.matrix[i][j]) for j in range(n)]
        for i in range(n)
    ]


def _tuple_add(e1, e2):
    return tuple(map(sum, zip(e1, e2)))


def _tuple_key(e):
    return (sum(e), e)


def _frac_add(e1, e2):
    return e1 + e2


def _frac_key(e):
    return e


def _poly_mul(p, q, eadd):
    if not p or not q:
        return {}
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = eadd(e1, e2)
            c = out.get(e)
            if c is None:
                out[e] = c1 * c2
            else:
                c += c1 * c2
                if c:
                    out[e] = c
                else:
                    del out[e]
    return out


def _poly_sub(p, q):
    out = dict(p)
    for e, c in q.items():
        s = out.get(e, 0) - c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _poly_divexact(num, den, zero_e, eadd, ekey):
    """Exact division when den has constant coefficient 1.

    Runs in Z[x_1..x_r] (count-tuple exponents under degree-lex) or in the
    rational-exponent monoid ring (Fraction exponents under numeric order);
    either way the minimal term of num is a term of the quotient, and
    peeling it strictly raises the minimum, so this terminates in exactly
    |quotient| rounds.
    """
    assert den.get(zero_e) == 1, "divisor must have unit constant term"
    rest = dict(num)
    quot = {}
    den_tail = [(e, c) for e, c in den.items() if e != zero_e]
    while rest:
        t = min(rest, key=ekey)
        c = rest.pop(t)
        quot[t] = c
        for e2, c2 in den_tail:
            e = eadd(t, e2)
            s = rest.get(e, 0) - c * c2
            if s:
                rest[e] = s
            else:
                rest.pop(e, None)
    return quot


def _solve_system(space: FiniteMetricSpace, cap: int, witness):
    """Bareiss forward pass + Cramer-style back substitution.

    Works in the polynomial ring Z[x_1..x_r] with one variable per distinct
    distance value, so exponent arithmetic is tuple addition and never
    touches scalars.  Mapping x_i back to q^{d_i} is a ring homomorphism,
    hence the residual identity verified here transfers to the actual
    similarity matrix.  Returns (gens, xs, det) with w_i = xs[i]/det.
    """
    n = space.n
    if n > cap:
        raise TooLarge(f"elimination solver capped at {cap} points (got {n})")

    gens = []
    gindex = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                d = space.matrix[i][j]
                if d not in gindex:
                    gindex[d] = len(gens)
                    gens.append(d)
    for d in gens:
        if scalar_sign(d, witness) <= 0:
            raise TypeInvalid("distances must be positive")

    rational = all(isinstance(d, Fraction) for d in gens)
    if rational:
        # rational exponents collapse additively, keeping polynomials short
        zero_e, eadd, ekey = _ZERO, _frac_add, _frac_key
        gmono = {d: {d: 1} for d in gens}
    else:
        r = len(gens)
        zero_e, eadd, ekey = (0,) * r, _tuple_add, _tuple_key
        gmono = {}
        for d, gi in gindex.items():
            t = [0] * r
            t[gi] = 1
            gmono[d] = {tuple(t): 1}
    unit = {zero_e: 1}

    def mono(i, j):
        if i == j:
            return dict(unit)
        return dict(gmono[space.matrix[i][j]])

    M = [[mono(i, j) for j in range(n)] + [dict(unit)] for i in range(n)]

    prev = dict(unit)
    for k in range(n):
        piv = M[k][k]
        assert piv.get(zero_e) == 1, "leading minors must have unit constant term"
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i = M[i]
            row_k = M[k]
            for j in range(k + 1, n + 1):
                num = _poly_sub(_poly_mul(piv, row_i[j], eadd), _poly_mul(mik, row_k[j], eadd))
                row_i[j] = _poly_divexact(num, prev, zero_e, eadd, ekey)
            row_i[k] = {}
        prev = piv

    det = M[n - 1][n - 1]
    xs = [None] * n
    xs[n - 1] = M[n - 1][n]
    for i in range(n - 2, -1, -1):
        acc = _poly_mul(M[i][n], det, eadd)
        for j in range(i + 1, n):
            acc = _poly_sub(acc, _poly_mul(M[i][j], xs[j], eadd))
        xs[i] = _poly_divexact(acc, M[i][i], zero_e, eadd, ekey)

    # residual: sum_j Z_ij xs[j] must equal det exactly, every row
    for i in range(n):
        acc: dict = {}
        for j in range(n):
            for e, c in _poly_mul(mono(i, j), xs[j], eadd).items():
                s = acc.get(e, 0) + c
                if s:
                    acc[e] = s
                else:
                    del acc[e]
        if acc != det:
            raise AssertionError(f"weighting residual failed on row {i}")
    return rational, gens, xs, det


def _to_genpoly(d: dict) -> GenPolynomial:
    return GenPolynomial({e: Fraction(c) for e, c in d.items()})


def _eval_free(d: dict, gens) -> GenPolynomial:
    """Evaluate a free-ring polynomial at x_i = q^{d_i}.

    Distinct count-tuples may collapse onto one scalar exponent (distance
    values can satisfy additive relations); coefficients then merge.
    """
    cache = {(0,) * len(gens): _ZERO}

    def exp_of(t):
        e = cache.get(t)
        if e is None:
            i = next(k for k, v in enumerate(t) if v)
            t2 = t[:i] + (t[i] - 1,) + t[i + 1:]
            e = exp_of(t2) + gens[i]
            cache[t] = e
        return e

    out: dict = {}
    for t, c in d.items():
        e = exp_of(t)
        s = out.get(e, _ZERO) + c
        if s:
            out[e] = Fraction(s)
        else:
            out.pop(e, None)
    return GenPolynomial(out)


def formal_weighting(space: FiniteMetricSpace, cap: int = 12, witness=None):
    """The weight vector as exact rational functions, residual-verified."""
    if space.n == 0:
        return []
    rational, gens, xs, det = _solve_system(space, cap, witness)
    conv = _to_genpoly if rational else (lambda d: _eval_free(d, gens))
    den = conv(det)
    return [GenRational(conv(x), den) for x in xs]


def formal_magnitude(space: FiniteMetricSpace, cap: int = 12, witness=None) -> GenRational:
    """Magnitude by fraction-free elimination on the similarity matrix."""
    rational, gens, xs, det = _solve_system(space, cap, witness)
    total: dict = {}
    for x in xs:
        for e, c in x.items():
            s = total.get(e, 0) + c
            if s:
                total[e] = s
            else:
                del total[e]
    conv = _to_genpoly if rational else (lambda d: _eval_free(d, gens))
    return GenRational(conv(total), conv(det))


def formal_magnitude_qh(qh_type, n: int) -> GenRational:
    """Closed form n / (1 + sum of q^d over the common row multiset).

    ``qh_type`` is the distance multiset each point sees (an EdgeMultiset
    or any iterable of scalars, n - 1 values with multiplicity).  When
    every row of the similarity matrix sums to the same S, the constant
    weighting 1/S solves Z w = 1, so the magnitude is n/S at any n; no
    elimination happens here, which is the whole point.
    """
    if n < 1:
        raise BadN("need at least one point")
    if isinstance(qh_type, EdgeMultiset):
        items = qh_type.counts
    else:
        tally: dict = {}
        for v in qh_type:
            tally[v] = tally.get(v, 0) + 1
        items = tuple(tally.items())
    if sum(c for _, c in items) != n - 1:
        raise BadLength(f"a type for n={n} has {n - 1} values with multiplicity")
    s: dict = {_ZERO: 1}
    for v, c in items:
        s[v] = s.get(v, 0) + c
    return GenRational(GenPolynomial.constant(n), _to_genpoly(s))


def path_expansion(space: FiniteMetricSpace, bound, witness=None) -> GenPolynomial:
    """Alternating path-sum expansion, truncated at total length ``bound``.

    sum_k (-1)^k sum over k-step paths (adjacent points distinct) of
    q^{length}.  Independent of the elimination route: it is the Neumann
    series of Z^{-1} written out combinatorially, and agrees with
    ``series(formal_magnitude(X), bound)`` on the nose.
    """
    n = space.n
    add_memo = {}

    def eadd(a, b):
        key = (a, b)
        s = add_memo.get(key)
        if s is None:
            s = a + b
            add_memo[key] = s
            add_memo[(b, a)] = s
        return s

    keep_memo = {}

    def keeps(e):
        r = keep_memo.get(e)
        if r is None:
            r = scalar_compare(e, bound, witness) <= 0
            keep_memo[e] = r
        return r

    # paths with 0 steps: one per endpoint, length 0
    cur = [{_ZERO: 1} for _ in range(n)]
    acc = {_ZERO: n}
    sign = 1
    guard = 0
    while any(cur):
        sign = -sign
        nxt = [dict() for _ in range(n)]
        for j in range(n):
            out = nxt[j]
            for i in range(n):
                if i == j or not cur[i]:
                    continue
                d = space.matrix[i][j]
                for e, c in cur[i].items():
                    e2 = eadd(e, d)
                    if keeps(e2):
                        out[e2] = out.get(e2, 0) + c
        cur = nxt
        for p in cur:
            for e, c in p.items():
                s = acc.get(e, 0) + sign * c
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        guard += 1
        assert guard <= 100000, "path expansion failed to terminate"
    return _to_genpoly(acc)


def magnitude_at(space: FiniteMetricSpace, t, precision_bits: int = 64) -> Interval:
    """Certified numeric magnitude of tX, i.e. at similarity value q = e^{-t}.

    ``t`` is a positive rational scale.  Entries e^{-t d} are evaluated
    with outward rounding, the system is solved by interval Gaussian
    elimination, and the returned bounds are exact rationals enclosing the
    true value.  A pivot column whose candidates all straddle zero raises
    PossiblySingular; retry with more bits.
    """
    n = space.n
    t = Fraction(t)
    if t <= 0:
        raise TypeInvalid("the scale t must be positive")

    # certified rational bounds for every distinct distance, outside the lock
    dbounds = {}
    for v in space.code_values:
        if isinstance(v, FormalScalar):
            raise TypeInvalid("numeric evaluation needs numeric distances")
        itv = scalar_interval(v, precision_bits + 16)
        dbounds[v] = (itv.lo, itv.hi)

    with _iv_lock:
        saved = iv.prec
        iv.prec = precision_bits + 32
        try:
            unit = iv.mpf([0, 1])
            negt = -fraction_to_iv(t)

            def dist_iv(v):
                lo, hi = dbounds[v]
                lo_iv = fraction_to_iv(lo)
                return lo_iv + (fraction_to_iv(hi) - lo_iv) * unit

            cache = {v: iv.exp(dist_iv(v) * negt) for v in dbounds}
            one = iv.mpf(1)
            A = [
                [one if i == j else cache[space.matrix[i][j]] for j in range(n)]
                for i in range(n)
            ]
            b = [one for _ in range(n)]

            def sure_abs(x):
                # a lower bound for |x|, zero when the interval straddles 0
                lo, hi = x.a, x.b
                if lo > 0:
                    return lo
                if hi < 0:
                    return -hi
                return None

            for k in range(n):
                best, best_abs = None, None
                for r in range(k, n):
                    m = sure_abs(A[r][k])
                    if m is not None and (best_abs is None or m > best_abs):
                        best, best_abs = r, m
                if best is None:
                    raise PossiblySingular(
                        f"pivot column {k} is not certifiably nonzero at "
                        f"{precision_bits} bits"
                    )
                if best != k:
                    A[k], A[best] = A[best], A[k]
                    b[k], b[best] = b[best], b[k]
                piv = A[k][k]
                for r in range(k + 1, n):
                    f = A[r][k] / piv
                    for c in range(k, n):
                        A[r][c] = A[r][c] - f * A[k][c]
                    b[r] = b[r] - f * b[k]

            w = [None] * n
            for i in range(n - 1, -1, -1):
                s = b[i]
                for j in range(i + 1, n):
                    s = s - A[i][j] * w[j]
                w[i] = s / A[i][i]
            total = w[0]
            for i in range(1, n):
                total = total + w[i]
            lo, hi = interval_to_fractions(total)
        finally:
            iv.prec = saved
    return Interval(lo, hi)
