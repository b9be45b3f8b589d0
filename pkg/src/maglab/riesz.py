"""Discrete Riesz energy B_X(z) = sum over ordered pairs of d(P_i, P_j)^z.

The exact route works at integer z through the edge multiset (each
unordered pair counts twice).  The numeric route takes complex z with
rational real and imaginary parts and returns a certified rectangle via
d^z = d^x (cos(y ln d) + i sin(y ln d)), all in outward-rounded interval
arithmetic.

Two spaces share every Riesz energy exactly when they share the edge-length
multiset, and the multiset is pinned down by finitely many power sums
through Newton's identities; both directions are implemented so the round
trip can be checked on concrete pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

from .cyclotomic import _iv_lock, interval_to_fractions, fraction_to_iv
from .errors import BadLength, IncompatibleBackends, NoWitness
from .scalar import FormalScalar, Interval, as_scalar, scalar_interval
from .space import EdgeMultiset, FiniteMetricSpace, edge_multiset


@dataclass(frozen=True)
class PowerSumVector:
    """B_X(1), ..., B_X(N) for N = n(n-1)/2; B_X(0) = n(n-1) by convention."""

    n: int
    values: tuple

    def __post_init__(self):
        expect = self.n * (self.n - 1) // 2
        if len(self.values) != expect:
            raise BadLength(
                f"{self.n} points give {expect} unordered pairs, got {len(self.values)} sums"
            )
        object.__setattr__(self, "values", tuple(as_scalar(v) for v in self.values))

    @property
    def at_zero(self) -> Fraction:
        return Fraction(self.n * (self.n - 1))


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    def contains(self, x, y=0) -> bool:
        return Fraction(x) in self.re and Fraction(y) in self.im

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)


def _has_formal(space: FiniteMetricSpace) -> bool:
    return any(isinstance(v, FormalScalar) for v in space.code_values)


def riesz_at(space: FiniteMetricSpace, z: int):
    """Exact B_X(z) for integer z.

    Negative z inverts each distance, which every numeric backend supports;
    formal distances stop at z in {0, 1} since their products and inverses
    are not defined.
    """
    if not isinstance(z, int):
        raise TypeError("exact evaluation needs an integer exponent")
    n = space.n
    if z == 0:
        return Fraction(n * (n - 1))
    total = Fraction(0)
    for v, c in edge_multiset(space).counts:
        if z == 1:
            p = v
        elif isinstance(v, FormalScalar):
            raise IncompatibleBackends(
                "formal distances have no exact powers beyond z = 1"
            )
        else:
            p = v ** z
        total = total + 2 * c * p
    return total


def power_sum_vector(space: FiniteMetricSpace) -> PowerSumVector:
    """B_X(1..N), enough by Newton's identities to pin down the multiset."""
    n = space.n
    top = n * (n - 1) // 2
    return PowerSumVector(n, tuple(riesz_at(space, z) for z in range(1, top + 1)))


def riesz_numeric(
    space: FiniteMetricSpace, z, precision_bits: int = 64
) -> ComplexInterval:
    """Certified enclosure of B_X(x + iy) for rational x, y.

    d^{x+iy} = d^x (cos(y ln d) + i sin(y ln d)); every distinct distance
    is evaluated once with outward rounding and weighted by twice its pair
    count.
    """
    x, y = z
    x, y = Fraction(x), Fraction(y)
    counts = edge_multiset(space).counts
    bounds = []
    for v, c in counts:
        if isinstance(v, FormalScalar):
            raise NoWitness("numeric energy needs numeric distances")
        itv = scalar_interval(v, precision_bits + 16)
        bounds.append((itv.lo, itv.hi, c))

    with _iv_lock:
        saved = iv.prec
        iv.prec = precision_bits + 32
        try:
            unit = iv.mpf([0, 1])
            xiv = fraction_to_iv(x)
            yiv = fraction_to_iv(y)
            total_re = iv.mpf(0)
            total_im = iv.mpf(0)
            for lo, hi, c in bounds:
                lo_iv = fraction_to_iv(lo)
                d = lo_iv + (fraction_to_iv(hi) - lo_iv) * unit
                ln = iv.log(d)
                mag = iv.exp(xiv * ln)
                ang = yiv * ln
                w = iv.mpf(2 * c)
                total_re = total_re + w * mag * iv.cos(ang)
                total_im = total_im + w * mag * iv.sin(ang)
            re_lo, re_hi = interval_to_fractions(total_re)
            im_lo, im_hi = interval_to_fractions(total_im)
        finally:
            iv.prec = saved
    return ComplexInterval(Interval(re_lo, re_hi), Interval(im_lo, im_hi))


def riesz_equal(a: FiniteMetricSpace, b: FiniteMetricSpace) -> bool:
    """Whether all Riesz energies of a and b agree.

    Equality of every B(z) is equivalent to equality of edge multisets
    (power sums determine elementary symmetric functions determine the
    multiset), so one exact multiset comparison settles it.
    """
    if _has_formal(a) != _has_formal(b):
        raise IncompatibleBackends(
            "cannot compare formal and numeric edge multisets"
        )
    return edge_multiset(a) == edge_multiset(b)


def riesz_diff(a: FiniteMetricSpace, b: FiniteMetricSpace):
    """Edge-multiset difference as (value, count_a, count_b) with count_a != count_b."""
    ma = dict(edge_multiset(a).counts)
    mb = dict(edge_multiset(b).counts)
    out = []
    for v in {*ma, *mb}:
        ca, cb = ma.get(v, 0), mb.get(v, 0)
        if ca != cb:
            out.append((v, ca, cb))
    return out


def newton_elementary(power_sums) -> list:
    """Elementary symmetric functions e_1..e_N of the edge lengths.

    Accepts a PowerSumVector or a plain list of B(1..N); the power sum of
    the unordered multiset is p_k = B(k)/2, and
    k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
    """
    if isinstance(power_sums, PowerSumVector):
        bs = power_sums.values
    else:
        bs = tuple(as_scalar(v) for v in power_sums)
    if not bs:
        raise BadLength("need at least one power sum")
    half = Fraction(1, 2)
    ps = [b * half for b in bs]
    es = [Fraction(1)]
    for k in range(1, len(ps) + 1):
        acc = Fraction(0)
        s = 1
        for i in range(1, k + 1):
            acc = acc + s * (es[k - i] * ps[i - 1])
            s = -s
        es.append(acc * Fraction(1, k))
    return es[1:]
