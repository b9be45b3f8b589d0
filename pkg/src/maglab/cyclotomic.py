"""Exact arithmetic in cyclotomic fields Q(zeta_m).

This is the low-level layer: elements are plain coefficient tuples of length
phi(m) in the power basis 1, zeta, ..., zeta^(phi(m)-1), reduced modulo the
m-th cyclotomic polynomial.  Coefficients are ``fractions.Fraction``.  Nothing
here knows about realness or canonical conductors; that policy lives in
``scalar``.  All structural tables (cyclotomic polynomials, power reductions,
Galois substitution rows, subfield solvers) are memoized per conductor.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import DivisionByZero

_ZERO = Fraction(0)
_ONE = Fraction(1)


def euler_phi(m: int) -> int:
    assert m >= 1
    result = m
    n = m
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def prime_factors(m: int) -> tuple[int, ...]:
    out = []
    n = m
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def _intpoly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _intpoly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (den monic up to sign at top)."""
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        assert r == 0, "inexact cyclotomic division"
        quot[k - dn] = q
        for j, dj in enumerate(den):
            num[k - dn + j] -= q * dj
    assert not any(num), "nonzero remainder in cyclotomic division"
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _intpoly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """x^e mod Phi_m for e = 0 .. 2*phi(m)-2, as integer coefficient rows."""
    phi = euler_phi(m)
    phim = cyclotomic_polynomial(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    rows.append(tuple(cur))
    for _ in range(2 * phi - 2):
        nxt = [0] * (phi + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] = c
        top = nxt[phi]
        if top:
            for j in range(phi):
                nxt[j] -= top * phim[j]
        cur = nxt[:phi]
        rows.append(tuple(cur))
    return tuple(rows)


@lru_cache(maxsize=None)
def _power_vec_mod_m(m: int) -> tuple[tuple[int, ...], ...]:
    """x^e mod Phi_m for e = 0 .. m-1."""
    phi = euler_phi(m)
    phim = cyclotomic_polynomial(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    rows.append(tuple(cur))
    for _ in range(m - 1):
        nxt = [0] * (phi + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] = c
        top = nxt[phi]
        if top:
            for j in range(phi):
                nxt[j] -= top * phim[j]
        cur = nxt[:phi]
        rows.append(tuple(cur))
    return tuple(rows)


def zero_vec(m: int) -> tuple[Fraction, ...]:
    return (_ZERO,) * euler_phi(m)


def one_vec(m: int) -> tuple[Fraction, ...]:
    phi = euler_phi(m)
    return (_ONE,) + (_ZERO,) * (phi - 1)


def from_rational(m: int, c: Fraction) -> tuple[Fraction, ...]:
    phi = euler_phi(m)
    return (Fraction(c),) + (_ZERO,) * (phi - 1)


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a):
    return tuple(-x for x in a)


def vec_scale(a, c: Fraction):
    if c == 0:
        return tuple(_ZERO for _ in a)
    return tuple(x * c for x in a)


def vec_is_zero(a) -> bool:
    return not any(a)


def vec_is_rational(a) -> bool:
    return not any(a[1:])


def elem_mul(m: int, a, b):
    """Product of two elements of Q(zeta_m) in power-basis form."""
    phi = len(a)
    conv = [_ZERO] * (2 * phi - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
    table = _power_table(m)
    out = list(conv[:phi])
    for e in range(phi, 2 * phi - 1):
        c = conv[e]
        if c:
            row = table[e]
            for j, rj in enumerate(row):
                if rj:
                    out[j] += c * rj
    return tuple(out)


def elem_mul_int(m: int, a, b):
    """Like elem_mul but for integer coefficient vectors (fast path)."""
    phi = len(a)
    conv = [0] * (2 * phi - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
    table = _power_table(m)
    out = list(conv[:phi])
    for e in range(phi, 2 * phi - 1):
        c = conv[e]
        if c:
            row = table[e]
            for j, rj in enumerate(row):
                if rj:
                    out[j] += c * rj
    return tuple(out)


def elem_inv(m: int, a):
    """Inverse in Q(zeta_m) via the extended Euclidean algorithm in Q[x]."""
    if vec_is_zero(a):
        raise DivisionByZero("inverse of zero cyclotomic element")
    if vec_is_rational(a):
        inv = 1 / a[0]
        return (inv,) + tuple(_ZERO for _ in a[1:])
    phim = [Fraction(c) for c in cyclotomic_polynomial(m)]

    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i]:
                return i
        return -1

    # invariant: s0*a = r0 (mod Phi_m), s1*a = r1 (mod Phi_m)
    r0, r1 = phim, list(a)
    s0, s1 = [_ZERO], [_ONE]
    while True:
        d1 = deg(r1)
        assert d1 >= 0, "element shares a factor with the cyclotomic polynomial"
        if d1 == 0:
            break
        d0 = deg(r0)
        if d0 < d1:
            r0, r1 = r1, r0
            s0, s1 = s1, s0
            continue
        c = r0[d0] / r1[d1]
        shift = d0 - d1
        for i in range(d1 + 1):
            r0[i + shift] -= c * r1[i]
        if len(s0) < len(s1) + shift:
            s0 = s0 + [_ZERO] * (len(s1) + shift - len(s0))
        for i in range(len(s1)):
            s0[i + shift] -= c * s1[i]
        if deg(r0) < deg(r1):
            r0, r1 = r1, r0
            s0, s1 = s1, s0
    c = r1[0]
    phi = len(a)
    # Bezout coefficients stay below deg Phi_m, so s1 fits the power basis.
    assert not any(s1[phi:]), "unexpected degree in Bezout coefficient"
    red = list(s1[:phi]) + [_ZERO] * (phi - min(phi, len(s1)))
    inv_c = 1 / c
    return tuple(x * inv_c for x in red)


@lru_cache(maxsize=None)
def galois_rows(m: int, a: int) -> tuple[tuple[int, ...], ...]:
    """Rows R[i] = coefficient vector of zeta_m^(a*i), for the map zeta -> zeta^a."""
    assert _gcd(a, m) == 1
    table = _power_vec_mod_m(m)
    phi = euler_phi(m)
    return tuple(table[(a * i) % m] for i in range(phi))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def apply_rows(rows, vec):
    """Linear map given by integer rows: result = sum_i vec[i] * rows[i]."""
    n_out = len(rows[0])
    out = [_ZERO] * n_out
    for i, c in enumerate(vec):
        if c:
            row = rows[i]
            for j, rj in enumerate(row):
                if rj:
                    out[j] += c * rj
    return tuple(out)


def apply_rows_int(rows, vec):
    n_out = len(rows[0])
    out = [0] * n_out
    for i, c in enumerate(vec):
        if c:
            row = rows[i]
            for j, rj in enumerate(row):
                if rj:
                    out[j] += c * rj
    return tuple(out)


def conjugate(m: int, vec):
    """Complex conjugation: zeta -> zeta^(m-1)."""
    if m == 1:
        return tuple(vec)
    return apply_rows(galois_rows(m, m - 1), vec)


def is_real_vec(m: int, vec) -> bool:
    if m == 1:
        return True
    return conjugate(m, vec) == tuple(vec)


@lru_cache(maxsize=None)
def promotion_rows(m: int, big: int) -> tuple[tuple[int, ...], ...]:
    """Rows mapping Q(zeta_m) power basis into Q(zeta_big); requires m | big."""
    assert big % m == 0
    step = big // m
    table = _power_vec_mod_m(big)
    phi = euler_phi(m)
    return tuple(table[(i * step) % big] for i in range(phi))


def promote(m: int, vec, big: int):
    if m == big:
        return tuple(vec)
    return apply_rows(promotion_rows(m, big), vec)


@lru_cache(maxsize=None)
def halving_rows(m: int) -> tuple[tuple[int, ...], ...]:
    """For m = 2d with d odd: rows rewriting zeta_m powers via zeta_m = -zeta_d^((d+1)/2)."""
    assert m % 4 == 2
    d = m // 2
    k = (d + 1) // 2
    phi = euler_phi(m)
    table = _power_vec_mod_m(d) if d > 1 else None
    rows = []
    for i in range(phi):
        if d == 1:
            # zeta_2 = -1; phi(2) = 1 so only i = 0 arises
            rows.append((1,))
            continue
        base = table[(i * k) % d]
        if i % 2 == 1:
            base = tuple(-c for c in base)
        rows.append(base)
    return tuple(rows)


@lru_cache(maxsize=None)
def _subfield_solver(m: int, d: int):
    """Left inverse for the embedding Q(zeta_d) -> Q(zeta_m), d | m.

    Returns (basis_rows, linv) where basis_rows[j] is the image of zeta_d^j
    (integer vectors at conductor m) and linv is a phi(d) x phi(m) Fraction
    matrix with: x lies in Q(zeta_d) iff embed(linv @ x) == x, in which case
    linv @ x is its coordinate vector at conductor d.
    """
    assert m % d == 0 and d >= 1
    phi_m = euler_phi(m)
    phi_d = euler_phi(d)
    cols = [promotion_rows(d, m)[j] for j in range(phi_d)] if d > 1 else [
        tuple([1] + [0] * (phi_m - 1))
    ]
    # Solve the overdetermined system by row reduction of [B | I].
    aug = []
    for r in range(phi_m):
        row = [Fraction(cols[c][r]) for c in range(phi_d)]
        row += [_ONE if k == r else _ZERO for k in range(phi_m)]
        aug.append(row)
    piv_rows = []
    used = [False] * phi_m
    for c in range(phi_d):
        piv = None
        for r in range(phi_m):
            if not used[r] and aug[r][c] != 0:
                piv = r
                break
        assert piv is not None, "embedding matrix not full rank"
        used[piv] = True
        piv_rows.append(piv)
        inv = 1 / aug[piv][c]
        aug[piv] = [v * inv for v in aug[piv]]
        for r in range(phi_m):
            if r != piv and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[piv])]
    linv = tuple(tuple(aug[piv_rows[c]][phi_d:]) for c in range(phi_d))
    return tuple(cols), linv


def try_subfield(m: int, d: int, vec):
    """Coordinates of vec at conductor d if vec lies in Q(zeta_d), else None."""
    cols, linv = _subfield_solver(m, d)
    y = tuple(sum(row[i] * vec[i] for i in range(len(vec)) if vec[i]) for row in linv)
    # verify embed(y) == vec
    phi_m = len(vec)
    back = [_ZERO] * phi_m
    for j, yj in enumerate(y):
        if yj:
            col = cols[j]
            for i, ci in enumerate(col):
                if ci:
                    back[i] += yj * ci
    if tuple(back) != tuple(vec):
        return None
    return y


def canonicalize(m: int, vec):
    """Reduce to the minimal conductor.

    Returns ("rat", Fraction) when the element is rational, else
    ("cyc", m', vec') with m' minimal, m' not congruent to 2 mod 4.
    """
    vec = tuple(Fraction(c) for c in vec)
    while m % 4 == 2:
        vec = apply_rows(halving_rows(m), vec)
        m //= 2
    if m <= 2:
        val = vec[0] if m == 1 else vec[0]
        # at m = 1 the basis is {1}; at m = 2 likewise
        return ("rat", Fraction(val))
    changed = True
    while changed:
        changed = False
        if vec_is_rational(vec):
            return ("rat", Fraction(vec[0]))
        for p in prime_factors(m):
            d0 = m // p
            if d0 <= 2:
                continue  # membership would mean rational, already excluded
            d = d0 if d0 % 4 != 2 else d0 // 2
            if d <= 2:
                continue
            y = try_subfield(m, d, vec)
            if y is not None:
                m, vec = d, tuple(y)
                changed = True
                break
    if vec_is_rational(vec):
        return ("rat", Fraction(vec[0]))
    return ("cyc", m, vec)


# ---------------------------------------------------------------------------
# Certified numeric enclosures (mpmath interval arithmetic).

_iv_lock = threading.Lock()


def _raw_to_fraction(t) -> Fraction:
    sign, man, exp, bc = t
    man = int(man)
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


def interval_to_fractions(x) -> tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return _raw_to_fraction(a), _raw_to_fraction(b)


def fraction_to_iv(c: Fraction):
    return mpmath.iv.mpf(c.numerator) / mpmath.iv.mpf(c.denominator)


def eval_real_interval(m: int, vec, prec: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of a *real* element: sum_i c_i cos(2*pi*i/m)."""
    iv = mpmath.iv
    with _iv_lock:
        saved = iv.prec
        try:
            iv.prec = prec
            total = iv.mpf(0)
            two_pi = 2 * iv.pi
            for i, c in enumerate(vec):
                if c:
                    if i == 0:
                        term = fraction_to_iv(c)
                    else:
                        term = fraction_to_iv(c) * iv.cos(two_pi * i / m)
                    total = total + term
            return interval_to_fractions(total)
        finally:
            iv.prec = saved
