"""Exact scalar backends: rationals, real cyclotomic numbers, formal lengths.

A Scalar is one of:

* ``fractions.Fraction`` — exact rationals (the stdlib type is used directly);
* ``CyclotomicReal`` — a real element of a cyclotomic field, stored at its
  minimal conductor m (never 2 mod 4) as a coefficient vector of length phi(m)
  in the power basis.  Rational-valued elements are always demoted to
  ``Fraction``, so equality and hashing are canonical across backends;
* ``FormalScalar`` — a nonnegative-exponent formal length: a rational constant
  plus a rational linear combination of named symbols.  Used for spaces whose
  edge lengths are kept symbolic.

Mixing cyclotomic and formal scalars raises ``IncompatibleBackends``; both mix
freely with rationals.  Order queries on formal scalars need a positive
witness assignment unless every component already has the same sign.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import cyclotomic as cy
from .errors import (
    BadLength,
    ConductorCapExceeded,
    DivisionByZero,
    IncompatibleBackends,
    NoWitness,
    NotASquare,
    NotReal,
    OutOfRange,
)

_DEFAULT_CONDUCTOR_CAP = 1000
_conductor_cap = int(os.environ.get("MAGLAB_CONDUCTOR_CAP", _DEFAULT_CONDUCTOR_CAP))


def conductor_cap() -> int:
    return _conductor_cap


def set_conductor_cap(cap: int) -> None:
    global _conductor_cap
    if cap < 1:
        raise OutOfRange("conductor cap must be positive")
    _conductor_cap = cap


def _check_conductor(m: int) -> None:
    if m > _conductor_cap:
        raise ConductorCapExceeded(
            f"conductor {m} exceeds cap {_conductor_cap} "
            "(set MAGLAB_CONDUCTOR_CAP or set_conductor_cap to raise it)"
        )


@dataclass(frozen=True)
class Interval:
    """A certified enclosure lo <= value <= hi with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def midpoint_float(self) -> float:
        return float((self.lo + self.hi) / 2)


class CyclotomicReal:
    """A real, irrational element of Q(zeta_m) at its minimal conductor."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs: tuple[Fraction, ...], _trusted: bool = False):
        if not _trusted:
            raise TypeError("use cyclo()/from_raw(); CyclotomicReal is not built directly")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_hash", hash((m, coeffs)))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("CyclotomicReal is immutable")

    # -- backend promotion helpers ------------------------------------------------
    def _raw_at(self, big: int) -> tuple[Fraction, ...]:
        return cy.promote(self.m, self.coeffs, big)

    # -- arithmetic ---------------------------------------------------------------
    def _binary(self, other, op):
        if isinstance(other, CyclotomicReal):
            big = self.m * other.m // gcd(self.m, other.m)
            _check_conductor(big)
            return from_raw(big, op(self._raw_at(big), other._raw_at(big), big))
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            return from_raw(
                self.m, op(self.coeffs, cy.from_rational(self.m, other), self.m)
            )
        if isinstance(other, FormalScalar):
            raise IncompatibleBackends(
                "cyclotomic and formal scalars have no common promotion"
            )
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, lambda a, b, m: cy.vec_add(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b, m: cy.vec_sub(a, b))

    def __rsub__(self, other):
        r = self._binary(other, lambda a, b, m: cy.vec_sub(b, a))
        return r

    def __mul__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            if other == 0:
                return Fraction(0)
            return from_raw(self.m, cy.vec_scale(self.coeffs, other))
        return self._binary(other, lambda a, b, m: cy.elem_mul(m, a, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            if other == 0:
                raise DivisionByZero("division by zero rational")
            return from_raw(self.m, cy.vec_scale(self.coeffs, 1 / other))
        if isinstance(other, CyclotomicReal):
            big = self.m * other.m // gcd(self.m, other.m)
            _check_conductor(big)
            inv = cy.elem_inv(big, other._raw_at(big))
            return from_raw(big, cy.elem_mul(big, self._raw_at(big), inv))
        if isinstance(other, FormalScalar):
            raise IncompatibleBackends(
                "cyclotomic and formal scalars have no common promotion"
            )
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            inv = cy.elem_inv(self.m, self.coeffs)
            return from_raw(self.m, cy.vec_scale(inv, other))
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e == 0:
            return Fraction(1)
        base = self
        if e < 0:
            base = Fraction(1) / self
            e = -e
            if isinstance(base, Fraction):
                return base ** e
        result = None
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __neg__(self):
        return from_raw(self.m, cy.vec_neg(self.coeffs))

    def __abs__(self):
        return self if scalar_sign(self) > 0 else -self

    # -- comparisons --------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CyclotomicReal):
            if self.m == other.m:
                return self.coeffs == other.coeffs
            return False  # both minimal-conductor canonical, so conductors differ
        if isinstance(other, (int, Fraction, FormalScalar)):
            return False  # rationals are always demoted out of this class
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        cs = ",".join(
            str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            for c in self.coeffs
        )
        return f"CyclotomicReal(m={self.m};{cs})"

    def __str__(self):
        lo, hi = cy.eval_real_interval(self.m, self.coeffs, 64)
        return f"cyc[{self.m}]~{float((lo + hi) / 2):.9g}"

    def interval(self, prec_bits: int) -> Interval:
        lo, hi = cy.eval_real_interval(self.m, self.coeffs, prec_bits)
        return Interval(lo, hi)


def from_raw(m: int, vec) -> "Fraction | CyclotomicReal":
    """Canonicalize a raw coefficient vector into a Scalar (demoting rationals)."""
    kind, *rest = cy.canonicalize(m, vec)
    if kind == "rat":
        return rest[0]
    m2, vec2 = rest
    if not cy.is_real_vec(m2, vec2):
        raise NotReal(f"element of Q(zeta_{m2}) is not fixed by conjugation")
    return CyclotomicReal(m2, tuple(vec2), _trusted=True)


def cyclo(m: int, coeffs) -> "Fraction | CyclotomicReal":
    """Build a real cyclotomic scalar from phi(m) power-basis coefficients."""
    if m < 1:
        raise OutOfRange("conductor must be >= 1")
    _check_conductor(m)
    phi = cy.euler_phi(m)
    coeffs = [_as_fraction(c) for c in coeffs]
    if len(coeffs) != phi:
        raise BadLength(f"expected {phi} coefficients for conductor {m}, got {len(coeffs)}")
    if not cy.is_real_vec(m, tuple(coeffs)):
        raise NotReal(f"element of Q(zeta_{m}) is not fixed by conjugation")
    return from_raw(m, tuple(coeffs))


def zeta_sym(m: int, k: int) -> "Fraction | CyclotomicReal":
    """The real element zeta_m^k + zeta_m^(-k) = 2 cos(2 pi k / m)."""
    _check_conductor(m)
    table = cy._power_vec_mod_m(m)
    a = table[k % m]
    b = table[(-k) % m]
    vec = tuple(Fraction(x + y) for x, y in zip(a, b))
    return from_raw(m, vec)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        if "/" in v:
            p, q = v.split("/")
            return Fraction(int(p), int(q))
        return Fraction(int(v))
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


class FormalScalar:
    """const + sum of coeff * symbol, with symbols standing for positive lengths."""

    __slots__ = ("const", "coords", "_hash")

    def __init__(self, const, coords, _trusted: bool = False):
        if not _trusted:
            raise TypeError("use formal()/formal_symbol(); FormalScalar is not built directly")
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_hash", hash((const, coords)))

    def __setattr__(self, name, value):
        raise AttributeError("FormalScalar is immutable")

    def _binary_add(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            other = FormalScalar(other, (), _trusted=True)
        if isinstance(other, FormalScalar):
            merged = dict(self.coords)
            for sym, c in other.coords:
                merged[sym] = merged.get(sym, Fraction(0)) + c
            return formal(self.const + other.const, merged)
        if isinstance(other, CyclotomicReal):
            raise IncompatibleBackends(
                "cyclotomic and formal scalars have no common promotion"
            )
        return NotImplemented

    def __add__(self, other):
        return self._binary_add(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary_add(-other)

    def __rsub__(self, other):
        return self.__neg__()._binary_add(other)

    def __neg__(self):
        return FormalScalar(
            -self.const, tuple((s, -c) for s, c in self.coords), _trusted=True
        )

    def __mul__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            if other == 0:
                return Fraction(0)
            return formal(self.const * other, {s: c * other for s, c in self.coords})
        if isinstance(other, FormalScalar):
            if not other.coords:
                return self * other.const
            if not self.coords:
                return other * self.const
            raise IncompatibleBackends(
                "product of two non-constant formal scalars leaves the linear model"
            )
        if isinstance(other, CyclotomicReal):
            raise IncompatibleBackends(
                "cyclotomic and formal scalars have no common promotion"
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            if other == 0:
                raise DivisionByZero("division by zero rational")
            return self * (1 / other)
        if isinstance(other, FormalScalar) and not other.coords:
            return self * (1 / other.const)
        raise IncompatibleBackends("cannot divide by a non-constant formal scalar")

    def __eq__(self, other):
        if isinstance(other, FormalScalar):
            return self.const == other.const and self.coords == other.coords
        if isinstance(other, (int, Fraction, CyclotomicReal)):
            return False  # constant formal scalars are demoted to Fraction
        return NotImplemented

    def __hash__(self):
        return self._hash

    def substitute(self, witness: dict) -> Fraction:
        total = self.const
        for sym, c in self.coords:
            if sym not in witness:
                raise NoWitness(f"witness assigns no value to symbol {sym!r}")
            total += c * _as_fraction(witness[sym])
        return total

    def __repr__(self):
        return f"FormalScalar({self!s})"

    def __str__(self):
        parts = []
        if self.const:
            parts.append(_frac_str(self.const))
        for sym, c in self.coords:
            if c == 1:
                parts.append(sym)
            elif c == -1:
                parts.append(f"-{sym}")
            else:
                parts.append(f"{_frac_str(c)}*{sym}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def formal(const, coords) -> "Fraction | FormalScalar":
    """Normalize (const, {sym: coeff}) into a Scalar, demoting constants."""
    const = _as_fraction(const)
    items = tuple(
        sorted((s, _as_fraction(c)) for s, c in dict(coords).items() if c != 0)
    )
    if not items:
        return const
    return FormalScalar(const, items, _trusted=True)


def formal_symbol(name: str) -> FormalScalar:
    if not name or not isinstance(name, str):
        raise TypeError("symbol name must be a non-empty string")
    return FormalScalar(Fraction(0), ((name, Fraction(1)),), _trusted=True)


# ---------------------------------------------------------------------------
# Scalar-level operations.

Scalar = object  # documentation alias: Fraction | CyclotomicReal | FormalScalar


def is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, CyclotomicReal, FormalScalar))


def as_scalar(x):
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, CyclotomicReal, FormalScalar)):
        return x
    raise TypeError(f"not a scalar: {x!r}")


def arith(op: str, x, y):
    """Dispatch one of add/sub/mul/div with backend promotion rules."""
    x, y = as_scalar(x), as_scalar(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if isinstance(y, Fraction) and y == 0:
            raise DivisionByZero("division by zero")
        return x / y
    raise OutOfRange(f"unknown arithmetic op {op!r}")


def scalar_sign(x, witness: dict | None = None) -> int:
    """Exact sign in {-1, 0, +1}; formal scalars may need a positive witness."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return (x > 0) - (x < 0)
    if isinstance(x, CyclotomicReal):
        # canonical form is never zero here; refine an enclosure until decisive
        prec = 64
        while prec <= (1 << 22):
            lo, hi = cy.eval_real_interval(x.m, x.coeffs, prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise AssertionError("sign refinement failed to converge on nonzero element")
    # formal: decidable without witness when all components share a sign
    values = [x.const] + [c for _, c in x.coords]
    if all(v >= 0 for v in values):
        return 1  # coords nonempty and symbols positive, so strictly positive
    if all(v <= 0 for v in values):
        return -1
    if witness is None:
        raise NoWitness(
            f"sign of {x} has mixed components; supply a positive witness assignment"
        )
    _check_witness(witness)
    v = x.substitute(witness)
    return (v > 0) - (v < 0)


def _check_witness(witness: dict) -> None:
    for sym, val in witness.items():
        if _as_fraction(val) <= 0:
            raise NoWitness(f"witness value for {sym!r} must be positive")


def scalar_compare(x, y, witness: dict | None = None) -> int:
    """Sign of x - y."""
    return scalar_sign(as_scalar(x) - as_scalar(y), witness)


def scalar_eq(x, y) -> bool:
    return as_scalar(x) == as_scalar(y)


def scalar_is_zero(x) -> bool:
    x = as_scalar(x)
    return isinstance(x, Fraction) and x == 0


def scalar_approx(x, precision_bits: int, witness: dict | None = None) -> Interval:
    """Certified enclosure of width at most 2^-precision_bits."""
    x = as_scalar(x)
    if isinstance(x, FormalScalar):
        if witness is None:
            raise NoWitness("cannot approximate a formal scalar without a witness")
        x = x.substitute(witness)
    if isinstance(x, Fraction):
        return Interval(x, x)
    target = Fraction(1, 2**precision_bits)
    prec = max(64, precision_bits + 16)
    while True:
        lo, hi = cy.eval_real_interval(x.m, x.coeffs, prec)
        if hi - lo <= target:
            return Interval(lo, hi)
        prec *= 2
        assert prec <= (1 << 24), "approx refinement runaway"


def scalar_interval(x, prec_bits: int = 64) -> Interval:
    """Quick enclosure at a fixed working precision (no width guarantee)."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return Interval(x, x)
    if isinstance(x, CyclotomicReal):
        return x.interval(prec_bits)
    raise NoWitness("no numeric enclosure for formal scalars without a witness")


def delta(i: int, n: int):
    """Distance ratio sin(i*pi/n)/sin(pi/n) of a regular n-gon, exactly."""
    if n < 2:
        raise OutOfRange(f"polygon needs n >= 2, got {n}")
    if not 1 <= i <= n // 2:
        raise OutOfRange(f"delta index must satisfy 1 <= i <= floor(n/2), got i={i}, n={n}")
    if i == 1:
        return Fraction(1)
    m = 2 * n
    _check_conductor(m)
    table = cy._power_vec_mod_m(m)
    num = tuple(Fraction(a - b) for a, b in zip(table[i % m], table[(-i) % m]))
    den = tuple(Fraction(a - b) for a, b in zip(table[1], table[m - 1]))
    inv = cy.elem_inv(m, den)
    return from_raw(m, cy.elem_mul(m, num, inv))


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _sqrt_prime(p: int):
    """Exact square root of a prime as a cyclotomic scalar."""
    if p == 2:
        return zeta_sym(8, 1)
    table_p = cy._power_vec_mod_m(p)
    phi = cy.euler_phi(p)
    g = [0] * phi
    for a in range(1, p):
        s = _legendre(a, p)
        row = table_p[a % p]
        for j, rj in enumerate(row):
            g[j] += s * rj
    gvec = tuple(Fraction(c) for c in g)
    if p % 4 == 1:
        return from_raw(p, gvec)
    # g = i*sqrt(p); divide by i = zeta_4 at conductor 4p
    m = 4 * p
    _check_conductor(m)
    gbig = cy.promote(p, gvec, m)
    table_m = cy._power_vec_mod_m(m)
    inv_i = tuple(Fraction(c) for c in table_m[(-(m // 4)) % m])  # zeta_4^(-1)
    return from_raw(m, cy.elem_mul(m, gbig, inv_i))


def sqrt_rational(r):
    """Exact square root of a nonnegative rational, as a Scalar.

    Perfect squares come back rational; otherwise the root is assembled from
    quadratic Gauss sums, which may need conductor up to 4 * squarefree part.
    """
    r = _as_fraction(r)
    if r < 0:
        raise NotASquare("square root of a negative rational is not real")
    if r == 0:
        return Fraction(0)
    num, den = r.numerator, r.denominator
    # sqrt(num/den) = sqrt(num*den)/den
    n = num * den
    square, free = 1, 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            square *= d
            n //= d * d
        if n % d == 0:
            free *= d
            n //= d
        d += 1
    free *= n
    root = Fraction(square, den)
    if free == 1:
        return root
    acc = None
    for p in cy.prime_factors(free):
        sp = _sqrt_prime(p)
        acc = sp if acc is None else acc * sp
    result = acc * root
    if scalar_sign(result) < 0:  # Gauss-sum sign conventions can flip; fix once
        result = -result
    assert result * result == r
    return result


def unify_backend_conductor(values):
    """No-op hook kept for clarity: scalars are globally canonical already."""
    return list(values)


# ---------------------------------------------------------------------------
# Canonical encodings.


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def scalar_to_json(x):
    """Canonical JSON-ready encoding of a scalar."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return _frac_str(x)
    if isinstance(x, CyclotomicReal):
        return {"m": x.m, "c": [_frac_str(c) for c in x.coeffs]}
    return {
        "const": _frac_str(x.const),
        "syms": {s: _frac_str(c) for s, c in x.coords},
    }


def scalar_from_json(obj):
    """Parse the canonical encoding (leniently accepting bare ints/strings)."""
    if isinstance(obj, (int, str)):
        return _as_fraction(obj)
    if isinstance(obj, dict):
        if "m" in obj:
            return cyclo(int(obj["m"]), [_as_fraction(c) for c in obj["c"]])
        if "const" in obj or "syms" in obj:
            return formal(
                _as_fraction(obj.get("const", 0)),
                {s: _as_fraction(c) for s, c in obj.get("syms", {}).items()},
            )
    raise TypeError(f"cannot parse scalar from {obj!r}")


def scalar_text(x) -> str:
    """Human-readable deterministic rendering (used by the CLI text format)."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, CyclotomicReal):
        return str(x)
    return str(x)


# short names matching the operation vocabulary used across the package
sign = scalar_sign
approx = scalar_approx
