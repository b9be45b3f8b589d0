"""Generalized polynomials and rational functions in one variable q.

A GenPolynomial is a finite sum  sum_e c_e * q^e  with rational coefficients
and *scalar* exponents (nonnegative reals or formal lengths), stored sparsely
as an exponent -> coefficient map.  Because scalars are globally canonical,
the map's keys give exact term identity for free.

A GenRational is a quotient num/den of generalized polynomials kept in the
normal form where den has constant term exactly 1.  Equality of quotients is
decided by cross-multiplication, never by computing GCDs.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key

from .errors import DivisionByZero, NoWitness, OutOfRange, ZeroConstantTerm
from .scalar import (
    CyclotomicReal,
    FormalScalar,
    as_scalar,
    scalar_compare,
    scalar_sign,
    scalar_text,
    scalar_to_json,
    scalar_from_json,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _structural_key(e):
    if isinstance(e, Fraction):
        return (e, ())
    if isinstance(e, FormalScalar):
        return (e.const, e.coords)
    raise TypeError("structural ordering is only for rational/formal exponents")


def exponent_cmp(a, b, witness: dict | None = None) -> int:
    """Deterministic total order on a set of exponents of one backend family."""
    if a == b:
        return 0
    formal = isinstance(a, FormalScalar) or isinstance(b, FormalScalar)
    if formal:
        if witness is not None:
            s = scalar_compare(a, b, witness)
            if s:
                return s
        ka, kb = _structural_key(a), _structural_key(b)
        return -1 if ka < kb else 1
    return scalar_compare(a, b)


class GenPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        t = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c) if not isinstance(c, Fraction) else c
                if c:
                    t[as_scalar(e)] = c
        self.terms = t

    # -- constructors -----------------------------------------------------------
    @staticmethod
    def zero() -> "GenPolynomial":
        return GenPolynomial()

    @staticmethod
    def one() -> "GenPolynomial":
        return GenPolynomial({Fraction(0): _ONE})

    @staticmethod
    def constant(c) -> "GenPolynomial":
        return GenPolynomial({Fraction(0): Fraction(c)})

    @staticmethod
    def monomial(e, c=1) -> "GenPolynomial":
        return GenPolynomial({e: Fraction(c)})

    # -- ring operations --------------------------------------------------------
    def __add__(self, other: "GenPolynomial") -> "GenPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        r = GenPolynomial()
        r.terms = out
        return r

    def __sub__(self, other: "GenPolynomial") -> "GenPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) - c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        r = GenPolynomial()
        r.terms = out
        return r

    def __neg__(self) -> "GenPolynomial":
        r = GenPolynomial()
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __mul__(self, other: "GenPolynomial") -> "GenPolynomial":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                c = c1 * c2
                s = out.get(e)
                if s is None:
                    out[e] = c
                else:
                    s = s + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        r = GenPolynomial()
        r.terms = out
        return r

    def scale(self, c) -> "GenPolynomial":
        c = Fraction(c)
        r = GenPolynomial()
        if c:
            r.terms = {e: c0 * c for e, c0 in self.terms.items()}
        return r

    def __eq__(self, other):
        if isinstance(other, GenPolynomial):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get(Fraction(0), _ZERO)

    def coefficient(self, e) -> Fraction:
        return self.terms.get(as_scalar(e), _ZERO)

    def min_exponent(self, witness: dict | None = None):
        if not self.terms:
            raise OutOfRange("zero polynomial has no minimal exponent")
        best = None
        for e in self.terms:
            if best is None or exponent_cmp(e, best, witness) < 0:
                best = e
        return best

    def terms_sorted(self, witness: dict | None = None):
        return sorted(
            self.terms.items(),
            key=cmp_to_key(lambda a, b: exponent_cmp(a[0], b[0], witness)),
        )

    def truncate(self, bound, witness: dict | None = None) -> "GenPolynomial":
        """Drop every term whose exponent exceeds ``bound``."""
        keep = {}
        for e, c in self.terms.items():
            if scalar_compare(e, bound, witness) <= 0:
                keep[e] = c
        r = GenPolynomial()
        r.terms = keep
        return r

    # -- encodings --------------------------------------------------------------
    def to_json(self, witness: dict | None = None):
        return [
            {"e": scalar_to_json(e), "c": f"{c.numerator}/{c.denominator}"}
            for e, c in self.terms_sorted(witness)
        ]

    @staticmethod
    def from_json(obj) -> "GenPolynomial":
        terms = {}
        for item in obj:
            e = scalar_from_json(item["e"])
            c = item["c"]
            p, q = c.split("/") if "/" in c else (c, "1")
            terms[e] = Fraction(int(p), int(q))
        return GenPolynomial(terms)

    def to_text(self, witness: dict | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms_sorted(witness):
            cs = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if isinstance(e, Fraction) and e == 0:
                parts.append(cs)
            else:
                parts.append(f"{cs}*q^{{{scalar_text(e)}}}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"GenPolynomial({self.to_text()})"


class GenRational:
    """num/den with den normalized to constant term 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: GenPolynomial, den: GenPolynomial):
        c0 = den.constant_term()
        if c0 == 0:
            raise ZeroConstantTerm("denominator has zero constant term")
        if c0 != 1:
            inv = 1 / c0
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @staticmethod
    def from_polynomial(p: GenPolynomial) -> "GenRational":
        return GenRational(p, GenPolynomial.one())

    @staticmethod
    def constant(c) -> "GenRational":
        return GenRational(GenPolynomial.constant(c), GenPolynomial.one())

    def __add__(self, other: "GenRational") -> "GenRational":
        return GenRational(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "GenRational") -> "GenRational":
        return GenRational(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "GenRational":
        return GenRational(-self.num, self.den)

    def __mul__(self, other: "GenRational") -> "GenRational":
        return GenRational(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "GenRational") -> "GenRational":
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        # the quotient's denominator must keep a nonzero constant term
        return GenRational(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if isinstance(other, GenRational):
            return gr_equal(self, other)
        return NotImplemented

    __hash__ = None  # semantic equality via cross-multiplication; not hashable

    def to_json(self, witness: dict | None = None):
        return {"num": self.num.to_json(witness), "den": self.den.to_json(witness)}

    @staticmethod
    def from_json(obj) -> "GenRational":
        return GenRational(
            GenPolynomial.from_json(obj["num"]), GenPolynomial.from_json(obj["den"])
        )

    def to_text(self, witness: dict | None = None) -> str:
        return f"({self.num.to_text(witness)}) / ({self.den.to_text(witness)})"

    def __repr__(self):
        return f"GenRational({self.to_text()})"


def gp_arith(f: GenPolynomial, g: GenPolynomial, op: str) -> GenPolynomial:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise OutOfRange(f"unknown polynomial op {op!r}")


def gr_arith(a: GenRational, b: GenRational, op: str) -> GenRational:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise OutOfRange(f"unknown arithmetic op {op!r}")


def gr_equal(a: GenRational, b: GenRational) -> bool:
    """Equality of quotients by exact cross-multiplication."""
    return a.num * b.den == b.num * a.den


def series(r: GenRational, bound, witness: dict | None = None) -> GenPolynomial:
    """All terms of the power-series expansion of r with exponent <= bound.

    Writes den = 1 + u and expands num * sum_k (-u)^k, truncating at ``bound``
    after every step.  Requires every exponent of u to be strictly positive,
    which holds for magnitude denominators of spaces with positive distances.
    """
    one = GenPolynomial.one()
    u = r.den - one
    for e in u.terms:
        s = _positive_sign(e, witness)
        if s <= 0:
            raise ZeroConstantTerm(
                "series expansion needs strictly positive denominator exponents"
            )
    cur = r.num.truncate(bound, witness)
    acc = cur
    neg_u = -u
    guard = 0
    while not cur.is_zero():
        cur = (cur * neg_u).truncate(bound, witness)
        acc = acc + cur
        guard += 1
        assert guard <= 100000, "series expansion failed to terminate"
    return acc


def _positive_sign(e, witness):
    try:
        return scalar_sign(e, witness)
    except NoWitness:
        raise NoWitness(
            "series truncation over formal exponents needs a positive witness"
        ) from None
