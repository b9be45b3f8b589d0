"""Factories for the concrete spaces under study.

Cycle graphs and regular polygons (as circular spaces), restrictions of a
circular type to fewer points, the even and nonagon mutants, isomers for
every n >= 4, the three-trees-one-magnitude family over formal edge
lengths, and exact Euclidean coordinate fixtures with a Cayley-Menger
style embeddability decision.

Every factory validates its output exhaustively before returning it: the
constructions come with proofs, and the cheap re-check catches any
transcription slip in the distance tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadLength, BadN, MetricViolation, TooLarge, TypeInvalid, UnknownName
from .scalar import as_scalar, delta, formal_symbol, scalar_sign, sqrt_rational
from .space import (
    CircularType,
    FiniteMetricSpace,
    are_isometric,
    edge_multiset,
    index_abs,
    quasi_homog_type,
    row_multiset,
    validate_circular_type,
    validate_metric,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def circular_space(ct: CircularType, label: str | None = None) -> FiniteMetricSpace:
    """The circulant space d(P_i, P_j) = d_{|j-i|_n} of a validated type."""
    validate_circular_type(ct)
    n = ct.n
    rows = [[ct.distance(j - i) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(rows, label=label)


def cycle_graph(n: int) -> FiniteMetricSpace:
    """C_n: shortest-path distances on the n-cycle, type (1, 2, ..., n//2)."""
    if n < 3:
        raise BadN(f"cycle graph needs n >= 3, got {n}")
    ct = CircularType(n, tuple(Fraction(i) for i in range(1, n // 2 + 1)))
    return circular_space(ct, label=f"C_{n}")


def regular_polygon(n: int) -> FiniteMetricSpace:
    """The regular n-gon with unit side: type (delta_1, ..., delta_{n//2})."""
    if n < 3:
        raise BadN(f"regular polygon needs n >= 3, got {n}")
    ct = CircularType(n, tuple(delta(i, n) for i in range(1, n // 2 + 1)))
    return circular_space(ct, label=f"Delta_{n}")


def restricted_polygon(ct: CircularType, m: int) -> FiniteMetricSpace:
    """First m points of a circular space, re-wrapped on the cycle Z/m.

    d(Q_i, Q_j) = d_{|j-i|_m} with the values of ``ct`` (modulus n); valid
    as a metric whenever the type is valid for modulus n and m < n, which
    is re-checked exhaustively here anyway.
    """
    if not 1 <= m < ct.n:
        raise TypeInvalid(f"need 1 <= m < n = {ct.n}, got m = {m}")
    validate_circular_type(ct)
    rows = [
        [
            _ZERO if i == j else ct.values[index_abs(j - i, m) - 1]
            for j in range(m)
        ]
        for i in range(m)
    ]
    space = FiniteMetricSpace(rows, label=f"restricted_{ct.n}_to_{m}")
    validate_metric(space).raise_if_invalid()
    return space


def _checked(space: FiniteMetricSpace, source: FiniteMetricSpace) -> FiniteMetricSpace:
    """Common construction-time verification for mutants and isomers."""
    rep = validate_metric(space)
    if not rep.is_metric:
        raise MetricViolation(
            f"{space.label or 'construction'} failed validation: {rep.summary()}"
        )
    try:
        w = are_isometric(space, source)
    except TooLarge:
        w = None  # invariants matched and the search is capped; the theorem carries it
    if w is not None:
        raise MetricViolation(
            f"{space.label or 'construction'} is isometric to its source"
        )
    return space


def mutant_even(ct: CircularType) -> FiniteMetricSpace:
    """Two half-size polygons with crossed distances, same row type, new space.

    n = 4k: cross distance d_{k + |j-i|_{2k}}; n = 4k+2: cross distance
    d_{2k+1 - |j-i|_{2k+1}}.  Verified on construction: valid metric, same
    quasi-homogeneous type as the circular source, not isometric to it.
    """
    n = ct.n
    if n < 6 or n % 2:
        raise BadN(f"even mutants need even n >= 6, got {n}")
    validate_circular_type(ct)
    h = n // 2
    vals = ct.values

    def within(i, j):
        s = index_abs(j - i, h)
        return _ZERO if s == 0 else vals[s - 1]

    if h % 2 == 0:
        k = h // 2

        def cross(i, j):
            return vals[k + index_abs(j - i, h) - 1]
    else:

        def cross(i, j):
            return vals[h - index_abs(j - i, h) - 1]

    rows = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if (i < h) == (j < h):
                rows[i][j] = within(i % h, j % h)
            else:
                rows[i][j] = cross(i % h, j % h)
    space = FiniteMetricSpace(rows, label=f"mutant_{n}")
    source = circular_space(ct)
    if quasi_homog_type(space) != row_multiset(source, 0):
        raise MetricViolation(f"mutant_{n} lost the row type of its source")
    return _checked(space, source)


def mutant_nonagon() -> FiniteMetricSpace:
    """Nine points in three unit triples with shifted polygon chords.

    Triples A, B, C; within a triple every distance is 1; between
    consecutive triples (A to B, B to C, C to A) the distance is
    delta_2, delta_3, delta_4 as the index shift is 0, 1, 2 mod 3.  Same
    row type as the regular nonagon, not isometric to it.
    """
    d2, d3, d4 = delta(2, 9), delta(3, 9), delta(4, 9)
    shifted = (d2, d3, d4)

    def dist(p, q):
        gp, ip = divmod(p, 3)
        gq, iq = divmod(q, 3)
        if gp == gq:
            return _ONE
        if (gq - gp) % 3 == 1:
            return shifted[(iq - ip) % 3]
        return shifted[(ip - iq) % 3]

    rows = [
        [_ZERO if i == j else dist(i, j) for j in range(9)] for i in range(9)
    ]
    space = FiniteMetricSpace(rows, label="mutant_nonagon")
    source = regular_polygon(9)
    if quasi_homog_type(space) != row_multiset(source, 0):
        raise MetricViolation("mutant_nonagon lost the row type of the nonagon")
    return _checked(space, source)


def _cross_suffix_4k1(k: int, i: int, j: int) -> int:
    """Suffix of d(A_i, B_j) for the n = 4k+1 isomer (1-based i, j)."""
    if 1 <= j <= k:
        return k + j
    if j == k + 1 or (i, j) == (2 * k, k + 2):
        return 2 * k
    if j == 2 * k + 1 and i <= k:
        return k
    l = j - k - 1
    if 1 <= l <= k - 1 and i <= 2 * k - l:
        return 2 * k - l
    l = j - k - 2
    if 1 <= l <= k - 1 and i >= 2 * k - l:
        return 2 * k - l
    raise AssertionError(f"cross table gap at k={k}, i={i}, j={j}")


def _cross_suffix_4k3(k: int, i: int, j: int) -> int:
    """Suffix of d(A_i, B_j) for the n = 4k+3 isomer (1-based i, j)."""
    if 1 <= j <= k + 1:
        return k + j
    if j == k + 2 or (i, j) == (2 * k + 1, k + 3):
        return 2 * k + 1
    if j == 2 * k + 2 and i <= k + 1:
        return k + 1
    l = j - k - 2
    if 1 <= l <= k - 1 and i <= 2 * k + 1 - l:
        return 2 * k + 1 - l
    l = j - k - 3
    if 1 <= l <= k - 1 and i >= 2 * k + 1 - l:
        return 2 * k + 1 - l
    raise AssertionError(f"cross table gap at k={k}, i={i}, j={j}")


def _two_gon_glue(ct: CircularType, na: int, nb: int, suffix) -> FiniteMetricSpace:
    """An na-gon and an nb-gon over ct's values with a cross-suffix table."""
    n = ct.n
    vals = ct.values

    def poly(i, j, m):
        s = index_abs(j - i, m)
        return _ZERO if s == 0 else vals[s - 1]

    rows = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if i < na and j < na:
                rows[i][j] = poly(i, j, na)
            elif i >= na and j >= na:
                rows[i][j] = poly(i - na, j - na, nb)
            elif i < na:
                rows[i][j] = vals[suffix(i + 1, j - na + 1) - 1]
            else:
                rows[i][j] = vals[suffix(j + 1, i - na + 1) - 1]
    return FiniteMetricSpace(rows, label=f"isomer_{n}")


def isomer(ct: CircularType) -> FiniteMetricSpace:
    """A space with the same edge multiset as circular_space(ct), not isometric.

    n = 4 and n = 5 are the explicit small tables; even n >= 6 reuses the
    mutant; odd n >= 9 glues a 2k-gon to a (2k+1)-gon (n = 4k+1) or a
    (2k+1)-gon to a (2k+2)-gon (n = 4k+3) with the published cross tables.
    Verified on construction: valid metric, equal edge multiset, not
    isometric to the source.
    """
    n = ct.n
    if n < 4:
        raise BadN(f"isomers need n >= 4, got {n}")
    validate_circular_type(ct)
    if n % 2 == 0 and n >= 6:
        return mutant_even(ct)
    d = ct.values
    if n == 4:
        d1, d2 = d
        rows = [
            [_ZERO, d1, d1, d1],
            [d1, _ZERO, d2, d2],
            [d1, d2, _ZERO, d1],
            [d1, d2, d1, _ZERO],
        ]
        space = FiniteMetricSpace(rows, label="isomer_4")
    elif n == 5:
        d1, d2 = d
        rows = [[_ZERO] * 5 for _ in range(5)]
        ones = {(2, 3), (2, 4), (2, 5), (3, 4), (3, 5)}
        for a in range(1, 6):
            for b in range(a + 1, 6):
                v = d1 if (a, b) in ones else d2
                rows[a - 1][b - 1] = rows[b - 1][a - 1] = v
        space = FiniteMetricSpace(rows, label="isomer_5")
    elif n % 4 == 1:
        k = n // 4
        space = _two_gon_glue(ct, 2 * k, 2 * k + 1, lambda i, j: _cross_suffix_4k1(k, i, j))
    else:
        k = n // 4
        space = _two_gon_glue(ct, 2 * k + 1, 2 * k + 2, lambda i, j: _cross_suffix_4k3(k, i, j))
    source = circular_space(ct)
    if edge_multiset(space) != edge_multiset(source):
        raise MetricViolation(f"isomer_{n} changed the edge multiset")
    return _checked(space, source)


def fig2_family(a: str = "a", b: str = "b", c: str = "c"):
    """Three trees with one formal magnitude: a tripod and two path graphs.

    Edge lengths are formal symbols named ``a``, ``b``, ``c``; distances
    are path sums.  The two paths carry the lengths in orders (a, b, c)
    and (b, a, c), so for distinct symbols they share the magnitude but
    not the edge multiset.
    """
    sa, sb, sc = formal_symbol(a), formal_symbol(b), formal_symbol(c)

    def path(u, v, w, label):
        rows = [
            [_ZERO, u, u + v, u + v + w],
            [u, _ZERO, v, v + w],
            [u + v, v, _ZERO, w],
            [u + v + w, v + w, w, _ZERO],
        ]
        return FiniteMetricSpace(rows, label=label)

    tripod = FiniteMetricSpace(
        [
            [_ZERO, sa + sb, sa, sa + sc],
            [sa + sb, _ZERO, sb, sb + sc],
            [sa, sb, _ZERO, sc],
            [sa + sc, sb + sc, sc, _ZERO],
        ],
        label=f"tripod({a},{b},{c})",
    )
    return [
        tripod,
        path(sa, sb, sc, f"path({a},{b},{c})"),
        path(sb, sa, sc, f"path({b},{a},{c})"),
    ]


@dataclass(frozen=True)
class PointConfig:
    """Exact coordinates in a common dimension."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(as_scalar(x) for x in p) for p in self.points)
        if pts and any(len(p) != len(pts[0]) for p in pts):
            raise BadLength("all points need the same dimension")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return len(self.points[0]) if self.points else 0


def squared_distance_space(config: PointConfig):
    """Matrix of exact squared pairwise distances."""
    pts = config.points
    n = len(pts)
    out = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            acc = _ZERO
            for x, y in zip(pts[i], pts[j]):
                diff = x - y
                acc = acc + diff * diff
            out[i][j] = out[j][i] = acc
    return out


def euclidean_fixture(name: str):
    """Coordinate fixtures, exactly as printed, plus one pure distance matrix.

    square_isomer_r3 and hexagon_mutant_r3 sit in R^3, pentagon_isomer_r4
    in R^4; hexagon_mutant_nonembeddable has no coordinates anywhere, so it
    comes back as a FiniteMetricSpace directly.
    """
    half = Fraction(1, 2)
    if name == "square_isomer_r3":
        r3h = sqrt_rational(Fraction(3, 4))
        return PointConfig(
            (
                (_ZERO, _ZERO, _ZERO),
                (_ONE, _ZERO, _ZERO),
                (half, r3h, _ZERO),
                (_ZERO, _ZERO, _ONE),
            )
        )
    if name == "pentagon_isomer_r4":
        s5 = sqrt_rational(5)
        p14 = (s5 + 1) / 4
        return PointConfig(
            (
                (_ZERO, _ZERO, p14, (s5 + 3) / 4),
                (_ZERO, half, _ZERO, _ZERO),
                (_ZERO, -half, _ZERO, _ZERO),
                (p14, _ZERO, (s5 - 1) / 4, _ZERO),
                (-p14, _ZERO, (s5 - 1) / 4, _ZERO),
            )
        )
    if name == "hexagon_mutant_r3":
        a = sqrt_rational(Fraction(1, 3))
        b = sqrt_rational(Fraction(1, 12))
        z = sqrt_rational(Fraction(8, 3))
        return PointConfig(
            (
                (a, _ZERO, _ZERO),
                (-b, half, _ZERO),
                (-b, -half, _ZERO),
                (-a, _ZERO, z),
                (b, half, z),
                (b, -half, z),
            )
        )
    if name == "hexagon_mutant_nonembeddable":
        r3 = sqrt_rational(3)
        two = Fraction(2)
        rows = [[_ZERO] * 6 for _ in range(6)]
        for i in range(6):
            for j in range(i + 1, 6):
                if index_abs(j - i, 6) == 1:
                    v = _ONE
                elif (i, j) in {(0, 3), (1, 5), (2, 4)}:
                    v = two
                else:
                    v = r3
                rows[i][j] = rows[j][i] = v
        return FiniteMetricSpace(rows, label="hexagon_mutant_nonembeddable")
    raise UnknownName(f"no fixture called {name!r}")


@dataclass(frozen=True)
class EmbedVerdict:
    """PSD/rank outcome; ``dim`` is the minimal dimension when the form is PSD."""

    embeddable: bool
    dim: int | None = None

    def __str__(self):
        if self.embeddable:
            return f"embeddable_in_dim {self.dim}"
        return "not_embeddable"


def cayley_menger_embeddable(sq, max_dim: int, witness: dict | None = None) -> EmbedVerdict:
    """Decide exact Euclidean embeddability from squared distances.

    The classical bordered-determinant criterion is evaluated through the
    equivalent Gram form G_ij = (sq_0i + sq_0j - sq_ij)/2: the points
    embed in R^d exactly when G is positive semidefinite of rank <= d,
    decided here by symmetric pivoted elimination over exact scalars.
    """
    n = len(sq)
    m = n - 1
    if m == 0:
        return EmbedVerdict(True, 0)
    half = Fraction(1, 2)
    A = [
        [
            (as_scalar(sq[0][i + 1]) + as_scalar(sq[0][j + 1]) - as_scalar(sq[i + 1][j + 1])) * half
            for j in range(m)
        ]
        for i in range(m)
    ]
    rank = 0
    for r in range(m):
        pivot_row = None
        for i in range(r, m):
            s = scalar_sign(A[i][i], witness) if A[i][i] != _ZERO else 0
            if s < 0:
                return EmbedVerdict(False)
            if s > 0 and pivot_row is None:
                pivot_row = i
        if pivot_row is None:
            for i in range(r, m):
                for j in range(r, m):
                    if A[i][j] != _ZERO:
                        return EmbedVerdict(False)
            break
        if pivot_row != r:
            A[r], A[pivot_row] = A[pivot_row], A[r]
            for row in A:
                row[r], row[pivot_row] = row[pivot_row], row[r]
        piv = A[r][r]
        for i in range(r + 1, m):
            f = A[i][r] / piv
            for j in range(r, m):
                A[i][j] = A[i][j] - f * A[r][j]
        rank += 1
    if rank <= max_dim:
        return EmbedVerdict(True, rank)
    return EmbedVerdict(False, rank)
