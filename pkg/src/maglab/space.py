"""Finite metric spaces with exact scalar distances.

A space is a distance matrix over exact scalars with an optional name.
Distinct distance values are interned to small integer codes once per
space, so all combinatorial work (isometry search, circular recognition,
triangle checks) runs on integer matrices and each sign evaluation on
actual scalars happens at most once per value pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .errors import BadLength, BadN, MetricViolation, TooLarge, TypeInvalid
from .genpoly import exponent_cmp as _scalar_cmp
from .scalar import as_scalar, scalar_sign, scalar_to_json, scalar_from_json, scalar_text


def index_abs(i: int, n: int) -> int:
    """Distance |i| on the index cycle Z/n: min(i mod n, -i mod n)."""
    r = i % n
    return min(r, n - r)


class FiniteMetricSpace:
    __slots__ = ("label", "matrix", "_code_cache")

    def __init__(self, matrix, label: str | None = None):
        rows = [tuple(as_scalar(x) for x in row) for row in matrix]
        n = len(rows)
        if n == 0:
            raise BadN("a metric space needs at least one point")
        for row in rows:
            if len(row) != n:
                raise BadLength("distance matrix must be square")
        self.label = label
        self.matrix = tuple(rows)
        self._code_cache = None

    @property
    def n(self) -> int:
        return len(self.matrix)

    def distance(self, i: int, j: int):
        return self.matrix[i][j]

    # -- distance interning -----------------------------------------------------
    def _codes(self):
        if self._code_cache is None:
            n = self.n
            values = []
            index = {}
            cm = []
            for i in range(n):
                row = []
                for j in range(n):
                    v = self.matrix[i][j]
                    c = index.get(v)
                    if c is None:
                        c = len(values)
                        index[v] = c
                        values.append(v)
                    row.append(c)
                cm.append(tuple(row))
            self._code_cache = (tuple(cm), tuple(values))
        return self._code_cache

    @property
    def code_matrix(self):
        return self._codes()[0]

    @property
    def code_values(self):
        return self._codes()[1]

    def __eq__(self, other):
        if isinstance(other, FiniteMetricSpace):
            return self.label == other.label and self.matrix == other.matrix
        return NotImplemented

    def __hash__(self):
        return hash((self.label, self.matrix))

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"FiniteMetricSpace(n={self.n}{tag})"

    def to_json(self):
        obj = {
            "n": self.n,
            "dist": [[scalar_to_json(x) for x in row] for row in self.matrix],
        }
        if self.label is not None:
            obj["label"] = self.label
        return obj

    @staticmethod
    def from_json(obj) -> "FiniteMetricSpace":
        n = int(obj["n"])
        raw = obj["dist"]
        if len(raw) == n and all(len(r) == n for r in raw):
            rows = [[scalar_from_json(x) for x in row] for row in raw]
        elif len(raw) == n and all(len(raw[i]) == n - 1 - i for i in range(n)):
            # upper-triangle variant: row i lists d(i, i+1..n-1)
            rows = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for k, x in enumerate(raw[i]):
                    v = scalar_from_json(x)
                    rows[i][i + 1 + k] = v
                    rows[i + 1 + k][i] = v
        else:
            raise BadLength("dist must be a full square or upper-triangle matrix")
        return FiniteMetricSpace(rows, label=obj.get("label"))


@dataclass(frozen=True)
class ValidationReport:
    n: int
    diagonal_failures: tuple
    symmetry_failures: tuple
    positivity_failures: tuple
    triangle_failures: tuple

    @property
    def is_metric(self) -> bool:
        return not (
            self.diagonal_failures
            or self.symmetry_failures
            or self.positivity_failures
            or self.triangle_failures
        )

    def summary(self) -> str:
        if self.is_metric:
            return f"valid metric on {self.n} points"
        bits = []
        if self.diagonal_failures:
            bits.append(f"{len(self.diagonal_failures)} nonzero diagonal entries")
        if self.symmetry_failures:
            bits.append(f"{len(self.symmetry_failures)} asymmetric pairs")
        if self.positivity_failures:
            bits.append(f"{len(self.positivity_failures)} nonpositive distances")
        if self.triangle_failures:
            bits.append(f"{len(self.triangle_failures)} triangle violations")
        return "; ".join(bits)

    def raise_if_invalid(self):
        if not self.is_metric:
            raise MetricViolation(self.summary())


def validate_metric(space: FiniteMetricSpace, witness: dict | None = None) -> ValidationReport:
    """Exhaustive exact check of the metric axioms.

    Sign tests are memoized per distance-code triple, so repeated value
    patterns (every circular space is full of them) cost one evaluation.
    Formal distances whose comparisons are not decidable on their own
    require ``witness``.
    """
    n = space.n
    m = space.matrix
    cm = space.code_matrix
    vals = space.code_values
    zero = Fraction(0)

    diag = tuple(i for i in range(n) if m[i][i] != zero)
    sym = tuple(
        (i, j) for i in range(n) for j in range(i + 1, n) if m[i][j] != m[j][i]
    )

    pos_memo = {}
    pos = []
    for i in range(n):
        for j in range(i + 1, n):
            c = cm[i][j]
            s = pos_memo.get(c)
            if s is None:
                s = scalar_sign(vals[c], witness)
                pos_memo[c] = s
            if s <= 0:
                pos.append((i, j))

    tri_memo = {}
    tri = []
    for i in range(n):
        for j in range(i + 1, n):
            cij = cm[i][j]
            for k in range(n):
                if k == i or k == j:
                    continue
                a, b = cm[i][k], cm[k][j]
                key = (cij, a, b) if a <= b else (cij, b, a)
                s = tri_memo.get(key)
                if s is None:
                    gap = m[i][k] + m[k][j] - m[i][j]
                    s = scalar_sign(gap, witness) if not _is_zero_scalar(gap) else 0
                    tri_memo[key] = s
                if s < 0:
                    tri.append((i, j, k))
    return ValidationReport(n, diag, sym, tuple(pos), tuple(tri))


def _is_zero_scalar(x) -> bool:
    return isinstance(x, Fraction) and x == 0


class EdgeMultiset:
    """Multiset of scalar values with deterministic ordering."""

    __slots__ = ("counts", "_hash")

    def __init__(self, values, witness: dict | None = None):
        tally = {}
        for v in values:
            v = as_scalar(v)
            tally[v] = tally.get(v, 0) + 1
        items = sorted(
            tally.items(), key=cmp_to_key(lambda a, b: _scalar_cmp(a[0], b[0], witness))
        )
        self.counts = tuple(items)
        self._hash = None

    def __eq__(self, other):
        if isinstance(other, EdgeMultiset):
            return self.counts == other.counts
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.counts)
        return self._hash

    def __len__(self):
        return sum(c for _, c in self.counts)

    def values(self):
        return tuple(v for v, _ in self.counts)

    def multiplicity(self, v) -> int:
        v = as_scalar(v)
        for val, c in self.counts:
            if val == v:
                return c
        return 0

    def to_text(self) -> str:
        return "{" + ", ".join(f"{scalar_text(v)} x{c}" for v, c in self.counts) + "}"

    def to_json(self):
        return [{"value": scalar_to_json(v), "count": c} for v, c in self.counts]

    def __repr__(self):
        return f"EdgeMultiset({self.to_text()})"


def row_multiset(space: FiniteMetricSpace, i: int, witness: dict | None = None) -> EdgeMultiset:
    return EdgeMultiset(
        (space.matrix[i][j] for j in range(space.n) if j != i), witness
    )


def edge_multiset(space: FiniteMetricSpace, witness: dict | None = None) -> EdgeMultiset:
    n = space.n
    return EdgeMultiset(
        (space.matrix[i][j] for i in range(n) for j in range(i + 1, n)), witness
    )


def quasi_homog_type(space: FiniteMetricSpace, witness: dict | None = None):
    """The common row multiset if every point sees the same distances, else None."""
    first = row_multiset(space, 0, witness)
    for i in range(1, space.n):
        if row_multiset(space, i, witness) != first:
            return None
    return first


@dataclass(frozen=True)
class CircularType:
    """The defining vector (d_1, ..., d_{n//2}) of a circular space on n points."""

    n: int
    values: tuple

    def __post_init__(self):
        if self.n < 1:
            raise BadN("a circular type needs n >= 1")
        vals = tuple(as_scalar(v) for v in self.values)
        if len(vals) != self.n // 2:
            raise BadLength(
                f"type for n={self.n} needs {self.n // 2} values, got {len(vals)}"
            )
        object.__setattr__(self, "values", vals)

    def distance(self, shift: int):
        """d_{|shift|_n}, with d_0 = 0."""
        s = index_abs(shift, self.n)
        return Fraction(0) if s == 0 else self.values[s - 1]

    def to_json(self):
        return {"n": self.n, "type": [scalar_to_json(v) for v in self.values]}

    @staticmethod
    def from_json(obj) -> "CircularType":
        return CircularType(int(obj["n"]), tuple(scalar_from_json(v) for v in obj["type"]))


def validate_circular_type(ct: CircularType, witness: dict | None = None):
    """Enforce strict monotonicity and the circular triangle inequality.

    Raises TypeInvalid naming the violating index pair; returns None on
    success.  The inequality checked is d_{|i|} + d_{|j|} >= d_{|i+j|} for
    all nonzero residues i, j.
    """
    n = ct.n
    vals = ct.values
    prev = Fraction(0)
    for idx, v in enumerate(vals, start=1):
        if scalar_sign(v - prev, witness) <= 0:
            raise TypeInvalid(
                f"type values must increase strictly: d_{idx} fails (index pair ({idx - 1}, {idx}))"
            )
        prev = v
    memo = {}
    for i in range(1, n):
        ai = index_abs(i, n)
        for j in range(i, n):
            aj = index_abs(j, n)
            ak = index_abs(i + j, n)
            if ak == 0:
                continue
            key = (min(ai, aj), max(ai, aj), ak)
            s = memo.get(key)
            if s is None:
                gap = ct.distance(i) + ct.distance(j) - ct.distance(i + j)
                s = scalar_sign(gap, witness) if not _is_zero_scalar(gap) else 0
                memo[key] = s
            if s < 0:
                raise TypeInvalid(
                    f"circular triangle inequality fails at (i, j) = ({i}, {j}) "
                    f"for modulus {n}"
                )


def circular_type(space: FiniteMetricSpace, cap: int = 16):
    """Recognize a circular space.

    Searches for a cyclic ordering p of the points and a vector t with
    d(p_i, p_j) = t_{|i-j|_n} for all i, j.  Returns a CircularType if one
    exists (preferring a strictly monotone presentation, which exists for
    every space in sight) and None otherwise.  The search is exponential
    in the worst case, so n is capped.
    """
    n = space.n
    if n > cap:
        raise TooLarge(f"circular recognition capped at {cap} points (got {n})")
    if n == 1:
        return CircularType(1, ())
    cm = space.code_matrix
    vals = space.code_values

    if quasi_homog_type(space) is None and n > 2:
        return None

    def type_from_order(p):
        t = {}
        for shift in range(1, n // 2 + 1):
            t[shift] = cm[p[0]][p[shift]]
        for i in range(n):
            for j in range(i + 1, n):
                if cm[p[i]][p[j]] != t[index_abs(j - i, n)]:
                    return None
        return tuple(vals[t[s]] for s in range(1, n // 2 + 1))

    found = type_from_order(list(range(n)))
    if found is None:
        p = [0]
        used = [False] * n
        used[0] = True
        t: dict[int, int] = {}

        def place(k: int):
            if k == n:
                return True
            for v in range(1, n):
                if used[v]:
                    continue
                added = []
                ok = True
                for i in range(k):
                    shift = index_abs(k - i, n)
                    c = cm[p[i]][v]
                    have = t.get(shift)
                    if have is None:
                        t[shift] = c
                        added.append(shift)
                    elif have != c:
                        ok = False
                        break
                if ok:
                    p.append(v)
                    used[v] = True
                    if place(k + 1):
                        return True
                    used[v] = False
                    p.pop()
                for s in added:
                    del t[s]
            return False

        if not place(1):
            return None
        found = type_from_order(p)
        assert found is not None

    return CircularType(n, _best_presentation(found, n))


def _best_presentation(t: tuple, n: int) -> tuple:
    """Canonicalize a type vector over index-unit relabelings.

    Relabeling points by i -> u*i (u coprime to n) permutes the profile to
    s -> t_{|u*s|_n}; a strictly increasing representative is preferred if
    one exists, else the deterministically least one.
    """
    m = n // 2
    cands = []
    for u in range(1, n // 2 + 1):
        if gcd(u, n) != 1:
            continue
        cands.append(tuple(t[index_abs(u * s, n) - 1] for s in range(1, m + 1)))
    def is_mono(c):
        prev = Fraction(0)
        for v in c:
            if _scalar_cmp(prev, v) >= 0:
                return False
            prev = v
        return True
    mono = [c for c in cands if is_mono(c)]
    pool = mono if mono else cands
    best = pool[0]
    for c in pool[1:]:
        for a, b in zip(c, best):
            s = _scalar_cmp(a, b)
            if s < 0:
                best = c
                break
            if s > 0:
                break
    return best


def _triangle_profiles(cm, n):
    """Per-vertex multiset of distance-code triangle patterns."""
    profs = []
    for i in range(n):
        cnt: dict = {}
        for j in range(n):
            if j == i:
                continue
            for k in range(j + 1, n):
                if k == i:
                    continue
                a, b = cm[i][j], cm[i][k]
                key = (a, b, cm[j][k]) if a <= b else (b, a, cm[j][k])
                cnt[key] = cnt.get(key, 0) + 1
        profs.append(tuple(sorted(cnt.items())))
    return profs


def are_isometric(a: FiniteMetricSpace, b: FiniteMetricSpace, cap: int = 14):
    """Distance-preserving bijection search.

    Returns the lexicographically least witness permutation p (point i of
    ``a`` maps to point p[i] of ``b``) or None.  Cheap complete invariants
    (edge multiset, row multisets, per-vertex triangle profiles) run
    first at any size; only an inconclusive pair above the cap raises.
    """
    n = a.n
    if b.n != n:
        return None
    if n == 1:
        return (0,)
    if edge_multiset(a) != edge_multiset(b):
        return None

    # recode b with a's value table; a value missing on either side kills it
    a_vals = {v: c for c, v in enumerate(a.code_values)}
    if set(a_vals) != set(b.code_values):
        return None
    trans = [a_vals[v] for v in b.code_values]
    acm = a.code_matrix
    bcm = tuple(tuple(trans[c] for c in row) for row in b.code_matrix)

    def row_key(cm, i):
        counts: dict = {}
        for j in range(n):
            if j != i:
                counts[cm[i][j]] = counts.get(cm[i][j], 0) + 1
        return tuple(sorted(counts.items()))

    a_rows = [row_key(acm, i) for i in range(n)]
    b_rows = [row_key(bcm, i) for i in range(n)]
    if sorted(a_rows) != sorted(b_rows):
        return None

    a_profs = _triangle_profiles(acm, n)
    b_profs = _triangle_profiles(bcm, n)
    if sorted(a_profs) != sorted(b_profs):
        return None

    if n > cap:
        raise TooLarge(
            f"isometry undecided by invariants and search capped at {cap} points (got {n})"
        )

    a_keys = [(a_rows[i], a_profs[i]) for i in range(n)]
    b_keys = [(b_rows[i], b_profs[i]) for i in range(n)]
    assigned = [-1] * n
    used = [False] * n

    def extend(i: int):
        if i == n:
            return True
        for v in range(n):
            if used[v] or a_keys[i] != b_keys[v]:
                continue
            if all(acm[i][j] == bcm[v][assigned[j]] for j in range(i)):
                assigned[i] = v
                used[v] = True
                if extend(i + 1):
                    return True
                used[v] = False
                assigned[i] = -1
        return False

    if extend(0):
        return tuple(assigned)
    return None
