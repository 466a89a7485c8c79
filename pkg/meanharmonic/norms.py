from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import factorial
import hashlib
import json
import logging
import math

import numpy as np
import sympy
from scipy.spatial import ConvexHull, QhullError

from .errors import DimensionMismatch, InvalidNorm
from .polycore import MultiIndex, Polynomial, Rational, as_rational, format_rational

log = logging.getLogger(__name__)

INF = math.inf
MAX_LP_DIMENSION = 8
MAX_POLYTOPE_DIMENSION = 4

Point = Sequence[Rational | float]


def _det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    d = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]).det()
    return Fraction(int(d.p), int(d.q))


def _solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows])
    if m.det() == 0:
        return None
    sol = m.LUsolve(sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in rhs]))
    return [Fraction(int(s.p), int(s.q)) for s in sol]


class Simplex:
    """
    An n-simplex with exact rational vertices, used to split polytopes into pieces that can be integrated exactly.

    :param vertices: n+1 points in ℚⁿ
    """

    def __init__(self, vertices: Sequence[Point]):
        self._vertices: tuple[tuple[Fraction, ...], ...] = tuple(tuple(as_rational(x) for x in v) for v in vertices)
        self._n: int = len(self._vertices) - 1
        assert self._n >= 1
        for v in self._vertices:
            if len(v) != self._n:
                raise DimensionMismatch("a simplex in dimension {} needs {} vertices".format(len(v), len(v) + 1))
        origin = self._vertices[0]
        # columns are the edge vectors v_k - v_0
        self._edges: list[list[Fraction]] = [
            [self._vertices[k + 1][i] - origin[i] for k in range(self._n)] for i in range(self._n)
        ]
        self._det: Fraction = _det(self._edges)
        if self._det == 0:
            raise InvalidNorm("degenerate simplex {}".format(self))

    @property
    def n(self) -> int:
        return self._n

    @property
    def vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._vertices

    @property
    def volume(self) -> Fraction:
        return abs(self._det) / factorial(self._n)

    def integrate(self, f: Polynomial) -> Fraction:
        """
        Exact integral of a polynomial over the simplex: the affine map from the standard simplex turns every
        monomial into one whose integral is the Dirichlet value β!/(|β|+n)!.
        """
        if f.n != self._n:
            raise DimensionMismatch("polynomial of dimension {} on a {}-simplex".format(f.n, self._n))
        pulled = f.compose_affine(self._edges, self._vertices[0])
        total = Fraction(0)
        for beta, c in pulled.terms.items():
            beta = MultiIndex(beta)
            total += c * Fraction(beta.factorial, factorial(beta.order + self._n))
        return total * abs(self._det)

    def __str__(self):
        return "[" + ", ".join("(" + ", ".join(format_rational(x) for x in v) + ")" for v in self._vertices) + "]"

    def __repr__(self):
        return "Simplex({})".format(str(self))


class NormSpec:
    """
    The unit ball of a norm on ℝⁿ. Use :meth:`lp`, :meth:`polytope` or :meth:`parse` to create one.
    The norm itself is the Minkowski functional (gauge) of the ball.
    """

    def __init__(self, kind: str, n: int, **kwargs):
        assert kind in _KINDS, "unknown norm kind {}".format(kind)
        assert isinstance(n, int)
        if n < 1:
            raise InvalidNorm("dimension must be positive, got {}".format(n))
        self._kind: str = kind
        self._n: int = n
        self._p: Fraction | float | None = kwargs.get("p")
        self._scales: tuple[Fraction, ...] | None = kwargs.get("scales")
        self._vertices: tuple[tuple[Fraction, ...], ...] | None = kwargs.get("vertices")
        self._facets: list[tuple[Fraction, ...]] = []
        self._simplices: list[Simplex] = []

    # constructors

    @classmethod
    def lp(cls, p: Rational | float | str, n: int, scales: Sequence[Rational | str] | None = None) -> NormSpec:
        """
        The (optionally axis-scaled) ℓᵖ ball {x : Σ |xᵢ/aᵢ|ᵖ < 1}.

        :param p: exponent in [1, ∞]; ``"inf"`` or ``math.inf`` for the maximum norm
        :param n: dimension
        :param scales: semi-axes a₁, …, aₙ > 0 (default all 1)
        :raises InvalidNorm: if p < 1, a scale is not positive or n is too large
        """
        if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "∞"):
            p = INF
        if p != INF:
            try:
                p = as_rational(p)
            except (TypeError, ValueError):
                raise InvalidNorm("invalid exponent {!r}".format(p))
            if p < 1:
                raise InvalidNorm("ℓᵖ needs p ≥ 1, got {}".format(p))
        if n > MAX_LP_DIMENSION:
            raise InvalidNorm("ℓᵖ balls are supported up to dimension {}".format(MAX_LP_DIMENSION))
        if scales is None:
            scales = [1] * n
        scales = tuple(as_rational(a) for a in scales)
        if len(scales) != n:
            raise InvalidNorm("{} scales given for dimension {}".format(len(scales), n))
        if any(a <= 0 for a in scales):
            raise InvalidNorm("scales must be positive, got {}".format([format_rational(a) for a in scales]))
        return cls("lp", n, p=p, scales=scales)

    @classmethod
    def polytope(cls, vertices: Sequence[Point]) -> NormSpec:
        """
        The convex hull of an origin-symmetric vertex set.

        :raises InvalidNorm: if the set is not symmetric, the hull is not full dimensional or the origin is not interior
        """
        verts = tuple(tuple(as_rational(x) for x in v) for v in vertices)
        if not verts:
            raise InvalidNorm("a polytope needs vertices")
        n = len(verts[0])
        if any(len(v) != n for v in verts):
            raise InvalidNorm("vertices of mixed dimension")
        if n > MAX_POLYTOPE_DIMENSION:
            raise InvalidNorm("polytopes are supported up to dimension {}".format(MAX_POLYTOPE_DIMENSION))
        vertex_set = set(verts)
        for v in verts:
            if tuple(-x for x in v) not in vertex_set:
                raise InvalidNorm("vertex set is not symmetric about the origin: -{} missing".format(_fmt(v)))
        spec = cls("polytope", n, vertices=tuple(sorted(vertex_set)))
        spec._build_facets()
        return spec

    @classmethod
    def cross_polytope(cls, n: int) -> NormSpec:
        verts = []
        for i in range(n):
            for s in (1, -1):
                verts.append([s if k == i else 0 for k in range(n)])
        return cls.polytope(verts)

    @classmethod
    def cube(cls, n: int) -> NormSpec:
        verts = [[1 if (mask >> i) & 1 else -1 for i in range(n)] for mask in range(2**n)]
        return cls.polytope(verts)

    @classmethod
    def hexagon(cls) -> NormSpec:
        """
        an affine image of the regular hexagon with rational vertices
        """
        return cls.polytope([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)])

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> NormSpec:
        """
        Read ``lp:<p>``, ``lp:<p>@a1,…,an`` or ``polytope:<file.json>``.
        The polytope file has the form ``{"n": 2, "vertices": [["1", "0"], …]}``.

        :param n: dimension, required for ℓᵖ balls
        """
        assert isinstance(text, str)
        elements = text.split(":", 1)
        if len(elements) != 2 or elements[0] not in _KINDS:
            raise InvalidNorm('invalid norm string {!r} (not in format "lp:<p>" or "polytope:<file>")'.format(text))
        return _KINDS[elements[0]](elements[1], n)

    @classmethod
    def from_dict(cls, data: dict) -> NormSpec:
        if data["kind"] == "lp":
            return cls.lp(data["p"], data["n"], data.get("scales"))
        if data["kind"] == "polytope":
            spec = cls.polytope(data["vertices"])
            if "n" in data and data["n"] != spec.n:
                raise InvalidNorm("declared dimension {} but vertices have dimension {}".format(data["n"], spec.n))
            return spec
        raise InvalidNorm("unknown norm kind {!r}".format(data["kind"]))

    def to_dict(self) -> dict:
        if self._kind == "lp":
            ret = {"kind": "lp", "n": self._n, "p": "inf" if self._p == INF else format_rational(self._p)}
            if not self.is_unscaled:
                ret["scales"] = [format_rational(a) for a in self._scales]
            return ret
        return {
            "kind": "polytope",
            "n": self._n,
            "vertices": [[format_rational(x) for x in v] for v in self._vertices],
        }

    @property
    def key(self) -> str:
        """
        a short canonical string identifying the ball, used as cache key
        """
        if self._kind == "lp":
            ret = "lp:{}:n{}".format("inf" if self._p == INF else format_rational(self._p).replace("/", "_"), self._n)
            if not self.is_unscaled:
                ret += ":" + hashlib.sha1(json.dumps(self.to_dict()["scales"]).encode()).hexdigest()[:12]
            return ret
        digest = hashlib.sha1(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:12]
        return "polytope:n{}:{}".format(self._n, digest)

    def __str__(self):
        if self._kind == "lp":
            ret = "lp:{}".format("inf" if self._p == INF else format_rational(self._p))
            if not self.is_unscaled:
                ret += "@" + ",".join(format_rational(a) for a in self._scales)
            return ret
        return "polytope({} vertices in dimension {})".format(len(self._vertices), self._n)

    def __repr__(self):
        return "NormSpec({})".format(str(self))

    def __eq__(self, other):
        if not isinstance(other, NormSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.key)

    # properties

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def n(self) -> int:
        return self._n

    @property
    def p(self) -> Fraction | float:
        assert self._kind == "lp"
        return self._p

    @property
    def scales(self) -> tuple[Fraction, ...]:
        assert self._kind == "lp"
        return self._scales

    @property
    def is_unscaled(self) -> bool:
        return self._kind == "lp" and all(a == 1 for a in self._scales)

    @property
    def vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        assert self._kind == "polytope"
        return self._vertices

    @property
    def facets(self) -> list[tuple[Fraction, ...]]:
        """
        outer facet normals a with the ball equal to {x : ⟨a, x⟩ < 1 for all a}
        """
        assert self._kind == "polytope"
        return list(self._facets)

    @property
    def half_widths(self) -> tuple[Fraction, ...]:
        """
        the unit ball lies in the box ∏ [-hᵢ, hᵢ]
        """
        if self._kind == "lp":
            return self._scales
        return tuple(max(abs(v[i]) for v in self._vertices) for i in range(self._n))

    def is_axis_symmetric(self) -> bool:
        """
        True if the ball is invariant under every reflection xᵢ ↦ -xᵢ, so that moments with an odd component vanish
        """
        if self._kind == "lp":
            return True
        vertex_set = set(self._vertices)
        for i in range(self._n):
            for v in self._vertices:
                if tuple(-x if k == i else x for k, x in enumerate(v)) not in vertex_set:
                    return False
        return True

    def isometry_count(self) -> int | None:
        """
        number of linear isometries 2ⁿ·n! of unscaled ℓᵖ for p ≠ 2; None where it is not known here
        """
        if self._kind == "lp" and self.is_unscaled and self._p != 2:
            return 2**self._n * factorial(self._n)
        return None

    # polytope construction

    def _build_facets(self):
        n = self._n
        if n == 1:
            (a,) = max(self._vertices)
            if a == 0:
                raise InvalidNorm("degenerate interval")
            self._facets = [(1 / a,), (-1 / a,)]
            self._simplices = [Simplex([(0,), (a,)]), Simplex([(0,), (-a,)])]
            return

        points = np.array([[float(x) for x in v] for v in self._vertices])
        try:
            hull = ConvexHull(points)
        except (QhullError, ValueError) as e:
            raise InvalidNorm("polytope hull is not full dimensional: {}".format(e))

        facets = []
        simplices = []
        for face in hull.simplices:
            corners = [self._vertices[i] for i in face]
            normal = _solve(corners, [Fraction(1)] * n)
            if normal is None:
                raise InvalidNorm("origin lies on the boundary facet through {}".format(", ".join(_fmt(c) for c in corners)))
            normal = tuple(normal)
            if normal not in facets:
                facets.append(normal)
            simplices.append(Simplex([(0,) * n] + corners))

        for v in self._vertices:
            worst = max(sum(a * x for a, x in zip(f, v)) for f in facets)
            if worst > 1:
                raise InvalidNorm("vertex {} lies outside the computed hull; input is not convex in exact arithmetic".format(_fmt(v)))

        self._facets = facets
        self._simplices = simplices
        log.debug("polytope with %d vertices: %d facets, %d simplices", len(self._vertices), len(facets), len(simplices))

    # services

    def gauge(self, point: Point):
        """
        The Minkowski functional of the unit ball at point. Exact for rational points on polytopes and on ℓ¹, ℓ^∞;
        float otherwise.
        """
        if len(point) != self._n:
            raise DimensionMismatch("point of dimension {} for a norm on dimension {}".format(len(point), self._n))
        exact = not any(isinstance(x, float) for x in point)
        if exact:
            point = [as_rational(x) for x in point]
        if self._kind == "polytope":
            if not exact:
                return max(sum(float(a) * x for a, x in zip(f, point)) for f in self._facets)
            return max(sum(a * x for a, x in zip(f, point)) for f in self._facets)

        coords = [abs(x) / (a if exact else float(a)) for x, a in zip(point, self._scales)]
        if self._p == INF:
            return max(coords)
        if self._p == 1:
            return sum(coords)
        p = float(self._p)
        return float(sum(float(c) ** p for c in coords) ** (1 / p))

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        """
        vectorized float gauge over the rows of an (N, n) array
        """
        if points.shape[1] != self._n:
            raise DimensionMismatch("points of dimension {} for a norm on dimension {}".format(points.shape[1], self._n))
        if self._kind == "polytope":
            normals = np.array([[float(a) for a in f] for f in self._facets])
            return (points @ normals.T).max(axis=1)
        scaled = np.abs(points) / np.array([float(a) for a in self._scales])
        if self._p == INF:
            return scaled.max(axis=1)
        return np.linalg.norm(scaled, ord=float(self._p), axis=1)

    def contains(self, center: Point, r: Rational | float, point: Point) -> bool:
        """
        :return: True iff the point lies in the open ball B(center, r)
        """
        if len(center) != self._n or len(point) != self._n:
            raise DimensionMismatch("center, point and norm dimension differ")
        if not r > 0:
            raise ValueError("radius must be positive, got {}".format(r))
        values = list(center) + list(point) + [r]
        if any(isinstance(x, float) for x in values):
            diff = [float(x) - float(c) for x, c in zip(point, center)]
            return self.gauge(diff) < float(r)
        diff = [as_rational(x) - as_rational(c) for x, c in zip(point, center)]
        r = as_rational(r)
        if self._kind == "lp" and self._p != INF and self._p.denominator == 1:
            # integer exponent: compare p-th powers exactly
            k = self._p.numerator
            return sum((abs(d) / a) ** k for d, a in zip(diff, self._scales)) < r**k
        return self.gauge(diff) < r

    def triangulate(self) -> list[Simplex]:
        """
        Fan triangulation from the origin over the (triangulated) facets. The simplices have disjoint interiors
        and their union is the polytope.
        """
        assert self._kind == "polytope", "only polytopes can be triangulated"
        return list(self._simplices)

    @property
    def volume_exact(self) -> Fraction:
        assert self._kind == "polytope"
        return sum((s.volume for s in self._simplices), Fraction(0))


def _fmt(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(format_rational(x) for x in v) + ")"


def _parse_lp(body: str, n: int | None) -> NormSpec:
    if n is None:
        raise InvalidNorm("dimension is needed for ℓᵖ balls")
    if "@" in body:
        p, scales = body.split("@", 1)
        try:
            return NormSpec.lp(p, n, [s for s in scales.split(",")])
        except ValueError as e:
            raise InvalidNorm("invalid scales {!r}: {}".format(scales, e))
    return NormSpec.lp(body, n)


def _parse_polytope(body: str, n: int | None) -> NormSpec:
    try:
        with open(body, "r") as in_file:
            data = json.load(in_file)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidNorm("cannot read polytope file {!r}: {}".format(body, e))
    data["kind"] = "polytope"
    spec = NormSpec.from_dict(data)
    if n is not None and n != spec.n:
        raise InvalidNorm("polytope has dimension {} but {} was requested".format(spec.n, n))
    return spec


_KINDS = {
    "lp": _parse_lp,
    "polytope": _parse_polytope,
}


def gauge(spec: NormSpec, point: Point):
    return spec.gauge(point)


def contains(spec: NormSpec, center: Point, r: Rational | float, point: Point) -> bool:
    return spec.contains(center, r, point)


def triangulate(spec: NormSpec) -> list[Simplex]:
    return spec.triangulate()
