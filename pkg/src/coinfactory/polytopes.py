"""Polytopes P = [0,1]^n ∩ affine subspace: vertex enumeration, facets, fan
triangulations, barycentric point location, the averaged vertex-coefficient
decomposition, and the vertex sampler built from it.

The decomposition maps each p in P to coefficients f_v(p) >= 0 with
sum_v f_v(p) = 1 and sum_v f_v(p) v = p, so sampling vertex v with
probability f_v(p) returns a random vertex with expectation exactly p.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Optional, Sequence

from .combinators import bernoulli_race
from .domains import AffineCubeDomain
from .errors import ResourceLimitError, UsageError
from .lattice import FactoryRecursion, LevelSchedule, TargetFunction
from .rationals import ONE, ZERO, parse_point
from .simplex import OPTIMAL, solve_lp

VERTEX_ENUM_CAP = 12


def solve_unique(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[tuple]:
    """Exact Gaussian elimination; the unique solution of Ax=b, else None
    (None covers both inconsistent and underdetermined systems)."""
    rows = [list(row) + [rv] for row, rv in zip(A, b)]
    m = len(rows)
    ncol = len(rows[0]) - 1 if m else 0
    pivots = []
    r = 0
    for c in range(ncol):
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][-1] != 0:
            return None  # inconsistent
    if len(pivots) < ncol:
        return None  # underdetermined
    x = [ZERO] * ncol
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return tuple(x)


def affine_dim(points: Sequence[tuple]) -> int:
    """Dimension of the affine hull (rank over exact rationals); -1 if empty."""
    if not points:
        return -1
    base = points[0]
    rows = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    rank = 0
    ncol = len(base)
    r = 0
    for c in range(ncol):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        r += 1
        rank += 1
    return rank


def enum_vertices(domain: AffineCubeDomain, cap: int = VERTEX_ENUM_CAP) -> list:
    """All extreme points of [0,1]^n ∩ {Mx=b}, deterministic (sorted) order.

    Every vertex has a tight coordinate set that, together with the affine
    rows, pins it down uniquely; enumerating all 3^n free/0/1 assignments and
    keeping feasible unique solutions therefore finds exactly the vertices.
    """
    n = domain.n
    if n > cap:
        raise ResourceLimitError(f"vertex enumeration capped at n <= {cap}")
    seen = set()
    for assign in iter_product((None, ZERO, ONE), repeat=n):
        free = [i for i, a in enumerate(assign) if a is None]
        A = [[row[i] for i in free] for row in domain.M]
        b = [
            bv - sum(row[i] * assign[i] for i in range(n) if assign[i] is not None)
            for row, bv in zip(domain.M, domain.b)
        ]
        if free:
            if not A:
                continue  # no equations pin the free coordinates
            sol = solve_unique(A, b)
            if sol is None or len(sol) != len(free):
                continue
        else:
            if any(bv != 0 for bv in b):
                continue
            sol = ()
        x = list(assign)
        for i, v in zip(free, sol):
            x[i] = v
        if all(0 <= v <= 1 for v in x):
            seen.add(tuple(x))
    return sorted(seen)


class PolytopeP:
    """Vertex-level view of a cube-affine polytope, with cached geometry."""

    def __init__(self, domain: AffineCubeDomain, cap: int = VERTEX_ENUM_CAP):
        self.domain = domain
        self.n = domain.n
        self.vertices = tuple(enum_vertices(domain, cap))
        if not self.vertices:
            raise UsageError("domain has no vertices (should be unreachable: K non-empty)")
        self.dim = affine_dim(self.vertices)
        self._facets: Optional[list] = None
        self._fans: dict = {}
        self._mixture_cache: dict = {}

    def contains(self, p) -> bool:
        return self.domain.contains(p)

    def facets(self) -> list:
        """Irredundant facets, each as (coordinate, bound, vertex tuple)."""
        if self._facets is not None:
            return self._facets
        out = []
        seen = set()
        for i in range(self.n):
            for s in (ZERO, ONE):
                members = tuple(v for v in self.vertices if v[i] == s)
                if not members or len(members) == len(self.vertices):
                    continue
                if affine_dim(members) != self.dim - 1:
                    continue
                if members in seen:
                    continue
                seen.add(members)
                out.append((i + 1, s, members))
        self._facets = out
        return out

    # -- triangulation ---------------------------------------------------------

    def _subfaces(self, vset: tuple, d: int) -> list:
        """Facets of the face conv(vset) (dimension d), via coordinate cuts."""
        out = []
        seen = set()
        for i in range(self.n):
            for s in (ZERO, ONE):
                members = tuple(v for v in vset if v[i] == s)
                if not members or len(members) == len(vset):
                    continue
                if affine_dim(members) != d - 1 or members in seen:
                    continue
                seen.add(members)
                out.append(members)
        return out

    def _triangulate_face(self, vset: tuple, d: int) -> list:
        """Recursive fan rule: cone the smallest vertex over sub-facets missing it."""
        if len(vset) == d + 1:
            return [tuple(sorted(vset))]
        apex = min(vset)
        simplices = []
        for sub in self._subfaces(vset, d):
            if apex in sub:
                continue
            for s in self._triangulate_face(sub, d - 1):
                simplices.append(tuple(sorted(s + (apex,))))
        return simplices

    def fan_triangulation(self, w: tuple) -> list:
        """Simplices (sorted vertex tuples) coning w over facets that miss w."""
        w = tuple(parse_point(w))
        if w not in self.vertices:
            raise UsageError("apex must be a vertex of the polytope")
        if w in self._fans:
            return self._fans[w]
        if self.dim == 0:
            fans = [(w,)]
        else:
            fans = []
            for _, _, members in self.facets():
                if w in members:
                    continue
                for s in self._triangulate_face(members, self.dim - 1):
                    fans.append(tuple(sorted(s + (w,))))
            fans.sort()
        self._fans[w] = fans
        return fans

    # -- barycentric decomposition ----------------------------------------------

    def locate_and_decompose(self, fan: list, p) -> dict:
        """Coefficients of p in the first (lex-smallest) containing simplex."""
        p = parse_point(p)
        if not self.contains(p):
            raise UsageError("point is not in the polytope")
        for simplex in fan:
            m = len(simplex)
            A = [[v[i] for v in simplex] for i in range(self.n)] + [[ONE] * m]
            b = list(p) + [ONE]
            lam = solve_unique(A, b)
            if lam is not None and all(c >= 0 for c in lam):
                out = {v: ZERO for v in self.vertices}
                for v, c in zip(simplex, lam):
                    out[v] = c
                return out
        raise UsageError("no simplex of the fan contains the point (triangulation bug)")

    def mixture(self, p) -> dict:
        """f_v(p): fan decompositions averaged over every apex; exact."""
        p = tuple(parse_point(p))
        if p in self._mixture_cache:
            return self._mixture_cache[p]
        if not self.contains(p):
            raise UsageError("point is not in the polytope")
        nv = len(self.vertices)
        acc = {v: ZERO for v in self.vertices}
        for w in self.vertices:
            coeffs = self.locate_and_decompose(self.fan_triangulation(w), p)
            for v, c in coeffs.items():
                acc[v] += c
        out = {v: c / nv for v, c in acc.items()}
        self._mixture_cache[p] = out
        return out

    def is_extreme(self, v: tuple) -> bool:
        """LP check that v is not a convex combination of the other vertices."""
        others = [u for u in self.vertices if u != v]
        if not others:
            return True
        m = len(others)
        A_eq = [[u[i] for u in others] for i in range(self.n)] + [[ONE] * m]
        b_eq = list(v) + [ONE]
        res = solve_lp([ZERO] * m, A_eq=A_eq, b_eq=b_eq)
        return res.status != OPTIMAL


@dataclass
class SeparationReport:
    holds: bool
    counterexamples: list  # (vertex, facet vertex tuple) with no witness coordinate


def facet_separation_check(vertices: Sequence[tuple], facets: Sequence[tuple]) -> SeparationReport:
    """For every (vertex v, facet F missing v), looks for a coordinate i with
    either v_i > 0 and F ⊆ {x_i = 0}, or v_i < 1 and F ⊆ {x_i = 1}.

    Such a witness exists for every cube-affine polytope; it fails for shapes
    outside that family (e.g. the triangle with vertices (0,0),(1,0),(0,1)
    against its diagonal edge), which is exactly what the check surfaces.
    """
    bad = []
    for v in vertices:
        for F in facets:
            if v in F:
                continue
            n = len(v)
            found = False
            for i in range(n):
                if v[i] > 0 and all(x[i] == 0 for x in F):
                    found = True
                    break
                if v[i] < 1 and all(x[i] == 1 for x in F):
                    found = True
                    break
            if not found:
                bad.append((v, F))
    return SeparationReport(not bad, bad)


def polytope_separation_check(P: PolytopeP) -> SeparationReport:
    return facet_separation_check(P.vertices, [m for _, _, m in P.facets()])


def free_triangle() -> tuple:
    """The planted counterexample: conv{(0,0),(1,0),(0,1)} with its edges.

    Not of the cube-affine form; the diagonal edge has no separating
    coordinate against the vertex (0,0)."""
    a, b, c = (ZERO, ZERO), (ONE, ZERO), (ZERO, ONE)
    vertices = (a, b, c)
    facets = ((a, b), (a, c), (b, c))
    return vertices, facets


class CombinatorialFactory:
    """Vertex sampler for a cube-affine polytope: one subdomain factory per
    vertex coefficient, raced; P[v] = f_v(p) and E[v] = p."""

    def __init__(self, P: PolytopeP, schedule: LevelSchedule, eps, work_limit: int = 2**24):
        self.P = P
        self.vertices = P.vertices
        if P.dim == 0:
            self._race = None
            return
        self.engines = []
        programs = []
        for v in self.vertices:
            target = TargetFunction(
                P.n, lambda p, v=v: P.mixture(p)[v], f"vertex{tuple(map(str, v))}"
            )
            engine = FactoryRecursion(
                target, schedule, domain=P.domain, eps=eps, work_limit=work_limit
            )
            self.engines.append(engine)
            programs.append(engine.factory_program())
        self._race = bernoulli_race(programs)

    def sample(self, coins) -> tuple:
        if self._race is None:
            return self.vertices[0]
        return self.vertices[self._race.sample(coins)]
