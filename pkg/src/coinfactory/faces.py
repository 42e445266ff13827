"""Open faces of the hypercube and polynomial-lower-bound checkers.

The cube [0,1]^n splits into 3^n disjoint open faces, one per partition of
the coordinates into (A: pinned at 0, S: strictly interior, B: pinned at 1).
A function dominates a power of the face polynomial on every face where it is
not identically zero; the checkers here test that hypothesis on a rational
grid. Grid verdicts are evidence, not proof.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Optional

from .errors import UsageError
from .rationals import ONE, ZERO, format_rational


@dataclass(frozen=True)
class FacePartition:
    """One open face: coordinates in A are 0, in S interior, in B are 1."""

    n: int
    A: frozenset
    S: frozenset
    B: frozenset

    def __post_init__(self):
        all_idx = frozenset(range(1, self.n + 1))
        if self.A | self.S | self.B != all_idx or (
            self.A & self.S or self.A & self.B or self.S & self.B
        ):
            raise UsageError("A, S, B must partition 1..n")

    def label(self) -> str:
        def fmt(s):
            return "{" + ",".join(map(str, sorted(s))) + "}"

        return f"A={fmt(self.A)} S={fmt(self.S)} B={fmt(self.B)}"


@dataclass(frozen=True)
class BoundCertificate:
    """Claimed constants: f >= c * (face polynomial)^m on each non-vanishing face."""

    c: Fraction
    m: int

    def __post_init__(self):
        if self.c <= 0 or self.m < 0:
            raise UsageError("certificate needs c > 0 and m >= 0")


def enum_faces(n: int) -> list[FacePartition]:
    """All 3^n faces, in base-3 digit order (digit 0 -> A, 1 -> S, 2 -> B)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    faces = []
    for digits in product((0, 1, 2), repeat=n):
        A = frozenset(i + 1 for i, d in enumerate(digits) if d == 0)
        S = frozenset(i + 1 for i, d in enumerate(digits) if d == 1)
        B = frozenset(i + 1 for i, d in enumerate(digits) if d == 2)
        faces.append(FacePartition(n, A, S, B))
    return faces


def face_of(p) -> FacePartition:
    """The unique open face containing p."""
    n = len(p)
    A, S, B = set(), set(), set()
    for i, x in enumerate(p, start=1):
        if not 0 <= x <= 1:
            raise UsageError("point outside the hypercube")
        (A if x == 0 else B if x == 1 else S).add(i)
    return FacePartition(n, frozenset(A), frozenset(S), frozenset(B))


def face_poly(face: FacePartition, p) -> Fraction:
    """(1-p)^A * p^S (1-p)^S * p^B, before raising to the certificate power."""
    v = ONE
    for i in face.A:
        v *= 1 - p[i - 1]
    for i in face.S:
        v *= p[i - 1] * (1 - p[i - 1])
    for i in face.B:
        v *= p[i - 1]
    return v


def face_closure(face: FacePartition) -> list[FacePartition]:
    """All faces with A' containing A and B' containing B (topological closure)."""
    out = []
    free = sorted(face.S)
    for digits in product((0, 1, 2), repeat=len(free)):
        A = set(face.A)
        S = set()
        B = set(face.B)
        for idx, d in zip(free, digits):
            (A if d == 0 else S if d == 1 else B).add(idx)
        out.append(FacePartition(face.n, frozenset(A), frozenset(S), frozenset(B)))
    return out


def grid_points(n: int, mesh_den: int):
    """All points of the 1/d lattice over [0,1]^n."""
    if mesh_den < 2:
        raise UsageError("mesh denominator must be >= 2")
    vals = [Fraction(i, mesh_den) for i in range(mesh_den + 1)]
    return product(vals, repeat=n)


def _on_face(face: FacePartition, p) -> bool:
    for i in face.A:
        if p[i - 1] != 0:
            return False
    for i in face.B:
        if p[i - 1] != 1:
            return False
    for i in face.S:
        if not 0 < p[i - 1] < 1:
            return False
    return True


@dataclass
class FaceReport:
    face: FacePartition
    hypothesis: str  # "grid-zero", "exactly-zero", "positive", "no-grid-points"
    passed: bool
    worst_point: Optional[tuple]
    worst_margin: Optional[Fraction]

    def to_json(self):
        return {
            "face": self.face.label(),
            "hypothesis": self.hypothesis,
            "pass": self.passed,
            "worst_point": None
            if self.worst_point is None
            else [format_rational(x) for x in self.worst_point],
            "worst_margin": None
            if self.worst_margin is None
            else format_rational(self.worst_margin),
        }


def check_poly_bounded(
    f: Callable[[tuple], Fraction],
    n: int,
    cert: BoundCertificate,
    mesh_den: int,
    domain=None,
    exactly_zero: Optional[Callable[[FacePartition], bool]] = None,
) -> list[FaceReport]:
    """Per-face grid check of f(p) >= c * face_poly(face, p)^m.

    A face participates only if f is not (grid-)zero on its sample points;
    `exactly_zero` lets callers with structural knowledge (finite trees)
    upgrade the zero verdict from heuristic to exact. With a domain, both the
    face sampling and the inequality are restricted to grid points satisfying
    the domain equations exactly.
    """
    pts = [p for p in grid_points(n, mesh_den) if domain is None or domain.contains(p)]
    values = {p: f(p) for p in pts}
    reports = []
    for face in enum_faces(n):
        on_face = [p for p in pts if _on_face(face, p)]
        if not on_face:
            reports.append(FaceReport(face, "no-grid-points", True, None, None))
            continue
        if exactly_zero is not None and exactly_zero(face):
            reports.append(FaceReport(face, "exactly-zero", True, None, None))
            continue
        if all(values[p] == 0 for p in on_face):
            reports.append(FaceReport(face, "grid-zero", True, None, None))
            continue
        worst_margin = None
        worst_point = None
        ok = True
        for p in pts:
            margin = values[p] - cert.c * face_poly(face, p) ** cert.m
            if worst_margin is None or margin < worst_margin:
                worst_margin, worst_point = margin, p
            if margin < 0:
                ok = False
        reports.append(FaceReport(face, "positive", ok, worst_point, worst_margin))
    return reports


@dataclass
class ScalarBoundReport:
    passed: bool
    constant: bool
    worst_point: Optional[Fraction]
    worst_margin: Optional[Fraction]


def check_1d(f: Callable[[tuple], Fraction], m: int, mesh_den: int) -> ScalarBoundReport:
    """Grid check of min(p,1-p)^m <= f(p) <= 1 - min(p,1-p)^m on [0,1].

    The constant functions 0 and 1 pass as the classical exceptions.
    """
    pts = [(Fraction(i, mesh_den),) for i in range(mesh_den + 1)]
    vals = [f(p) for p in pts]
    if all(v == vals[0] for v in vals) and vals[0] in (ZERO, ONE):
        return ScalarBoundReport(True, True, None, None)
    worst_margin = None
    worst_point = None
    ok = True
    for (p,), v in zip(pts, vals):
        lo = min(p, 1 - p) ** m
        margin = min(v - lo, (1 - lo) - v)
        if worst_margin is None or margin < worst_margin:
            worst_margin, worst_point = margin, p
        if margin < 0:
            ok = False
    return ScalarBoundReport(ok, False, worst_point, worst_margin)
