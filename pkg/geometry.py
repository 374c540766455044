"""
Exact geometry module for the newton-osc toolkit
Handles unbounded lattice polyhedra P = conv(generators) + R_+^n, their facets,
face lattices and exact rational feasibility questions
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import config
from errors import ArgumentOutOfRange, EmptyInput, InputFormatError, PointNotOnBoundary, PointOutsidePolyhedron, UnsupportedDimension
from utils import check_size, dot, primitive, rank, rat_str, vector_str

logger = logging.getLogger('newton_osc.geometry')

Point = Tuple[Fraction, ...]
# (coefficients, right hand side, kind) meaning <c, x> kind rhs with kind in {'>=', '>', '='}
Constraint = Tuple[Tuple[Fraction, ...], Fraction, str]


@dataclass(frozen=True)
class ValidPair:
    """A valid pair (a, l): P lies in the halfspace <a, x> >= l"""
    normal: Tuple[int, ...]
    offset: Fraction

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return dot(self.normal, point) - self.offset

    def to_dict(self) -> dict:
        return {"a": list(self.normal), "l": rat_str(self.offset)}


@dataclass(frozen=True)
class Face:
    """A nonempty face of a polyhedron, keyed by the facets containing it"""
    index: int
    active_facets: FrozenSet[int]
    vertices: FrozenSet[int]
    dim: int
    compact: bool
    zero_weight_set: FrozenSet[int]
    polyhedron: "NewtonPolyhedron" = field(compare=False, repr=False, hash=False)

    @property
    def vertex_points(self) -> List[Point]:
        return [self.polyhedron.vertices[i] for i in sorted(self.vertices)]

    def defining_pair(self) -> ValidPair:
        """Sum of the active facet pairs; it cuts exactly this face out of P"""
        n = self.polyhedron.n
        normal = [0] * n
        offset = Fraction(0)
        for i in self.active_facets:
            facet = self.polyhedron.facets[i]
            normal = [x + y for x, y in zip(normal, facet.normal)]
            offset += facet.offset
        return ValidPair(tuple(normal), offset)

    def contains(self, point: Sequence[Fraction]) -> bool:
        if not self.polyhedron.contains(point):
            return False
        return all(self.polyhedron.facets[i].value(point) == 0 for i in self.active_facets)

    def is_whole(self) -> bool:
        return not self.active_facets

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "dim": self.dim,
            "compact": self.compact,
            "vertices": [vector_str(v) for v in self.vertex_points],
            "zeroWeightSet": sorted(j + 1 for j in self.zero_weight_set),
            "activeFacets": sorted(self.active_facets),
        }


class NewtonPolyhedron:
    """Polyhedron with recession cone R_+^n in H- and V-representation plus its face lattice"""

    def __init__(self, n: int, generators: Sequence[Point], vertices: Sequence[Point],
                 facets: Sequence[ValidPair], face_specs: Sequence[Tuple[FrozenSet[int], FrozenSet[int], FrozenSet[int], int]]):
        self.n = n
        self.dim = n
        self.generators = tuple(generators)
        self.vertices = tuple(vertices)
        self.facets = tuple(facets)
        self._zero_sets = [frozenset(j for j in range(n) if f.normal[j] == 0) for f in self.facets]
        self._tight = [frozenset(k for k, v in enumerate(self.vertices) if f.value(v) == 0) for f in self.facets]
        faces = []
        for index, (active, verts, zeros, dim) in enumerate(face_specs):
            faces.append(Face(index, active, verts, dim, not zeros, zeros, self))
        self.faces = tuple(faces)
        self._by_key: Dict[FrozenSet[int], Face] = {face.active_facets: face for face in self.faces}

    # Membership and support

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(f.value(point) >= 0 for f in self.facets)

    def support_value(self, a: Sequence[int]) -> Fraction:
        """l(a) = min over P of <a, x> for a in R_+^n"""
        return min(dot(a, v) for v in self.vertices)

    @property
    def denominator(self) -> int:
        """Common denominator of the vertices (the cleared lattice scale)"""
        result = 1
        for v in self.vertices:
            for x in v:
                d = Fraction(x).denominator
                result = result * d // math.gcd(result, d)
        return result

    def cleared_facets(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Facet pairs against the cleared lattice, offsets integral"""
        scale = self.denominator
        return [(f.normal, int(f.offset * scale)) for f in self.facets]

    # Face lattice access

    @property
    def whole(self) -> Face:
        return self._by_key[frozenset()]

    def proper_faces(self) -> List[Face]:
        return [face for face in self.faces if face.active_facets]

    def compact_faces(self) -> List[Face]:
        return [face for face in self.faces if face.compact]

    def facet_faces(self) -> List[Face]:
        return [face for face in self.faces if face.dim == self.n - 1]

    def face_by_key(self, key: FrozenSet[int]) -> Face:
        return self._by_key[key]

    def closure_key(self, verts: Iterable[int], zeros: Iterable[int]) -> FrozenSet[int]:
        """Active facets of the face conv(verts) + cone(e_j : j in zeros)"""
        verts = frozenset(verts)
        zeros = frozenset(zeros)
        return frozenset(i for i in range(len(self.facets))
                         if verts <= self._tight[i] and zeros <= self._zero_sets[i])

    def face_cut_by(self, pairs: Iterable[Sequence[int]]) -> Face:
        """Face P ∩ H(a, l(a)) ∩ ... for supporting normals a in R_+^n"""
        verts = frozenset(range(len(self.vertices)))
        zeros = frozenset(range(self.n))
        for a in pairs:
            level = self.support_value(a)
            verts = verts & frozenset(k for k, v in enumerate(self.vertices) if dot(a, v) == level)
            zeros = zeros & frozenset(j for j in range(self.n) if a[j] == 0)
        return self._by_key[self.closure_key(verts, zeros)]

    def tight_facets(self, point: Sequence[Fraction]) -> FrozenSet[int]:
        return frozenset(i for i, f in enumerate(self.facets) if f.value(point) == 0)

    def signature(self) -> Tuple:
        return (self.n, tuple(sorted((f.normal, f.offset) for f in self.facets)))

    def __eq__(self, other) -> bool:
        return isinstance(other, NewtonPolyhedron) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        return f"NewtonPolyhedron(n={self.n}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": [vector_str(v) for v in self.vertices],
            "facets": [f.to_dict() for f in self.facets],
            "faceCount": len(self.faces),
        }


class GeometryManager:
    """Class to build polyhedra and answer exact feasibility questions"""

    @staticmethod
    def cone_rays(constraints: Sequence[Sequence[Fraction]], k: int) -> List[Tuple[int, ...]]:
        """
        Extreme rays of {x in R_+^k : <c, x> >= 0 for every c} by double description.

        Args:
            constraints: homogeneous inequality rows
            k: ambient dimension

        Returns:
            Primitive integer rays, sorted
        """
        rows: List[Tuple[Fraction, ...]] = [tuple(Fraction(int(i == j)) for i in range(k)) for j in range(k)]
        rays: List[Tuple[int, ...]] = [tuple(int(i == j) for i in range(k)) for j in range(k)]
        for c in constraints:
            c = tuple(Fraction(x) for x in c)
            values = [dot(c, r) for r in rays]
            if all(v >= 0 for v in values):
                rows.append(c)
                continue
            positive = [r for r, v in zip(rays, values) if v > 0]
            negative = [r for r, v in zip(rays, values) if v < 0]
            kept = [r for r, v in zip(rays, values) if v >= 0]
            pos_values = {r: v for r, v in zip(rays, values) if v > 0}
            neg_values = {r: v for r, v in zip(rays, values) if v < 0}
            for p in positive:
                for q in negative:
                    common = [row for row in rows if dot(row, p) == 0 and dot(row, q) == 0]
                    if rank(common) != k - 2:
                        continue
                    combined = [pos_values[p] * y - neg_values[q] * x for x, y in zip(p, q)]
                    kept.append(primitive(combined))
            rows.append(c)
            rays = sorted(set(kept))
        return rays

    @classmethod
    def build_polyhedron(cls, generators: Iterable[Sequence]) -> NewtonPolyhedron:
        """
        Build conv(generators) + R_+^n with irredundant facets and the full face lattice.

        Args:
            generators: rational points in Q_+^n

        Returns:
            NewtonPolyhedron
        """
        gens = sorted({tuple(Fraction(x) for x in g) for g in generators})
        if not gens:
            raise EmptyInput("Polyhedron needs at least one generator")
        n = len(gens[0])
        if n < 1 or n > config.MAX_DIMENSION:
            raise UnsupportedDimension(f"Dimension {n} outside supported range 1..{config.MAX_DIMENSION}")
        if any(len(g) != n for g in gens):
            raise InputFormatError("Generators of mixed dimension")
        if any(x < 0 for g in gens for x in g):
            raise InputFormatError("Generators must lie in the nonnegative orthant")
        if len(gens) > config.MAX_GENERATORS:
            logger.warning(f"{len(gens)} generators exceed the tuned limit of {config.MAX_GENERATORS}")

        # Valid pairs (a, l) in coordinates (a, l') with l' = <a, v0> - l
        v0 = gens[0]
        constraints = [tuple(x - y for x, y in zip(v, v0)) + (Fraction(1),) for v in gens[1:]]
        best: Dict[Tuple[int, ...], Fraction] = {}
        for ray in cls.cone_rays(constraints, n + 1):
            normal = primitive(ray[:n])
            if not any(normal):
                continue
            offset = min(dot(normal, v) for v in gens)
            if normal not in best or offset > best[normal]:
                best[normal] = offset
        facets = [ValidPair(a, check_size(best[a])) for a in sorted(best)]

        # Vertices are generators on n independent facet hyperplanes
        vertices = [v for v in gens
                    if rank([f.normal for f in facets if f.value(v) == 0]) == n]

        specs = cls._face_lattice(n, vertices, facets)
        polyhedron = NewtonPolyhedron(n, gens, vertices, facets, specs)
        logger.debug(f"Built {polyhedron} with {len(polyhedron.faces)} faces")
        return polyhedron

    @staticmethod
    def _face_lattice(n: int, vertices: Sequence[Point], facets: Sequence[ValidPair]):
        tight = [frozenset(k for k, v in enumerate(vertices) if f.value(v) == 0) for f in facets]
        zero_sets = [frozenset(j for j in range(n) if f.normal[j] == 0) for f in facets]

        def closure(verts, zeros):
            return frozenset(i for i in range(len(facets)) if verts <= tight[i] and zeros <= zero_sets[i])

        def dimension(verts, zeros):
            verts = sorted(verts)
            base = vertices[verts[0]]
            rows = [tuple(x - y for x, y in zip(vertices[k], base)) for k in verts[1:]]
            rows += [tuple(Fraction(int(i == j)) for i in range(n)) for j in zeros]
            return rank(rows)

        start_v = frozenset(range(len(vertices)))
        start_z = frozenset(range(n))
        found = {closure(start_v, start_z): (start_v, start_z)}
        queue = [closure(start_v, start_z)]
        while queue:
            key = queue.pop()
            verts, zeros = found[key]
            for i in range(len(facets)):
                if i in key:
                    continue
                new_v = verts & tight[i]
                if not new_v:
                    continue
                new_z = zeros & zero_sets[i]
                new_key = closure(new_v, new_z)
                if new_key not in found:
                    found[new_key] = (new_v, new_z)
                    queue.append(new_key)

        specs = [(key, verts, zeros, dimension(verts, zeros)) for key, (verts, zeros) in found.items()]
        specs.sort(key=lambda s: (s[3], sorted(s[0])))
        return specs

    @staticmethod
    def smallest_face(polyhedron: NewtonPolyhedron, point: Sequence) -> Face:
        """Face tau(alpha): intersection of all facets whose hyperplane contains alpha"""
        point = tuple(Fraction(x) for x in point)
        if not polyhedron.contains(point):
            raise PointOutsidePolyhedron(f"Point {vector_str(point)} is not in the polyhedron")
        active = polyhedron.tight_facets(point)
        if not active:
            raise PointNotOnBoundary(f"Point {vector_str(point)} is interior")
        verts = frozenset.intersection(*(polyhedron._tight[i] for i in active))
        zeros = frozenset.intersection(*(polyhedron._zero_sets[i] for i in active))
        return polyhedron.face_by_key(polyhedron.closure_key(verts, zeros))

    @staticmethod
    def scale_translate(polyhedron: NewtonPolyhedron, d, shift: Optional[Sequence] = None) -> NewtonPolyhedron:
        """
        Return d * (P + b) with facets (a, d(l + <a, b>)) and the same face lattice.

        Args:
            polyhedron: the polyhedron P
            d: positive rational scale
            shift: rational translation b (defaults to 0)
        """
        d = Fraction(d)
        if d <= 0:
            raise ArgumentOutOfRange(f"Scale must be positive, got {rat_str(d)}")
        n = polyhedron.n
        b = tuple(Fraction(x) for x in shift) if shift is not None else (Fraction(0),) * n

        def move(v):
            return tuple(check_size(d * (x + y)) for x, y in zip(v, b))

        facets = [ValidPair(f.normal, check_size(d * (f.offset + dot(f.normal, b)))) for f in polyhedron.facets]
        specs = [(face.active_facets, face.vertices, face.zero_weight_set, face.dim) for face in polyhedron.faces]
        return NewtonPolyhedron(n, [move(v) for v in polyhedron.generators],
                                [move(v) for v in polyhedron.vertices], facets, specs)

    @staticmethod
    def face_constraints(face: Face, relative_interior: bool) -> List[Constraint]:
        """Constraints describing a face (closed) or its relative interior"""
        constraints = []
        for i, f in enumerate(face.polyhedron.facets):
            normal = tuple(Fraction(x) for x in f.normal)
            if i in face.active_facets:
                constraints.append((normal, f.offset, '='))
            else:
                constraints.append((normal, f.offset, '>' if relative_interior else '>='))
        return constraints

    @classmethod
    def relint_intersects(cls, face: Face, other: Union[NewtonPolyhedron, Face, None]) -> bool:
        """True iff relint(face) meets other (a polyhedron or a closed face of one)"""
        if other is None:
            return False
        constraints = cls.face_constraints(face, relative_interior=True)
        if isinstance(other, Face):
            constraints += cls.face_constraints(other, relative_interior=False)
        else:
            constraints += [(tuple(Fraction(x) for x in f.normal), f.offset, '>=') for f in other.facets]
        return cls.fm_feasible(constraints, face.polyhedron.n)

    @staticmethod
    def fm_feasible(constraints: Sequence[Constraint], n: int) -> bool:
        """
        Decide feasibility of a system of linear equalities, weak and strict
        inequalities over the rationals by Fourier-Motzkin elimination.
        """
        equalities = [(list(c), Fraction(r)) for c, r, kind in constraints if kind == '=']
        system: Dict[Tuple[Tuple[Fraction, ...], Fraction], bool] = {}

        def add(coeffs, rhs, strict):
            coeffs = [Fraction(x) for x in coeffs]
            scale = max((abs(x) for x in coeffs), default=Fraction(0))
            if scale == 0:
                return (0 > rhs) if strict else (0 >= rhs)
            key = (tuple(x / scale for x in coeffs), Fraction(rhs) / scale)
            system[key] = system.get(key, False) or strict
            return True

        # Substitute the equalities away
        inequalities = [(list(c), Fraction(r), kind == '>') for c, r, kind in constraints if kind != '=']
        while equalities:
            coeffs, rhs = equalities.pop()
            pivot = next((k for k in range(n) if coeffs[k] != 0), None)
            if pivot is None:
                if rhs != 0:
                    return False
                continue

            def substitute(row, row_rhs):
                factor = row[pivot] / coeffs[pivot]
                return [x - factor * y for x, y in zip(row, coeffs)], row_rhs - factor * rhs

            equalities = [substitute(c, r) for c, r in equalities]
            inequalities = [substitute(c, r) + (s,) for c, r, s in inequalities]

        for coeffs, rhs, strict in inequalities:
            if not add(coeffs, rhs, strict):
                return False

        for k in range(n):
            lower, upper, rest = [], [], {}
            for (coeffs, rhs), strict in system.items():
                if coeffs[k] > 0:
                    lower.append((coeffs, rhs, strict))
                elif coeffs[k] < 0:
                    upper.append((coeffs, rhs, strict))
                else:
                    rest[(coeffs, rhs)] = strict
            system = rest
            for cl, rl, sl in lower:
                for cu, ru, su in upper:
                    wl, wu = -cu[k], cl[k]
                    coeffs = [wl * x + wu * y for x, y in zip(cl, cu)]
                    coeffs[k] = Fraction(0)
                    if not add(coeffs, wl * rl + wu * ru, sl or su):
                        return False
        return True

    @classmethod
    def hull_contains(cls, generators: Sequence[Sequence], point: Sequence) -> bool:
        """Brute-force test of point in conv(generators) + R_+^n over the weights lambda"""
        gens = [tuple(Fraction(x) for x in g) for g in generators]
        point = [Fraction(x) for x in point]
        k = len(gens)
        constraints: List[Constraint] = []
        for j in range(k):
            constraints.append((tuple(Fraction(int(i == j)) for i in range(k)), Fraction(0), '>='))
        constraints.append((tuple(Fraction(1) for _ in range(k)), Fraction(1), '='))
        for coord in range(len(point)):
            # sum_k lam_k v_k[coord] <= x[coord]
            constraints.append((tuple(-g[coord] for g in gens), -point[coord], '>='))
        return cls.fm_feasible(constraints, k)
