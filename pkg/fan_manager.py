"""
Fan machine module for the newton-osc toolkit
Handles normal fans, common refinements, unimodular subdivision, toric chart maps
and the correspondence between faces of a polyhedron and cones of a fan
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import (ArgumentOutOfRange, ConeNotCompatible, FanNotCompatible, InvariantViolation, NotUnimodular,
                    UnimodularizationBudgetExceeded)
from geometry import Face, GeometryManager, NewtonPolyhedron
from power_data import NewtonManager, PowerData
from utils import det, dot, primitive, rank, solve

logger = logging.getLogger('newton_osc.fans')

Ray = Tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    """A strongly convex rational cone inside R_+^n given by its skeleton"""
    rays: Tuple[Ray, ...]
    inequalities: Tuple[Tuple[Fraction, ...], ...] = field(default=(), compare=False, hash=False)

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence[int]],
                  inequalities: Iterable[Sequence[Fraction]] = ()) -> "Cone":
        skeleton = tuple(sorted({primitive(r) for r in rays}))
        rows = tuple(tuple(Fraction(x) for x in row) for row in inequalities)
        n = len(skeleton[0])
        if not rows and len(skeleton) == n and rank(skeleton) == n:
            # Simplicial full cone: lambda = R^{-1} x >= 0
            inverse = _inverse_rows(skeleton)
            rows = tuple(tuple(row) for row in inverse)
        return cls(skeleton, rows)

    @property
    def n(self) -> int:
        return len(self.rays[0])

    @property
    def dim(self) -> int:
        return rank(self.rays)

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    @cached_property
    def determinant(self) -> Fraction:
        if len(self.rays) != self.n:
            return Fraction(0)
        return det([[r[j] for r in self.rays] for j in range(self.n)])

    @property
    def is_unimodular(self) -> bool:
        return len(self.rays) == self.n and abs(self.determinant) == 1

    @cached_property
    def inverse(self) -> List[List[Fraction]]:
        return _inverse_rows(self.rays)

    def coordinates(self, point: Sequence) -> List[Fraction]:
        """lambda with point = sum_k lambda_k a^k for a simplicial n-cone"""
        return [sum(row[j] * point[j] for j in range(self.n)) for row in self.inverse]

    def contains(self, point: Sequence) -> bool:
        return all(dot(row, point) >= 0 for row in self.inequalities)

    def faces(self) -> List["Cone"]:
        """All nonzero faces, found as tight sets of the inequality list"""
        found: Dict[FrozenSet[Ray], None] = {frozenset(self.rays): None}
        queue = [frozenset(self.rays)]
        while queue:
            current = queue.pop()
            for row in self.inequalities:
                tight = frozenset(r for r in current if dot(row, r) == 0)
                if tight and tight != current and tight not in found:
                    found[tight] = None
                    queue.append(tight)
        faces = [self if len(rays) == len(self.rays) else Cone(tuple(sorted(rays))) for rays in found]
        return sorted(faces, key=lambda c: (len(c.rays), c.rays))

    def to_dict(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "det": int(self.determinant) if self.is_simplicial else None}


def _inverse_rows(rays: Sequence[Ray]) -> List[List[Fraction]]:
    """Rows of R^{-1} where the columns of R are the rays"""
    n = len(rays)
    columns = [solve(rays, tuple(int(i == j) for i in range(n))) for j in range(n)]
    if any(c is None for c in columns):
        raise ArgumentOutOfRange("Rays do not form a basis")
    return [[columns[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class Fan:
    """A fan given by its maximal cones; lower cones are their faces"""
    n: int
    cones: Tuple[Cone, ...]

    @property
    def rays(self) -> List[Ray]:
        return sorted({r for cone in self.cones for r in cone.rays})

    def cones_of_dim(self, k: int) -> List[Cone]:
        seen = {}
        for cone in self.cones:
            for face in cone.faces():
                if face.dim == k:
                    seen[face.rays] = face
        return [seen[key] for key in sorted(seen)]

    @property
    def is_unimodular(self) -> bool:
        return all(cone.is_unimodular for cone in self.cones)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rays": [list(r) for r in self.rays],
            "maximalCones": [cone.to_dict() for cone in self.cones],
            "unimodular": self.is_unimodular,
        }


@dataclass(frozen=True)
class ChartMap:
    """
    Toric chart x_j = prod_k y_k^{a^k_j} of a unimodular cone.

    Column k of the exponent matrix is the k-th skeleton vector.
    """
    cone: Cone
    exponent_matrix: Tuple[Tuple[int, ...], ...]
    jacobian_exponents: Tuple[int, ...]
    sign: int

    @property
    def n(self) -> int:
        return self.cone.n

    def pullback_exponent(self, alpha: Sequence) -> Tuple:
        """x^alpha = y^(<a^1, alpha>, ..., <a^n, alpha>)"""
        return tuple(dot(a, alpha) for a in self.cone.rays)

    def monomial_exponents(self, f: PowerData) -> Tuple[Fraction, ...]:
        """(l_f(a^1), ..., l_f(a^n)), the normal crossing part of f through the chart"""
        polyhedron = NewtonManager.newton_polyhedron(f)
        return tuple(polyhedron.support_value(a) for a in self.cone.rays)

    def cofactor(self, f: PowerData) -> PowerData:
        """f_sigma with f(pi(y)) = y^{l_f} * f_sigma(y); needs integer exponents"""
        if not f.is_polynomial:
            raise ArgumentOutOfRange("Chart cofactors are computed on the cleared lattice")
        shift = self.monomial_exponents(f.nonflat())
        terms = {}
        for exp, coeff in f.terms:
            pulled = tuple(int(p - s) for p, s in zip(self.pullback_exponent(exp), shift))
            terms[pulled] = terms.get(pulled, Fraction(0)) + coeff
        return PowerData.from_terms(self.n, terms)

    def map_points(self, y: np.ndarray) -> np.ndarray:
        """pi(y) for points of shape (N, n)"""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        matrix = np.array(self.exponent_matrix, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.stack([np.prod(y ** matrix[j][None, :], axis=1) for j in range(self.n)], axis=1)

    def vanishing_coordinates(self, zeroed: Iterable[int]) -> List[int]:
        """Coordinates x_j sent to 0 when y_k = 0 for k in zeroed"""
        zeroed = set(zeroed)
        return [j for j in range(self.n) if any(self.exponent_matrix[j][k] > 0 for k in zeroed)]

    def to_dict(self) -> dict:
        return {
            "rays": [list(r) for r in self.cone.rays],
            "exponentMatrix": [list(row) for row in self.exponent_matrix],
            "jacobianExponents": list(self.jacobian_exponents),
            "sign": self.sign,
        }


@dataclass(frozen=True)
class FaceConeMap:
    """gamma(I, sigma) and I(gamma, sigma) for one cone and one polyhedron"""
    polyhedron: NewtonPolyhedron
    cone: Cone

    def gamma_of(self, subset: Iterable[int]) -> Face:
        subset = sorted(set(subset))
        if not subset:
            return self.polyhedron.whole
        return self.polyhedron.face_cut_by([self.cone.rays[j] for j in subset])

    def index_set(self, face: Face) -> FrozenSet[int]:
        result = set()
        for j, a in enumerate(self.cone.rays):
            level = self.polyhedron.support_value(a)
            tight = all(dot(a, v) == level for v in face.vertex_points)
            flat = all(a[k] == 0 for k in face.zero_weight_set)
            if tight and flat:
                result.add(j)
        return frozenset(result)


class FanManager:
    """Class to build fans, subdivide them and read off toric chart data"""

    @staticmethod
    def trivial_fan(n: int) -> Fan:
        return Fan(n, (Cone.from_rays([tuple(int(i == j) for i in range(n)) for j in range(n)]),))

    @staticmethod
    def normal_fan(polyhedron: NewtonPolyhedron) -> Fan:
        """Maximal cones sigma_v = {a >= 0 : <a, v' - v> >= 0} at the vertices v"""
        n = polyhedron.n
        units = [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
        cones = []
        for v in polyhedron.vertices:
            rows = [tuple(x - y for x, y in zip(w, v)) for w in polyhedron.vertices if w != v]
            rays = GeometryManager.cone_rays(rows, n)
            cones.append(Cone.from_rays(rays, units + rows))
        fan = Fan(n, tuple(sorted(cones, key=lambda c: c.rays)))
        logger.debug(f"Normal fan with {len(fan.cones)} maximal cones and rays {fan.rays}")
        return fan

    @staticmethod
    def common_refinement(fans: Sequence[Fan]) -> Fan:
        """Full dimensional intersections of maximal cones, one from each fan"""
        if not fans:
            raise ArgumentOutOfRange("common_refinement needs at least one fan")
        n = fans[0].n
        current = list(fans[0].cones)
        for other in fans[1:]:
            refined: Dict[Tuple[Ray, ...], Cone] = {}
            for sigma in current:
                for tau in other.cones:
                    rows = list(sigma.inequalities) + list(tau.inequalities)
                    rays = GeometryManager.cone_rays(rows, n)
                    if rays and rank(rays) == n:
                        cone = Cone.from_rays(rays, rows)
                        refined[cone.rays] = cone
            current = [refined[key] for key in sorted(refined)]
        return Fan(n, tuple(current))

    @classmethod
    def triangulate(cls, fan: Fan, reverse_order: bool = False) -> Fan:
        """Pulling triangulation with one global ray order, so shared faces agree"""
        order = {r: i for i, r in enumerate(sorted(fan.rays, reverse=reverse_order))}
        cones = {}
        for cone in fan.cones:
            for simplex in cls._pull(list(cone.rays), cone.inequalities, order):
                piece = Cone.from_rays(simplex)
                cones[piece.rays] = piece
        return Fan(fan.n, tuple(cones[key] for key in sorted(cones)))

    @classmethod
    def _pull(cls, rays: List[Ray], inequalities, order) -> List[List[Ray]]:
        dim = rank(rays)
        if len(rays) == dim:
            return [rays]
        apex = min(rays, key=lambda r: order[r])
        facets = set()
        for row in inequalities:
            tight = frozenset(r for r in rays if dot(row, r) == 0)
            if apex not in tight and rank(list(tight)) == dim - 1:
                facets.add(tight)
        simplices = []
        for facet in sorted(facets, key=sorted):
            for piece in cls._pull(sorted(facet), inequalities, order):
                simplices.append([apex] + piece)
        return simplices

    @staticmethod
    def _hirzebruch_jung(u: Ray, v: Ray) -> List[Tuple[Ray, Ray]]:
        """Split cone(u, v) into unimodular cones by continued fraction rays"""
        pieces = []
        while True:
            size = abs(det([[u[0], v[0]], [u[1], v[1]]]))
            if size == 1:
                pieces.append((u, v))
                return pieces
            size = int(size)
            w = next(tuple((vj + k * uj) // size for uj, vj in zip(u, v))
                     for k in range(1, size) if all((vj + k * uj) % size == 0 for uj, vj in zip(u, v)))
            pieces.append((u, w))
            u = w

    @staticmethod
    def parallelepiped_point(cone: Cone) -> Ray:
        """Nonzero lattice point of the half-open fundamental parallelepiped with minimal coordinate sum"""
        n = cone.n
        inverse = cone.inverse
        steps = [tuple(inverse[i][j] for i in range(n)) for j in range(n)]

        def frac(vector):
            return tuple(x - (x.numerator // x.denominator) for x in vector)

        zero = tuple(Fraction(0) for _ in range(n))
        seen = {zero}
        queue = [zero]
        while queue:
            current = queue.pop()
            for step in steps:
                nxt = frac(tuple(a + b for a, b in zip(current, step)))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        points = []
        for lam in seen:
            if lam == zero:
                continue
            point = tuple(int(sum(lam[k] * cone.rays[k][j] for k in range(n))) for j in range(n))
            points.append((sum(point), point))
        return min(points)[1]

    @staticmethod
    def stellar_subdivide(fan: Fan, ray: Sequence[int]) -> Fan:
        """Star subdivision of a simplicial fan at a ray"""
        ray = primitive(ray)
        cones = {}
        for cone in fan.cones:
            lam = cone.coordinates(ray)
            if ray in cone.rays or any(x < 0 for x in lam):
                cones[cone.rays] = cone
                continue
            for i, weight in enumerate(lam):
                if weight > 0:
                    rays = list(cone.rays)
                    rays[i] = ray
                    piece = Cone.from_rays(rays)
                    cones[piece.rays] = piece
        return Fan(fan.n, tuple(cones[key] for key in sorted(cones)))

    @classmethod
    def simplicialize_unimodular(cls, fan: Fan, reverse_order: bool = False) -> Fan:
        """
        Refine a fan until every maximal cone is a lattice basis.

        Args:
            fan: fan supported on R_+^n
            reverse_order: pull from the opposite end of the ray order (a second, distinct subdivision)

        Returns:
            Unimodular fan refining the input
        """
        simplicial = cls.triangulate(fan, reverse_order)
        if fan.n == 1:
            return simplicial
        if fan.n == 2:
            cones = {}
            for cone in simplicial.cones:
                u, v = cone.rays
                for pair in cls._hirzebruch_jung(u, v):
                    piece = Cone.from_rays(pair)
                    cones[piece.rays] = piece
            result = Fan(2, tuple(cones[key] for key in sorted(cones)))
            logger.info(f"🧩 Unimodular 2D fan with {len(result.cones)} cones")
            return result

        current = simplicial
        steps = 0
        while True:
            bad = next((cone for cone in current.cones if not cone.is_unimodular), None)
            if bad is None:
                break
            if steps >= config.UNIMODULAR_SUBDIVISION_CAP:
                raise UnimodularizationBudgetExceeded(
                    f"Fan still has non-unimodular cones after {steps} subdivisions", partial_fan=current)
            point = cls.parallelepiped_point(bad)
            logger.debug(f"Stellar subdivision at {point} for cone {bad.rays} with det {bad.determinant}")
            current = cls.stellar_subdivide(current, point)
            steps += 1
        logger.info(f"🧩 Unimodular fan with {len(current.cones)} cones after {steps} stellar steps")
        return current

    @classmethod
    def alternate_subdivision(cls, fan: Fan) -> Fan:
        """A second unimodular refinement: star at the interior ray of the first cone"""
        first = fan.cones[0]
        centre = tuple(sum(r[j] for r in first.rays) for j in range(fan.n))
        return cls.stellar_subdivide(fan, centre)

    @classmethod
    def resolution_fan(cls, *polyhedra: NewtonPolyhedron, reverse_order: bool = False) -> Fan:
        """Unimodular refinement of the normal fans of all given polyhedra"""
        fans = [cls.normal_fan(p) for p in polyhedra]
        refined = cls.common_refinement(fans) if len(fans) > 1 else fans[0]
        return cls.simplicialize_unimodular(refined, reverse_order)

    @staticmethod
    def support_value(f: PowerData, a: Sequence[int]) -> Fraction:
        """l_f(a) = min over the support of <a, alpha>"""
        if not any(a):
            return Fraction(0)
        return NewtonManager.newton_polyhedron(f).support_value(a)

    # Compatibility

    @staticmethod
    def cone_is_compatible(cone: Cone, polyhedron: NewtonPolyhedron) -> bool:
        """Some vertex minimizes every skeleton vector at once"""
        levels = [polyhedron.support_value(a) for a in cone.rays]
        return any(all(dot(a, v) == level for a, level in zip(cone.rays, levels)) for v in polyhedron.vertices)

    @classmethod
    def require_compatible(cls, fan: Fan, *polyhedra: NewtonPolyhedron) -> None:
        for polyhedron in polyhedra:
            for cone in fan.cones:
                if not cls.cone_is_compatible(cone, polyhedron):
                    raise FanNotCompatible(f"Cone {cone.rays} does not refine the normal fan of {polyhedron}")

    @staticmethod
    def refines(fine: Fan, coarse: Fan) -> bool:
        return all(any(all(big.contains(r) for r in cone.rays) for big in coarse.cones) for cone in fine.cones)

    @staticmethod
    def covering_check(fan: Fan, rays: Iterable[Sequence[int]]) -> bool:
        """Every ray lies in some cone, and a ray interior to a cone lies in no other cone"""
        for a in rays:
            inside = [cone for cone in fan.cones if cone.contains(a)]
            if not inside:
                return False
            interior = [cone for cone in inside if all(dot(row, a) > 0 for row in cone.inequalities)]
            if interior and len(inside) > 1:
                return False
        return True

    # Charts and face maps

    @classmethod
    def face_cone_maps(cls, polyhedron: NewtonPolyhedron, cone: Cone) -> FaceConeMap:
        if not cls.cone_is_compatible(cone, polyhedron):
            raise ConeNotCompatible(f"Cone {cone.rays} does not refine the normal fan")
        return FaceConeMap(polyhedron, cone)

    @staticmethod
    def chart(cone: Cone) -> ChartMap:
        if not cone.is_unimodular:
            raise NotUnimodular(f"Cone {cone.rays} has determinant {cone.determinant}")
        n = cone.n
        matrix = tuple(tuple(cone.rays[k][j] for k in range(n)) for j in range(n))
        jacobian = tuple(sum(a) - 1 for a in cone.rays)
        return ChartMap(cone, matrix, jacobian, int(cone.determinant))

    @classmethod
    def compactness_criterion(cls, subset: Iterable[int], cone: Cone, polyhedron: NewtonPolyhedron) -> bool:
        """gamma(I, sigma) is compact iff the chart sends the coordinate subspace T_I to 0"""
        subset = sorted(set(subset))
        face = cls.face_cone_maps(polyhedron, cone).gamma_of(subset)
        chart = cls.chart(cone)
        by_chart = len(chart.vanishing_coordinates(subset)) == cone.n
        if by_chart != face.compact:
            raise InvariantViolation(f"Compactness of face {face.index} disagrees with the chart test for I={subset}")
        return face.compact
