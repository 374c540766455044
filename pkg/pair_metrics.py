"""
Pair metrics module for the newton-osc toolkit
Handles the Newton distance and multiplicity of a phase/weight pair, contact sets,
principal faces and their pairing, symmetry quantities and Puiseux reduction
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InvariantViolation, PhaseWithoutFiniteDistance
from geometry import Face, GeometryManager, NewtonPolyhedron
from power_data import NewtonManager, PowerData
from utils import rat_str, vector_str

logger = logging.getLogger('newton_osc.pairs')


@dataclass(frozen=True)
class PairReport:
    """Exact pair invariants d(f,g), m(f,g) with the contact and principal faces"""
    d: Fraction
    m: int
    polyhedron_f: NewtonPolyhedron
    polyhedron_g: NewtonPolyhedron
    gamma_zero_f: Tuple[Face, ...]
    gamma_zero_g: Tuple[Face, ...]
    principal_f: Tuple[Face, ...]
    principal_g: Tuple[Face, ...]
    pairing: Tuple[Tuple[int, int], ...]

    @property
    def n(self) -> int:
        return self.polyhedron_f.n

    def partner(self, tau: Face) -> Face:
        """gamma_* = Psi_*(tau_*)"""
        for f_index, g_index in self.pairing:
            if f_index == tau.index:
                return self.polyhedron_g.faces[g_index]
        raise KeyError(f"Face {tau.index} is not a principal face")

    def to_dict(self) -> dict:
        return {
            "d": rat_str(self.d),
            "m": self.m,
            "gammaZeroF": [face.to_dict() for face in self.gamma_zero_f],
            "gammaZeroG": [face.to_dict() for face in self.gamma_zero_g],
            "principalF": [face.to_dict() for face in self.principal_f],
            "principalG": [face.to_dict() for face in self.principal_g],
            "pairing": [{"tau": t, "gamma": g} for t, g in self.pairing],
        }


@dataclass(frozen=True)
class UnweightedMetrics:
    d: Fraction
    m: int
    tau: Face
    tau_part: PowerData

    def to_dict(self) -> dict:
        return {"d": rat_str(self.d), "m": self.m, "tau": self.tau.to_dict(), "fTau": str(self.tau_part)}


@dataclass(frozen=True)
class SymmetryReport:
    dfg: Fraction
    dgf: Fraction
    equality_case: bool
    scale: Optional[Fraction]
    eta_fg: int
    eta_gf: int

    @property
    def product(self) -> Fraction:
        return self.dfg * self.dgf

    def to_dict(self) -> dict:
        return {
            "dfg": rat_str(self.dfg),
            "dgf": rat_str(self.dgf),
            "product": rat_str(self.product),
            "equalityCase": self.equality_case,
            "scale": rat_str(self.scale) if self.scale is not None else None,
            "etaFG": self.eta_fg,
            "etaGF": self.eta_gf,
        }


@dataclass(frozen=True)
class PuiseuxReduction:
    reduced: PowerData
    weight_exponent: Tuple[int, ...]
    jacobian: int

    def to_dict(self) -> dict:
        return {"reduced": self.reduced.to_dict(), "weightExponent": list(self.weight_exponent),
                "jacobian": self.jacobian}


class PairManager:
    """Class to compute the polyhedral invariants of a pair (f, g)"""

    @staticmethod
    def polyhedron_distance(polyhedron_f: NewtonPolyhedron, polyhedron_g: NewtonPolyhedron) -> Fraction:
        """Facet form: max over facets with l_f(a) != 0 of l_f(a) / (l_g(a) + <a>)"""
        ratios = [facet.offset / (polyhedron_g.support_value(facet.normal) + sum(facet.normal))
                  for facet in polyhedron_f.facets if facet.offset != 0]
        if not ratios:
            raise PhaseWithoutFiniteDistance("Every facet of Gamma_+(f) passes through the origin")
        return max(ratios)

    @classmethod
    def newton_distance(cls, f: PowerData, g: PowerData) -> Fraction:
        """
        Compute the Newton distance d(f,g).

        Args:
            f: phase
            g: weight (unit weight for the unweighted distance)

        Returns:
            Exact rational d(f,g)
        """
        return cls.polyhedron_distance(NewtonManager.newton_polyhedron(f), NewtonManager.newton_polyhedron(g))

    @classmethod
    def distance_to_monomial(cls, f: PowerData, exponent: Sequence) -> Fraction:
        """d(f, x^beta) for a rational exponent beta"""
        monomial = GeometryManager.build_polyhedron([tuple(Fraction(x) for x in exponent)])
        return cls.polyhedron_distance(NewtonManager.newton_polyhedron(f), monomial)

    @staticmethod
    def contact_polyhedron(polyhedron_g: NewtonPolyhedron, d: Fraction) -> NewtonPolyhedron:
        """Phi(Gamma_+(g)) = d * (Gamma_+(g) + 1)"""
        return GeometryManager.scale_translate(polyhedron_g, d, (1,) * polyhedron_g.n)

    @classmethod
    def contact_sets(cls, polyhedron_f: NewtonPolyhedron, polyhedron_g: NewtonPolyhedron,
                     d: Fraction) -> Tuple[List[Face], List[Face]]:
        """
        Contact faces on both sides.

        Returns:
            (faces of Gamma_+(f) whose relative interior meets Phi(Gamma_+(g)),
             faces of Gamma_+(g) whose image has relative interior meeting the boundary of Gamma_+(f))
        """
        image = cls.contact_polyhedron(polyhedron_g, d)
        zero_f = [tau for tau in polyhedron_f.proper_faces() if GeometryManager.relint_intersects(tau, image)]
        facets = polyhedron_f.facet_faces()
        zero_g = []
        for gamma, moved in zip(polyhedron_g.faces, image.faces):
            if any(GeometryManager.relint_intersects(moved, facet) for facet in facets):
                zero_g.append(gamma)
        logger.debug(f"Contact sets: {len(zero_f)} faces of Gamma_+(f), {len(zero_g)} faces of Gamma_+(g)")
        return zero_f, zero_g

    @classmethod
    def analyze_polyhedra(cls, polyhedron_f: NewtonPolyhedron, polyhedron_g: NewtonPolyhedron) -> PairReport:
        """Build the pair report directly from two polyhedra"""
        n = polyhedron_f.n
        d = cls.polyhedron_distance(polyhedron_f, polyhedron_g)
        zero_f, zero_g = cls.contact_sets(polyhedron_f, polyhedron_g, d)
        if not zero_f:
            raise InvariantViolation(f"Empty contact set at d = {rat_str(d)}")
        m = max(n - tau.dim for tau in zero_f)
        principal_f = [tau for tau in zero_f if n - tau.dim == m]

        pairing = []
        for tau in principal_f:
            pair = tau.defining_pair()
            level = pair.offset / d - sum(pair.normal)
            if polyhedron_g.support_value(pair.normal) != level:
                raise InvariantViolation(f"Principal face {tau.index} does not support Phi(Gamma_+(g))")
            gamma = polyhedron_g.face_cut_by([pair.normal])
            # Dimension and compactness transfer between paired faces
            if gamma.dim > tau.dim or gamma.compact != tau.compact:
                raise InvariantViolation(f"Paired faces {tau.index}/{gamma.index} break the dimension transfer")
            pairing.append((tau.index, gamma.index))
        principal_g = sorted({g for _, g in pairing})
        if len(principal_g) != len(principal_f):
            raise InvariantViolation("Principal face pairing is not injective")

        report = PairReport(d, m, polyhedron_f, polyhedron_g, tuple(zero_f), tuple(zero_g),
                            tuple(principal_f), tuple(polyhedron_g.faces[i] for i in principal_g), tuple(pairing))
        logger.info(f"📐 d(f,g) = {rat_str(d)}, m(f,g) = {m}, {len(principal_f)} principal face(s)")
        return report

    @classmethod
    def newton_multiplicity(cls, f: PowerData, g: PowerData) -> PairReport:
        """Full pair report for PowerData f, g"""
        return cls.analyze_polyhedra(NewtonManager.newton_polyhedron(f), NewtonManager.newton_polyhedron(g))

    @classmethod
    def unweighted_metrics(cls, f: PowerData) -> UnweightedMetrics:
        """d(f), m(f) and tau_* from the diagonal point (d, ..., d) on the boundary"""
        polyhedron = NewtonManager.newton_polyhedron(f)
        ratios = [facet.offset / sum(facet.normal) for facet in polyhedron.facets if facet.offset != 0]
        if not ratios:
            raise PhaseWithoutFiniteDistance(f"f(0) != 0 for {f}")
        d = max(ratios)
        tau = GeometryManager.smallest_face(polyhedron, (d,) * f.n)
        part = NewtonManager.gamma_part(f, tau).data
        return UnweightedMetrics(d, f.n - tau.dim, tau, part)

    @classmethod
    def symmetry_check(cls, f: PowerData, g: PowerData) -> SymmetryReport:
        """
        Compare d(x^1 f, g) and d(x^1 g, f).

        The product is always >= 1; it equals 1 exactly when Gamma_+(x^1 f) is a
        rational dilate of Gamma_+(x^1 g), and then both multiplicities equal n.
        """
        ones = (1,) * f.n
        big_f = NewtonManager.monomial_times(f.nonflat(), ones)
        big_g = NewtonManager.monomial_times(g.nonflat(), ones)
        dfg = cls.newton_distance(big_f, g)
        dgf = cls.newton_distance(big_g, f)
        if dfg * dgf < 1:
            raise InvariantViolation(f"Symmetry product {rat_str(dfg * dgf)} < 1")

        polyhedron_f = NewtonManager.newton_polyhedron(big_f)
        polyhedron_g = NewtonManager.newton_polyhedron(big_g)
        scale = cls._dilation_scale(polyhedron_f, polyhedron_g)
        eta_fg = cls.newton_multiplicity(big_f, g).m
        eta_gf = cls.newton_multiplicity(big_g, f).m
        if (scale is not None) != (dfg * dgf == 1):
            raise InvariantViolation("Symmetry equality case disagrees with the dilation test")
        if scale is not None and (eta_fg != f.n or eta_gf != f.n):
            raise InvariantViolation(f"Equality case with multiplicities {eta_fg}, {eta_gf} != n")
        return SymmetryReport(dfg, dgf, scale is not None, scale, eta_fg, eta_gf)

    @staticmethod
    def _dilation_scale(polyhedron_f: NewtonPolyhedron, polyhedron_g: NewtonPolyhedron) -> Optional[Fraction]:
        """The rational c with P_f = c * P_g, if any, from facet offset ratios"""
        offsets_g: Dict[Tuple[int, ...], Fraction] = {f.normal: f.offset for f in polyhedron_g.facets}
        candidates = {f.offset / offsets_g[f.normal] for f in polyhedron_f.facets
                      if f.normal in offsets_g and offsets_g[f.normal] != 0}
        for c in sorted(candidates):
            if c > 0 and GeometryManager.scale_translate(polyhedron_g, c) == polyhedron_f:
                return c
        return None

    @staticmethod
    def puiseux_reduce(f: PowerData) -> PuiseuxReduction:
        """Read the exponents on the cleared lattice, x_j = y_j^{p_j}"""
        reduced = NewtonManager.cleared(f)
        weight = tuple(p - 1 for p in f.denom_vector)
        jacobian = 1
        for p in f.denom_vector:
            jacobian *= p
        logger.debug(f"Puiseux reduction of {f}: weight exponent {weight}, jacobian {jacobian}")
        return PuiseuxReduction(reduced, weight, jacobian)

    @classmethod
    def principal_part_pair(cls, report: PairReport, f: PowerData, g: PowerData,
                            tau: Face) -> Tuple[PowerData, PowerData]:
        """(f_tau*, g_gamma*) for one principal face"""
        gamma = report.partner(tau)
        return NewtonManager.gamma_part(f, tau).data, NewtonManager.gamma_part(g, gamma).data

    @staticmethod
    def describe(report: PairReport) -> str:
        faces = ", ".join(str([vector_str(v) for v in tau.vertex_points]) for tau in report.principal_f)
        return f"d = {rat_str(report.d)}, m = {report.m}, principal faces {faces}"
