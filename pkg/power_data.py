"""
Newton core module for the newton-osc toolkit
Handles sparse power data for phases and weights, Newton polyhedra, gamma-parts,
flatness/convenience flags and nondegeneracy certificates
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.polytools import sturm

import config
from errors import ArgumentOutOfRange, FaceNotOfThisPolyhedron, FlatFunction, InputFormatError
from geometry import Face, GeometryManager, NewtonPolyhedron
from utils import dot, primitive, rank, rat_str, vector_str

logger = logging.getLogger('newton_osc.newton')

Exponent = Tuple[int, ...]


@dataclass(frozen=True)
class FlatMarker:
    """The term scale * x^exponent * exp(-1/x_axis^2)"""
    exponent: Exponent
    axis: int
    scale: Fraction = Fraction(1)

    def to_dict(self) -> dict:
        return {"exp": list(self.exponent), "axis": self.axis + 1, "scale": rat_str(self.scale)}


@dataclass(frozen=True)
class PowerData:
    """
    Sparse power series data.

    Exponents are stored on the cleared lattice: the integer vector e stands for
    the real exponent e / denom_vector (componentwise).
    """
    n: int
    denom_vector: Tuple[int, ...]
    terms: Tuple[Tuple[Exponent, Fraction], ...]
    flat_markers: Tuple[FlatMarker, ...] = ()

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Sequence[int], object] = None,
                   denom_vector: Optional[Sequence[int]] = None,
                   flat_markers: Iterable[FlatMarker] = ()) -> "PowerData":
        denom = tuple(int(p) for p in denom_vector) if denom_vector is not None else (1,) * n
        if len(denom) != n or any(p < 1 for p in denom):
            raise InputFormatError(f"Bad denominator vector {denom} for n={n}")
        collected: Dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise InputFormatError(f"Bad exponent {exp} for n={n}")
            collected[exp] = collected.get(exp, Fraction(0)) + Fraction(coeff)
        kept = tuple(sorted((e, c) for e, c in collected.items() if c != 0))
        markers = tuple(flat_markers)
        for m in markers:
            if len(m.exponent) != n or not 0 <= m.axis < n:
                raise InputFormatError(f"Bad flat marker {m}")
        return cls(n, denom, kept, markers)

    @classmethod
    def unit(cls, n: int) -> "PowerData":
        """The unit weight g = 1"""
        return cls.from_terms(n, {(0,) * n: 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "PowerData":
        return cls.from_terms(len(exponent), {tuple(exponent): coeff})

    @property
    def coefficients(self) -> Dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def is_flat(self) -> bool:
        return not self.terms

    @property
    def is_polynomial(self) -> bool:
        return all(p == 1 for p in self.denom_vector)

    def real_exponent(self, exp: Sequence[int]) -> Tuple[Fraction, ...]:
        return tuple(Fraction(e, p) for e, p in zip(exp, self.denom_vector))

    def exponents(self) -> List[Tuple[Fraction, ...]]:
        """Real exponents alpha / p of the non-flat terms"""
        return [self.real_exponent(e) for e, _ in self.terms]

    def nonflat(self) -> "PowerData":
        return PowerData(self.n, self.denom_vector, self.terms, ())

    def monomial_factor(self) -> Tuple[Fraction, ...]:
        """Componentwise minimum over all exponents, flat markers included"""
        exps = self.exponents() + [tuple(Fraction(x) for x in m.exponent) for m in self.flat_markers]
        return tuple(min(e[j] for e in exps) for j in range(self.n))

    def restricted(self, keep) -> "PowerData":
        return PowerData(self.n, self.denom_vector, tuple((e, c) for e, c in self.terms if keep(e)), ())

    def permuted(self, perm: Sequence[int]) -> "PowerData":
        """New data with x_j replaced by x_perm[j]"""
        terms = {tuple(e[perm[j]] for j in range(self.n)): c for e, c in self.terms}
        markers = [FlatMarker(tuple(m.exponent[perm[j]] for j in range(self.n)), list(perm).index(m.axis), m.scale)
                   for m in self.flat_markers]
        return PowerData.from_terms(self.n, terms, tuple(self.denom_vector[perm[j]] for j in range(self.n)), markers)

    def orthant(self, theta: Sequence[int]) -> "PowerData":
        """f_theta(x) = f(theta_1 x_1, ..., theta_n x_n) for integer exponents"""
        if not self.is_polynomial:
            raise ArgumentOutOfRange("Orthant reflection needs integer exponents")
        terms = {e: c * int(np.prod([t ** k for t, k in zip(theta, e)])) for e, c in self.terms}
        markers = [FlatMarker(m.exponent, m.axis, m.scale * int(np.prod([t ** k for t, k in zip(theta, m.exponent)])))
                   for m in self.flat_markers]
        return PowerData.from_terms(self.n, terms, self.denom_vector, markers)

    # Numeric evaluation

    def _arrays(self):
        exps = np.array([[float(x) for x in e] for e in self.exponents()], dtype=float).reshape(-1, self.n)
        coeffs = np.array([float(c) for _, c in self.terms], dtype=float)
        return exps, coeffs

    def evaluate(self, points: np.ndarray, include_flat: bool = True) -> np.ndarray:
        """Evaluate at points of shape (N, n); fractional exponents need x >= 0"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        exps, coeffs = self._arrays()
        with np.errstate(divide='ignore', invalid='ignore'):
            if len(coeffs):
                values = np.prod(points[:, None, :] ** exps[None, :, :], axis=2) @ coeffs
            else:
                values = np.zeros(points.shape[0])
            if include_flat:
                for m in self.flat_markers:
                    values = values + float(m.scale) * flat_profile(points, m)
        return values

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Gradient of the non-flat part at points in (R minus 0)^n, shape (N, n)"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        exps, coeffs = self._arrays()
        grads = np.zeros_like(points)
        for j in range(self.n):
            shifted = exps.copy()
            shifted[:, j] -= 1.0
            monos = np.prod(points[:, None, :] ** shifted[None, :, :], axis=2)
            grads[:, j] = monos @ (coeffs * exps[:, j])
        return grads

    def hessian(self, point: np.ndarray) -> np.ndarray:
        exps, coeffs = self._arrays()
        point = np.asarray(point, dtype=float)
        hess = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                shifted = exps.copy()
                shifted[:, i] -= 1.0
                shifted[:, j] -= 1.0
                factor = exps[:, i] * (exps[:, j] - (1.0 if i == j else 0.0))
                hess[i, j] = np.sum(coeffs * factor * np.prod(point[None, :] ** shifted, axis=1))
        return hess

    def magnitude(self, points: np.ndarray) -> np.ndarray:
        """Sum of absolute term values, the natural scale for relative thresholds"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        exps, coeffs = self._arrays()
        return np.prod(np.abs(points)[:, None, :] ** exps[None, :, :], axis=2) @ np.abs(coeffs)

    # Symbolic form

    def symbols(self):
        return sympy.symbols(f"x1:{self.n + 1}")

    def to_sympy(self, symbols=None):
        xs = symbols or self.symbols()
        expr = sympy.Integer(0)
        for exp, coeff in self.terms:
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            for x, e, p in zip(xs, exp, self.denom_vector):
                term *= x ** sympy.Rational(e, p)
            expr += term
        return expr

    def __str__(self) -> str:
        parts = []
        for exp, coeff in self.terms:
            mono = "*".join(f"x{j + 1}^{rat_str(Fraction(e, p))}" for j, (e, p) in enumerate(zip(exp, self.denom_vector)) if e)
            parts.append(f"{rat_str(coeff)}*{mono}" if mono else rat_str(coeff))
        for m in self.flat_markers:
            mono = "*".join(f"x{j + 1}^{e}" for j, e in enumerate(m.exponent) if e)
            parts.append(f"{rat_str(m.scale)}*{mono + '*' if mono else ''}exp(-1/x{m.axis + 1}^2)")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "denomVector": list(self.denom_vector),
            "terms": [{"exp": list(e), "coeff": rat_str(c)} for e, c in self.terms],
            "flatMarkers": [m.to_dict() for m in self.flat_markers],
            "text": str(self),
        }


def flat_profile(points: np.ndarray, marker: FlatMarker) -> np.ndarray:
    """x^m * exp(-1/x_j^2), extended by 0 on x_j = 0"""
    points = np.atleast_2d(points)
    xj = points[:, marker.axis]
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        damp = np.where(xj != 0.0, np.exp(-1.0 / np.where(xj != 0.0, xj, 1.0) ** 2), 0.0)
    mono = np.prod(points ** np.array(marker.exponent, dtype=float)[None, :], axis=1)
    return mono * damp


@dataclass(frozen=True)
class GammaPart:
    face: Face
    data: PowerData


@dataclass(frozen=True)
class NondegCertificate:
    verdict: str  # Nondegenerate, Degenerate or Unknown
    method: str  # Exact2D, ExactLowDim or Sampling
    witness: Optional[Tuple[float, ...]] = None
    face_index: Optional[int] = None
    notes: Tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "witness": list(self.witness) if self.witness is not None else None,
            "face": self.face_index,
            "notes": list(self.notes),
        }


class NewtonManager:
    """Class to handle Newton polyhedra of power data and their face parts"""

    @staticmethod
    @lru_cache(maxsize=1024)
    def newton_polyhedron(f: PowerData) -> NewtonPolyhedron:
        """Gamma_+(f) from the non-flat terms; flat markers never contribute"""
        if f.is_flat:
            raise FlatFunction(f"Only flat markers present in {f}: the Newton polyhedron is empty")
        return GeometryManager.build_polyhedron(f.exponents())

    @classmethod
    def gamma_part(cls, f: PowerData, face: Face) -> GammaPart:
        """Restriction of the terms of f to the face"""
        polyhedron = cls.newton_polyhedron(f)
        if face.polyhedron is not polyhedron and face.polyhedron != polyhedron:
            raise FaceNotOfThisPolyhedron(f"Face {face.index} does not belong to Gamma_+({f})")
        part = f.restricted(lambda e: face.contains(f.real_exponent(e)))
        return GammaPart(face, part)

    @classmethod
    def principal_part(cls, f: PowerData) -> PowerData:
        """f restricted to the Newton diagram (union of compact faces)"""
        polyhedron = cls.newton_polyhedron(f)
        compact = polyhedron.compact_faces()
        return f.restricted(lambda e: any(face.contains(f.real_exponent(e)) for face in compact))

    @classmethod
    def is_convenient(cls, f: PowerData) -> bool:
        """Gamma_+(f) meets every coordinate axis"""
        if f.is_flat:
            return False
        exps = f.exponents()
        return all(any(all(e[k] == 0 for k in range(f.n) if k != j) for e in exps) for j in range(f.n))

    @staticmethod
    def is_flat(f: PowerData) -> bool:
        return f.is_flat

    @classmethod
    def marker_is_harmless(cls, f: PowerData, marker: FlatMarker) -> bool:
        """m + T e_j lies in Gamma_+(non-flat part) for all large T"""
        polyhedron = cls.newton_polyhedron(f.nonflat())
        m = tuple(Fraction(x) for x in marker.exponent)
        return all(facet.value(m) >= 0 for facet in polyhedron.facets if facet.normal[marker.axis] == 0)

    @classmethod
    def is_hat_e(cls, f: PowerData) -> bool:
        """
        Conservative membership flag for the class admitting gamma-parts on every face.

        Polynomial and Puiseux data always qualify; data with flat markers qualifies only when
        every marker is absorbed by the non-flat Newton polyhedron along its flat axis.
        """
        if f.is_flat:
            return False
        return all(cls.marker_is_harmless(f, m) for m in f.flat_markers)

    @staticmethod
    def product_support(*factors: PowerData) -> PowerData:
        """Formal product of the term mappings"""
        if not factors:
            raise ArgumentOutOfRange("product_support needs at least one factor")
        n, denom = factors[0].n, factors[0].denom_vector
        if any(f.n != n or f.denom_vector != denom for f in factors):
            raise ArgumentOutOfRange("All factors must share the dimension and the denominator vector")
        product: Dict[Exponent, Fraction] = {(0,) * n: Fraction(1)}
        for f in factors:
            step: Dict[Exponent, Fraction] = {}
            for e1, c1 in product.items():
                for e2, c2 in f.terms:
                    e = tuple(x + y for x, y in zip(e1, e2))
                    step[e] = step.get(e, Fraction(0)) + c1 * c2
            product = step
        return PowerData.from_terms(n, product, denom)

    @classmethod
    def monomial_times(cls, f: PowerData, exponent: Sequence[int]) -> PowerData:
        """x^exponent * f, exponent read on the real lattice"""
        cleared = tuple(int(e) * p for e, p in zip(exponent, f.denom_vector))
        shift = PowerData.from_terms(f.n, {cleared: 1}, f.denom_vector)
        product = cls.product_support(f.nonflat(), shift)
        markers = [FlatMarker(tuple(a + b for a, b in zip(m.exponent, exponent)), m.axis, m.scale) for m in f.flat_markers]
        return PowerData(product.n, product.denom_vector, product.terms, tuple(markers))

    @staticmethod
    def cleared(f: PowerData) -> PowerData:
        """The same terms read with denominator vector 1"""
        return PowerData(f.n, (1,) * f.n, f.terms, f.flat_markers)

    # Nondegeneracy

    @classmethod
    def nondegeneracy_certificate(cls, f: PowerData) -> NondegCertificate:
        """
        Check grad f_gamma != 0 on (R minus 0)^n for every compact face gamma.

        Vertices and edges are decided exactly; faces of dimension >= 2 fall back to
        the sampling heuristic and yield Unknown when no critical point is found.
        """
        data = cls.cleared(f.nonflat())
        polyhedron = cls.newton_polyhedron(data)
        exact = "Exact2D" if f.n <= 2 else "ExactLowDim"
        sampled = False
        for face in polyhedron.compact_faces():
            part = cls.gamma_part(data, face).data
            if face.dim == 0:
                (exp, _), = part.terms
                if not any(exp):
                    logger.debug("Vertex at the origin: f(0) != 0 counts as degenerate")
                    return NondegCertificate("Degenerate", exact, (1.0,) * f.n, face.index,
                                             ("f(0) != 0",))
                continue
            if face.dim == 1:
                witness = cls._edge_critical_point(part)
                if witness is not None:
                    return NondegCertificate("Degenerate", exact, witness, face.index)
                continue
            sampled = True
            witness = cls._sample_critical_point(part, face)
            if witness is not None:
                return NondegCertificate("Degenerate", "Sampling", witness, face.index)
        if sampled:
            logger.warning(f"⚠️ Nondegeneracy of {f} only sampled: verdict Unknown")
            return NondegCertificate("Unknown", "Sampling", notes=("no critical point found on the sampling grid",))
        return NondegCertificate("Nondegenerate", exact)

    @staticmethod
    def edge_polynomial(part: PowerData):
        """
        Write a one-dimensional face part as x^b0 * q(u) with u = x^w.

        Returns:
            (q as sympy Poly in u, base exponent b0, primitive direction w)
        """
        exps = [e for e, _ in part.terms]
        base = exps[0]
        direction = primitive([x - y for x, y in zip(exps[-1], base)])
        u = sympy.Symbol('u')
        q = sympy.Integer(0)
        for e, c in part.terms:
            diff = [x - y for x, y in zip(e, base)]
            k = next(d // w for d, w in zip(diff, direction) if w != 0) if any(diff) else 0
            q += sympy.Rational(c.numerator, c.denominator) * u ** k
        return sympy.Poly(q, u), base, direction

    @staticmethod
    def real_roots_off_zero(poly) -> int:
        """Number of distinct real roots in R minus 0, by Sturm sign variations"""
        u = poly.gens[0]
        while poly.degree() > 0 and poly.eval(0) == 0:
            poly = sympy.Poly(sympy.quo(poly.as_expr(), u), u)
        if poly.degree() <= 0:
            return 0
        sequence = sturm(poly)

        def variations(signs):
            signs = [s for s in signs if s != 0]
            return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)

        at_zero = variations([sympy.sign(p.eval(0)) for p in sequence])
        at_plus = variations([sympy.sign(p.LC()) for p in sequence])
        at_minus = variations([sympy.sign(p.LC()) * (-1) ** p.degree() for p in sequence])
        return (at_minus - at_zero) + (at_zero - at_plus)

    @classmethod
    def _edge_critical_point(cls, part: PowerData) -> Optional[Tuple[float, ...]]:
        """Degenerate iff q has a real root u != 0 of multiplicity >= 2"""
        q, base, direction = cls.edge_polynomial(part)
        _, factors = q.sqf_list()
        for factor, multiplicity in factors:
            if multiplicity < 2 or cls.real_roots_off_zero(factor) == 0:
                continue
            root = next(float(r) for r in sympy.real_roots(factor) if r != 0)
            return cls._witness_for(root, direction)
        return None

    @staticmethod
    def _witness_for(root: float, direction: Sequence[int]) -> Tuple[float, ...]:
        """A point x with x^w = root: solve on one odd coordinate, the others set to 1"""
        n = len(direction)
        j = next(k for k in range(n) if direction[k] % 2 != 0)
        w = direction[j]
        value = abs(root) ** (1.0 / w)
        sign = 1.0 if root > 0 else -1.0
        point = [1.0] * n
        point[j] = sign * value
        return tuple(point)

    @classmethod
    def _sample_critical_point(cls, part: PowerData, face: Face) -> Optional[Tuple[float, ...]]:
        """Log-grid search with Newton refinement, x_1 fixed to +-1 by quasi-homogeneity"""
        n = part.n
        low, high = config.NONDEG_LOG_RANGE
        mags = np.logspace(low, high, config.NONDEG_GRID_SIZE)
        grid = np.array(list(itertools.product(mags, repeat=n - 1)))
        candidates = []
        for signs in itertools.product((1.0, -1.0), repeat=n):
            points = np.hstack([np.ones((len(grid), 1)), grid]) * np.array(signs)[None, :]
            grads = part.gradient(points)
            score = np.linalg.norm(grads, axis=1) / np.maximum(part.magnitude(points), 1e-300)
            best = np.argsort(score)[:config.NONDEG_CANDIDATES]
            candidates.extend((score[i], points[i]) for i in best)
        candidates.sort(key=lambda item: item[0])
        for _, start in candidates[:config.NONDEG_CANDIDATES]:
            point = cls._newton_refine(part, start)
            if point is None:
                continue
            grad = np.linalg.norm(part.gradient(point[None, :])[0])
            scale = max(1.0, float(part.magnitude(point[None, :])[0]))
            if grad < config.NONDEG_THRESHOLD * scale:
                logger.info(f"🔎 Critical point of f_gamma on face {face.index} near {np.round(point, 6)}")
                return tuple(float(x) for x in point)
        return None

    @staticmethod
    def _newton_refine(part: PowerData, start: np.ndarray) -> Optional[np.ndarray]:
        point = np.array(start, dtype=float)
        for _ in range(config.NONDEG_NEWTON_STEPS):
            grad = part.gradient(point[None, :])[0]
            jac = part.hessian(point)[:, 1:]
            step = np.linalg.pinv(jac) @ grad
            point[1:] -= step
            if not np.all(np.isfinite(point)) or np.any(np.abs(point[1:]) < 1e-8) or np.any(np.abs(point) > 1e8):
                return None
        return point

    @classmethod
    def nonvanishing_verdict(cls, part: PowerData) -> str:
        """
        Decide whether a face part vanishes somewhere on (R minus 0)^n.

        Returns:
            "Holds" (never vanishes), "Fails" (a zero exists) or "Unknown"
        """
        if part.is_flat:
            return "Fails"
        data = cls.cleared(part.nonflat())
        if len(data.terms) == 1:
            return "Holds"
        exps = [e for e, _ in data.terms]
        base = exps[0]
        span = [tuple(x - y for x, y in zip(e, base)) for e in exps[1:]]
        if rank(span) == 1:
            q, _, _ = cls.edge_polynomial(data)
            return "Fails" if cls.real_roots_off_zero(q) > 0 else "Holds"
        if cls.even_same_sign(data):
            return "Holds"
        return cls._sampled_sign_change(data)

    @staticmethod
    def even_same_sign(part: PowerData) -> bool:
        """All exponents even and all coefficients of one sign"""
        if not part.is_polynomial or part.is_flat:
            return False
        if any(x % 2 for e, _ in part.terms for x in e):
            return False
        signs = {c > 0 for _, c in part.terms}
        return len(signs) == 1

    @staticmethod
    def _sampled_sign_change(part: PowerData) -> str:
        """Fails on a sign change inside one orthant, Unknown when the samples are clean"""
        rng = np.random.default_rng(config.RANDOM_SEED)
        low, high = config.SIGN_LOG_RANGE
        for signs in itertools.product((1.0, -1.0), repeat=part.n):
            mags = 10.0 ** rng.uniform(low, high, size=(config.SIGN_SAMPLES_PER_ORTHANT, part.n))
            values = part.evaluate(mags * np.array(signs)[None, :])
            if np.any(values > 0) and np.any(values < 0):
                return "Fails"
        logger.warning(f"⚠️ No zero of {part} found by sampling: verdict Unknown")
        return "Unknown"
