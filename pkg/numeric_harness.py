"""
Numeric harness module for the newton-osc toolkit
Handles bump amplitudes, toric sector quadrature of local zeta functions, oscillatory
quadrature of I(t), pole and decay fitting, and chart integrals for leading coefficients
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, special

import config
from errors import (ArgumentOutOfRange, DimensionTooLarge, GatesNotHeld, InputFormatError, InsufficientSamples,
                    InvariantViolation, NoncompactPrincipalFaceWithoutLocalization, PoorFit, QuadratureBudgetExceeded)
from fan_manager import ChartMap, FanManager
from geometry import GeometryManager, NewtonPolyhedron
from power_data import NewtonManager, PowerData
from utils import approx
from zeta_report import HOLDS, CoefficientReport, ZetaManager

logger = logging.getLogger('newton_osc.harness')

CHUNK = 200_000  # grid points evaluated per numpy pass


@dataclass(frozen=True)
class BumpFunction:
    """phi(x) = normalization * exp(-1/(1 - |x|^2/R^2)) inside the ball of radius R, 0 outside"""
    radius: float = config.DEFAULT_BUMP_RADIUS
    normalization: float = math.e

    def __post_init__(self):
        if not 0 < self.radius <= 1:
            raise ArgumentOutOfRange(f"Bump radius {self.radius} must lie in (0, 1]")

    @property
    def at_origin(self) -> float:
        return self.normalization / math.e

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        r2 = np.sum(points ** 2, axis=1) / self.radius ** 2
        values = np.zeros(points.shape[0])
        inside = r2 < 1.0
        values[inside] = self.normalization * np.exp(-1.0 / (1.0 - r2[inside]))
        return values

    def halfwidth(self, fixed: Sequence[float]) -> float:
        """Half length of the support along the last axis with the other coordinates fixed"""
        rest = self.radius ** 2 - sum(x * x for x in fixed)
        return math.sqrt(rest) if rest > 0 else 0.0

    def to_dict(self) -> dict:
        return {"radius": approx(self.radius), "normalization": approx(self.normalization),
                "atOrigin": approx(self.at_origin)}


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    evaluations: int

    def to_dict(self) -> dict:
        return {"value": approx(self.value), "error": approx(self.error), "evaluations": self.evaluations}


@dataclass(frozen=True)
class FitResult:
    exponent: float
    log_power: Optional[int]
    coefficient: complex
    residual: float
    sample_range: Tuple[float, float]
    poor: bool = False
    condition: Optional[float] = None
    tolerance: Optional[float] = None
    location: Optional[float] = None

    def to_dict(self) -> dict:
        result = {
            "exponent": approx(self.exponent),
            "logPower": self.log_power,
            "coefficient": approx(self.coefficient),
            "residual": approx(self.residual),
            "sampleRange": [approx(self.sample_range[0]), approx(self.sample_range[1])],
            "poor": self.poor,
        }
        if self.condition is not None:
            result["condition"] = approx(self.condition)
        if self.tolerance is not None:
            result["tolerance"] = approx(self.tolerance)
        if self.location is not None:
            result["location"] = approx(self.location)
        return result


@dataclass(frozen=True)
class NumericPair:
    """Phase and weight on an integer lattice, x = y^power on the positive orthant when fractional"""
    phase: PowerData
    weight: PowerData
    power: Tuple[int, ...]
    jacobian: int
    positive_only: bool


@dataclass
class PhaseSlice:
    """A phase restricted to a line: sum c x^e + sum s x^m exp(-1/x^2)"""
    exps: np.ndarray
    coeffs: np.ndarray
    flat: List[Tuple[float, float]] = field(default_factory=list)

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            values = (x[:, None] ** self.exps[None, :]) @ self.coeffs if len(self.coeffs) else np.zeros_like(x)
            for scale, m in self.flat:
                values = values + scale * x ** m * _damp(x)
        return values

    def slope(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        keep = self.exps != 0
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            values = (x[:, None] ** (self.exps[keep] - 1.0)[None, :]) @ (self.coeffs[keep] * self.exps[keep])
            for scale, m in self.flat:
                damp = _damp(x)
                safe = np.where(x != 0.0, x, 1.0)
                values = values + scale * np.where(damp > 0, (m * safe ** (m - 1) + 2.0 * safe ** (m - 3)) * damp, 0.0)
        return values


def _damp(x: np.ndarray) -> np.ndarray:
    safe = np.where(x != 0.0, x, 1.0)
    return np.where(x != 0.0, np.exp(-1.0 / safe ** 2), 0.0)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, count: int) -> None:
        self.used += count
        if self.used > self.limit:
            raise QuadratureBudgetExceeded(f"More than {self.limit} integrand evaluations")


class HarnessManager:
    """Class to evaluate zeta functions and oscillatory integrals numerically and fit their asymptotics"""

    # Shared preparation

    @staticmethod
    def _numeric_pair(f: PowerData, g: PowerData) -> NumericPair:
        if f.is_polynomial:
            if not g.is_polynomial:
                raise InputFormatError("A fractional weight needs a fractional phase to clear against")
            return NumericPair(f, g, (1,) * f.n, 1, False)
        phase = NewtonManager.cleared(f)
        weight = ZetaManager.pull_weight(g, f.denom_vector)
        return NumericPair(phase, weight, f.denom_vector, int(np.prod(f.denom_vector)), True)

    @staticmethod
    def _orthants(pair: NumericPair, orthant: Optional[Sequence[int]]) -> List[Tuple[Tuple[int, ...], int]]:
        """Orthants to integrate with their multiplicities; mirror images of the data are merged"""
        n = pair.phase.n
        if orthant is not None:
            theta = tuple(int(t) for t in orthant)
            if pair.positive_only and any(t < 0 for t in theta):
                raise InputFormatError("Fractional exponents are only evaluated on the positive orthant")
            return [(theta, 1)]
        if pair.positive_only:
            return [((1,) * n, 1)]
        merged: Dict[Tuple, List] = {}
        for theta in itertools.product((1, -1), repeat=n):
            key = (pair.phase.orthant(theta), pair.weight.orthant(theta))
            if key in merged:
                merged[key][1] += 1
            else:
                merged[key] = [theta, 1]
        return [(theta, count) for theta, count in merged.values()]

    @staticmethod
    def _weight_hull(weight: PowerData) -> NewtonPolyhedron:
        """Newton polyhedron of the weight with the flat marker monomials included"""
        points = [tuple(e) for e in weight.exponents()] + [m.exponent for m in weight.flat_markers]
        return GeometryManager.build_polyhedron(points)

    @staticmethod
    def _pulled_cofactor(data: PowerData, rays: Sequence[Sequence[int]], levels: Sequence,
                         y: np.ndarray, x: Optional[np.ndarray] = None) -> np.ndarray:
        """data(pi(y)) / prod y_k^{levels_k} on a chart with the given skeleton"""
        matrix = np.array(rays, dtype=float)
        shift = np.array([float(v) for v in levels])
        values = np.zeros(y.shape[0])
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            if data.terms:
                exps = np.array([e for e, _ in data.terms], dtype=float)
                coeffs = np.array([float(c) for _, c in data.terms])
                pulled = exps @ matrix.T - shift[None, :]
                values = np.prod(y[:, None, :] ** pulled[None, :, :], axis=2) @ coeffs
            for marker in data.flat_markers:
                pulled = np.array(marker.exponent, dtype=float) @ matrix.T - shift
                damp = _damp(x[:, marker.axis])
                mono = np.prod(y ** pulled[None, :], axis=1)
                values = values + float(marker.scale) * np.where(damp > 0, mono * damp, 0.0)
        return values

    # Zeta functions

    @staticmethod
    @lru_cache(maxsize=16)
    def _axis_panels(order: int) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss nodes on (0, 1]: uniform panels above 1/ZETA_UNIFORM_PANELS, geometric below"""
        top = 1.0 / config.ZETA_UNIFORM_PANELS
        bounds = ([0.0] + [top * config.ZETA_GRADING ** i for i in range(config.ZETA_PANELS, 0, -1)]
                  + list(np.linspace(top, 1.0, config.ZETA_UNIFORM_PANELS)))
        nodes, weights = np.polynomial.legendre.leggauss(order)
        xs, ws = [], []
        for a, b in zip(bounds[:-1], bounds[1:]):
            xs.append(a + (b - a) * (nodes + 1.0) / 2.0)
            ws.append((b - a) / 2.0 * weights)
        return np.concatenate(xs), np.concatenate(ws)

    @classmethod
    def _axis_rule(cls, e: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Linear rule for the integral over [0, 1] of y^e H(y).

        Written as H(0)/(e+1) + sum w y^e (H(y) - H(0)), so the node y = 0 carries
        the exact singular part.
        """
        nodes, weights = cls._axis_panels(order)
        scaled = weights * nodes ** e
        origin = 1.0 / (e + 1.0) - scaled.sum()
        return np.concatenate([[0.0], nodes]), np.concatenate([[origin], scaled])

    @staticmethod
    def _contract(values: np.ndarray, rules: Sequence[Tuple[np.ndarray, np.ndarray]]) -> float:
        tensor = values.reshape([len(nodes) for nodes, _ in rules])
        for _, weights in reversed(rules):
            tensor = tensor @ weights
        return float(tensor)

    @classmethod
    def _sector_integral(cls, chart: ChartMap, pair: NumericPair, phase: PowerData, weight: PowerData,
                         phi: BumpFunction, theta: Tuple[int, ...], polyhedron_f: NewtonPolyhedron,
                         polyhedron_w: NewtonPolyhedron, s: float, part: str, order: int, budget: _Budget) -> float:
        rays = chart.cone.rays
        n = len(rays)
        lf = [polyhedron_f.support_value(a) for a in rays]
        lw = [polyhedron_w.support_value(a) for a in rays]
        exponents = [float(l) * s + float(w) + sum(a) - 1.0 for l, w, a in zip(lf, lw, rays)]
        if any(e <= -1.0 for e in exponents):
            raise ArgumentOutOfRange(f"s = {s} lies outside the convergence region of the chart {rays}")
        rules = [cls._axis_rule(e, order) for e in exponents]
        grid = np.stack(np.meshgrid(*[nodes for nodes, _ in rules], indexing='ij'), axis=-1).reshape(-1, n)
        budget.spend(grid.shape[0])

        values = np.empty(grid.shape[0])
        signs = np.array(theta, dtype=float)
        power = np.array(pair.power, dtype=float)
        for start in range(0, grid.shape[0], CHUNK):
            y = grid[start:start + CHUNK]
            x = chart.map_points(y)
            f_tilde = cls._pulled_cofactor(phase, rays, lf, y, x)
            g_tilde = cls._pulled_cofactor(weight, rays, lw, y, x)
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                modulus = np.abs(f_tilde) ** s
                if part == "plus":
                    modulus = np.where(f_tilde > 0, modulus, 0.0)
                elif part == "minus":
                    modulus = np.where(f_tilde < 0, modulus, 0.0)
                density = modulus * g_tilde * phi(signs * x ** power)
            density[~np.isfinite(density)] = 0.0
            values[start:start + CHUNK] = density
        return cls._contract(values, rules)

    @classmethod
    def eval_zeta(cls, f: PowerData, g: Optional[PowerData] = None, phi: Optional[BumpFunction] = None,
                  s: float = 0.0, orthant: Optional[Sequence[int]] = None, part: str = "abs",
                  budget: Optional[int] = None) -> QuadratureResult:
        """
        Evaluate Z(s) = integral of |f|^s g phi (or Z_+ / Z_- with part = "plus" / "minus").

        The box is tiled by the toric charts of a unimodular fan refining Gamma_+(f) and the
        weight hull; on each chart the integrand is a monomial times a smooth factor, and every
        axis is integrated with the endpoint subtraction rule of _axis_rule.

        Args:
            f: phase
            g: weight, flat markers included numerically
            phi: bump amplitude
            s: real point of the convergence region
            orthant: restrict to one orthant (signs), all orthants when None
            part: "abs", "plus" or "minus"
            budget: integrand evaluations allowed

        Returns:
            QuadratureResult with the difference to a coarser rule as error estimate
        """
        g = g if g is not None else PowerData.unit(f.n)
        phi = phi or BumpFunction()
        if f.n > 3:
            raise DimensionTooLarge(f"Zeta quadrature supports n <= 3, got n = {f.n}")
        pair = cls._numeric_pair(f, g)
        polyhedron_f = NewtonManager.newton_polyhedron(pair.phase.nonflat())
        polyhedron_w = cls._weight_hull(pair.weight)
        fan = FanManager.resolution_fan(polyhedron_f, polyhedron_w)
        order = config.ZETA_GAUSS_ORDER[f.n - 1]
        coarse_order = max(order // 2, 2)
        tracker = _Budget(budget or config.QUAD_BUDGET)

        fine = coarse = 0.0
        for theta, count in cls._orthants(pair, orthant):
            phase = pair.phase.orthant(theta)
            weight = pair.weight.orthant(theta)
            for cone in fan.cones:
                chart = FanManager.chart(cone)
                args = (chart, pair, phase, weight, phi, theta, polyhedron_f, polyhedron_w, s, part)
                fine += count * cls._sector_integral(*args, order, tracker)
                coarse += count * cls._sector_integral(*args, coarse_order, tracker)
        value = fine * pair.jacobian
        error = abs(fine - coarse) * pair.jacobian
        logger.debug(f"Z({s:.6g}) = {value:.10g} +- {error:.2g} over {len(fan.cones)} chart(s)")
        return QuadratureResult(value, error, tracker.used)

    @classmethod
    def zeta_samples(cls, f: PowerData, g: Optional[PowerData], phi: Optional[BumpFunction], pole: float,
                     count: int = config.MIN_POLE_SAMPLES, decades: Tuple[float, float] = (-4.0, -1.0),
                     orthant: Optional[Sequence[int]] = None) -> List[Tuple[float, float]]:
        """Z(s) at s = pole + 10^k for k log-spaced over the given decades"""
        offsets = np.logspace(decades[0], decades[1], count)
        return [(pole + delta, cls.eval_zeta(f, g, phi, pole + delta, orthant).value) for delta in offsets]

    # Oscillatory integrals

    @staticmethod
    def _slice(f: PowerData, fixed: Sequence[float]) -> PhaseSlice:
        """The phase along the last axis with the leading coordinates fixed"""
        k = len(fixed)
        collected: Dict[float, float] = {}
        for exp, coeff in f.terms:
            real = f.real_exponent(exp)
            factor = float(coeff) * float(np.prod([x ** float(e) for x, e in zip(fixed, real[:k])]))
            collected[float(real[k])] = collected.get(float(real[k]), 0.0) + factor
        flat = []
        for marker in f.flat_markers:
            factor = float(marker.scale) * float(np.prod([x ** e for x, e in zip(fixed, marker.exponent[:k])]))
            if marker.axis == k:
                flat.append((factor, float(marker.exponent[k])))
            else:
                damp = math.exp(-1.0 / fixed[marker.axis] ** 2) if fixed[marker.axis] != 0 else 0.0
                key = float(marker.exponent[k])
                collected[key] = collected.get(key, 0.0) + factor * damp
        exps = np.array(sorted(collected), dtype=float)
        coeffs = np.array([collected[e] for e in sorted(collected)], dtype=float)
        return PhaseSlice(exps, coeffs, flat)

    @staticmethod
    def _gauss_panel(phase: PhaseSlice, amplitude: Callable, lo: float, hi: float, t: float,
                     order: int) -> complex:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        x = lo + (hi - lo) * (nodes + 1.0) / 2.0
        return complex(np.sum(weights * np.exp(1j * t * phase.value(x)) * amplitude(x)) * (hi - lo) / 2.0)

    @staticmethod
    def _filon_panel(phase: PhaseSlice, amplitude: Callable, lo: float, hi: float, t: float,
                     order: int) -> complex:
        """
        Filon-Legendre rule on a panel where the phase is monotone.

        With u = f(x) the panel integral becomes half * e^{it c} * int_{-1}^{1} e^{i t half v} h(v) dv;
        h is expanded in Legendre polynomials whose Fourier moments are 2 i^k j_k(t half).
        """
        nodes, weights = np.polynomial.legendre.leggauss(order)
        f_lo, f_hi = phase.value(np.array([lo, hi]))
        centre, half = (f_lo + f_hi) / 2.0, (f_hi - f_lo) / 2.0
        targets = centre + half * nodes
        x = lo + (hi - lo) * (nodes + 1.0) / 2.0
        for _ in range(config.FILON_NEWTON_STEPS):
            x = np.clip(x - (phase.value(x) - targets) / phase.slope(x), lo, hi)
        if np.max(np.abs(phase.value(x) - targets)) > 1e-10 * max(1.0, abs(half)):
            return complex(np.nan)
        h = amplitude(x) / phase.slope(x)
        vander = np.polynomial.legendre.legvander(nodes, order - 1)
        k = np.arange(order)
        coeffs = (2 * k + 1) / 2.0 * (vander.T @ (weights * h))
        omega = t * half
        moments = 2.0 * (1j ** k) * special.spherical_jn(k, abs(omega))
        if omega < 0:
            moments = np.conj(moments)
        return complex(half * np.exp(1j * t * centre) * (coeffs @ moments))

    @classmethod
    def _panel(cls, phase: PhaseSlice, amplitude: Callable, lo: float, hi: float, t: float,
               budget: _Budget) -> Tuple[complex, float]:
        order = config.GAUSS_ORDER
        nodes, _ = np.polynomial.legendre.leggauss(order)
        sample_points = np.concatenate([[lo, hi], lo + (hi - lo) * (nodes + 1.0) / 2.0])
        values = phase.value(sample_points)
        variation = float(np.max(values) - np.min(values))
        budget.spend(3 * order)
        if t * variation > config.PHASE_VARIATION_SWITCH:
            slopes = phase.slope(sample_points[2:])
            monotone = np.all(np.isfinite(slopes)) and (np.all(slopes > 0) or np.all(slopes < 0))
            if monotone:
                high = cls._filon_panel(phase, amplitude, lo, hi, t, order)
                low = cls._filon_panel(phase, amplitude, lo, hi, t, order - 4)
                if np.isfinite(high) and np.isfinite(low):
                    return high, abs(high - low)
        high = cls._gauss_panel(phase, amplitude, lo, hi, t, order)
        low = cls._gauss_panel(phase, amplitude, lo, hi, t, order // 2)
        return high, abs(high - low)

    @classmethod
    def _oscillatory_1d(cls, phase: PhaseSlice, amplitude: Callable, a: float, b: float, t: float,
                        tol: float, budget: _Budget) -> Tuple[complex, float]:
        """Adaptive bisection until every panel meets its share of the absolute tolerance"""
        if b <= a:
            return 0j, 0.0
        total, error = 0j, 0.0
        stack = [(a, b, 0)]
        while stack:
            lo, hi, depth = stack.pop()
            estimate, err = cls._panel(phase, amplitude, lo, hi, t, budget)
            if err <= tol * (hi - lo) / (b - a) or depth >= config.OSC_MAX_DEPTH:
                if depth >= config.OSC_MAX_DEPTH and err > tol:
                    logger.warning(f"⚠️ Panel [{lo:.3g}, {hi:.3g}] hit the bisection depth with error {err:.2g}")
                total += estimate
                error += err
            else:
                mid = (lo + hi) / 2.0
                stack.append((lo, mid, depth + 1))
                stack.append((mid, hi, depth + 1))
        return total, error

    @staticmethod
    def _absolute_mass(g: PowerData, phi: BumpFunction, positive_only: bool) -> float:
        """Integral of |g phi| by a tensor Gauss rule"""
        nodes, weights = np.polynomial.legendre.leggauss(config.GAUSS_ORDER)
        edges = np.linspace(0.0 if positive_only else -phi.radius, phi.radius, 9)
        xs = np.concatenate([a + (b - a) * (nodes + 1.0) / 2.0 for a, b in zip(edges[:-1], edges[1:])])
        ws = np.concatenate([(b - a) / 2.0 * weights for a, b in zip(edges[:-1], edges[1:])])
        grid = np.stack(np.meshgrid(*[xs] * g.n, indexing='ij'), axis=-1).reshape(-1, g.n)
        values = np.abs(g.evaluate(grid) * phi(grid)).reshape([len(xs)] * g.n)
        for _ in range(g.n):
            values = values @ ws
        return float(values)

    @classmethod
    def eval_oscillatory(cls, f: PowerData, g: Optional[PowerData] = None, phi: Optional[BumpFunction] = None,
                         t: float = 1.0, rel_tol: Optional[float] = None, budget: Optional[int] = None) -> QuadratureResult:
        """
        Evaluate I(t) = integral of exp(i t f) g phi for n <= 2.

        The inner axis uses adaptive panels, Filon-Legendre where t times the phase variation
        exceeds PHASE_VARIATION_SWITCH and the phase is monotone, Gauss-Legendre otherwise;
        the outer axis is integrated by scipy's quad_vec. Fractional exponents restrict the
        integral to the positive orthant.
        """
        g = g if g is not None else PowerData.unit(f.n)
        phi = phi or BumpFunction()
        if f.n > 2:
            raise DimensionTooLarge(f"Oscillatory quadrature supports n <= 2, got n = {f.n}")
        positive_only = not (f.is_polynomial and g.is_polynomial)
        tol = (rel_tol or config.OSC_RELATIVE_TOL) * cls._absolute_mass(g, phi, positive_only)
        tracker = _Budget(budget or config.QUAD_BUDGET)
        radius = phi.radius
        lower = 0.0 if positive_only else -radius

        if f.n == 1:
            def amplitude(x):
                points = x[:, None]
                return g.evaluate(points) * phi(points)
            value, error = cls._oscillatory_1d(cls._slice(f, ()), amplitude, lower, radius, t, tol, tracker)
        else:
            def inner(x1):
                width = phi.halfwidth([x1])
                if width <= 0:
                    return np.zeros(2)

                def amplitude(x2):
                    points = np.column_stack([np.full_like(x2, x1), x2])
                    return g.evaluate(points) * phi(points)
                part, _ = cls._oscillatory_1d(cls._slice(f, (x1,)), amplitude, 0.0 if positive_only else -width,
                                              width, t, tol / (2.0 * radius), tracker)
                return np.array([part.real, part.imag])
            result, outer_error = integrate.quad_vec(inner, lower, radius, epsabs=tol, epsrel=0.0,
                                                     limit=config.OSC_OUTER_LIMIT)
            value, error = complex(result[0], result[1]), float(outer_error)
        logger.debug(f"I({t:.6g}) = {value:.6g} +- {error:.2g} with {tracker.used} evaluations")
        return QuadratureResult(value, error, tracker.used)

    @classmethod
    def decay_samples(cls, f: PowerData, g: Optional[PowerData], phi: Optional[BumpFunction],
                      t_range: Tuple[float, float] = (10.0, 1e4), count: int = config.MIN_DECAY_SAMPLES,
                      rel_tol: Optional[float] = None) -> List[Tuple[float, complex]]:
        times = np.logspace(math.log10(t_range[0]), math.log10(t_range[1]), count)
        return [(float(t), cls.eval_oscillatory(f, g, phi, float(t), rel_tol).value) for t in times]

    # Fits

    @staticmethod
    def _flag(result: FitResult, strict: bool, what: str) -> FitResult:
        if result.poor:
            message = f"{what} residual {result.residual:.3g} above {config.FIT_RESIDUAL_THRESHOLD}"
            if strict:
                raise PoorFit(message, result)
            logger.warning(f"⚠️ {message}")
        return result

    @classmethod
    def fit_pole(cls, samples: Sequence[Tuple[float, float]], pole, strict: bool = False) -> FitResult:
        """
        Fit Z(s) ~ c (s - s*)^(-rho) near a known pole s*.

        Args:
            samples: (s, Z(s)) pairs with s > s*
            pole: the pole s*
            strict: raise PoorFit instead of flagging

        Returns:
            FitResult with exponent = fitted slope, log_power = rounded order rho and c
            read as the intercept of (s - s*)^rho Z(s) against s - s*
        """
        if len(samples) < config.MIN_POLE_SAMPLES:
            raise InsufficientSamples(f"fit_pole needs {config.MIN_POLE_SAMPLES} samples, got {len(samples)}")
        s = np.array([p[0] for p in samples], dtype=float)
        z = np.array([p[1] for p in samples], dtype=float)
        delta = s - float(pole)
        if np.any(delta <= 0):
            raise ArgumentOutOfRange("Every sample must lie to the right of the pole")
        design = np.column_stack([np.ones_like(delta), np.log(delta)])
        coef, _, _, _ = linalg.lstsq(design, np.log(np.abs(z)))
        residual = float(np.sqrt(np.mean((design @ coef - np.log(np.abs(z))) ** 2)))
        rho = int(round(-coef[1]))
        scaled = z * delta ** rho
        line, _, _, _ = linalg.lstsq(np.column_stack([np.ones_like(delta), delta]), scaled)
        result = FitResult(float(coef[1]), rho, float(line[0]), residual, (float(delta.min()), float(delta.max())),
                           residual > config.FIT_RESIDUAL_THRESHOLD)
        logger.info(f"📉 Pole fit: order {rho}, coefficient {result.coefficient:.6g}, residual {residual:.2g}")
        return cls._flag(result, strict, "Pole fit")

    @classmethod
    def locate_pole(cls, samples: Sequence[Tuple[float, float]], order: int, strict: bool = False) -> FitResult:
        """Estimate an unknown pole of known order from the zero of |Z|^(-1/order)"""
        if len(samples) < config.MIN_POLE_SAMPLES:
            raise InsufficientSamples(f"locate_pole needs {config.MIN_POLE_SAMPLES} samples, got {len(samples)}")
        s = np.array([p[0] for p in samples], dtype=float)
        u = np.abs(np.array([p[1] for p in samples], dtype=float)) ** (-1.0 / order)
        quadratic = np.polyfit(s, u, 2)
        roots = [r.real for r in np.roots(quadratic) if abs(r.imag) < 1e-12 and r.real < s.min()]
        if roots:
            location = max(roots)
            fitted = np.polyval(quadratic, s)
            slope = np.polyval(np.polyder(quadratic), location)
        else:
            linear = np.polyfit(s, u, 1)
            location = -linear[1] / linear[0]
            fitted = np.polyval(linear, s)
            slope = linear[0]
        residual = float(np.sqrt(np.mean(((fitted - u) / u) ** 2)))
        coefficient = float(slope) ** (-order) if slope > 0 else float('nan')
        result = FitResult(-float(order), order, coefficient, residual, (float(s.min()), float(s.max())),
                           residual > config.FIT_RESIDUAL_THRESHOLD, location=float(location))
        logger.info(f"📍 Pole located at {location:.6g} (order {order})")
        return cls._flag(result, strict, "Pole location")

    @classmethod
    def fit_decay(cls, samples: Sequence[Tuple[float, complex]], strict: bool = False) -> FitResult:
        """
        Fit |I(t)| ~ c t^beta (log t)^k.

        The log power comes from the log log t regressor only when the design matrix is
        well conditioned; otherwise it is reported as None (indeterminate).
        """
        if len(samples) < config.MIN_DECAY_SAMPLES:
            raise InsufficientSamples(f"fit_decay needs {config.MIN_DECAY_SAMPLES} samples, got {len(samples)}")
        t = np.array([p[0] for p in samples], dtype=float)
        if t.min() <= 1.0 or t.max() / t.min() < 100.0:
            raise InsufficientSamples("fit_decay needs t > 1 spread over at least two decades")
        target = np.log(np.abs(np.array([p[1] for p in samples], dtype=complex)))
        log_t = np.log(t)
        plain = np.column_stack([np.ones_like(t), log_t])
        with_log = np.column_stack([plain, np.log(log_t)])
        scaled = with_log / np.linalg.norm(with_log, axis=0)
        condition = float(np.linalg.cond(scaled))
        if condition <= config.FIT_CONDITION_LIMIT:
            coef, _, _, _ = linalg.lstsq(with_log, target)
            fitted = with_log @ coef
            log_power = max(int(round(coef[2])), 0)
        else:
            coef, _, _, _ = linalg.lstsq(plain, target)
            fitted = plain @ coef
            log_power = None
        residual = float(np.sqrt(np.mean((fitted - target) ** 2)))
        result = FitResult(float(coef[1]), log_power, float(np.exp(coef[0])), residual, (float(t.min()), float(t.max())),
                           residual > config.FIT_RESIDUAL_THRESHOLD, condition, config.DECAY_EXPONENT_TOLERANCE)
        logger.info(f"📉 Decay fit: exponent {result.exponent:.4f}, log power {log_power}, residual {residual:.2g}")
        return cls._flag(result, strict, "Decay fit")

    @classmethod
    def leading_coefficient(cls, samples: Sequence[Tuple[float, complex]], lam, rho: int) -> FitResult:
        """B from I(t) t^lam / (log t)^(rho-1) regressed on the first correction term"""
        t = np.array([p[0] for p in samples], dtype=float)
        values = np.array([p[1] for p in samples], dtype=complex)
        lam = float(lam)
        scaled = values * t ** lam / np.log(t) ** (rho - 1)
        correction = 1.0 / np.log(t) if rho > 1 else 1.0 / t
        design = np.column_stack([np.ones_like(t), correction]).astype(complex)
        coef, _, _, _ = linalg.lstsq(design, scaled)
        residual = float(np.sqrt(np.mean(np.abs(design @ coef - scaled) ** 2)) / max(abs(coef[0]), 1e-300))
        return FitResult(-lam, rho - 1, complex(coef[0]), residual, (float(t.min()), float(t.max())),
                         residual > config.FIT_RESIDUAL_THRESHOLD)

    # Chart coefficients

    @staticmethod
    @lru_cache(maxsize=8)
    def _half_line_panels(order: int) -> Tuple[np.ndarray, np.ndarray, float]:
        """Nodes on (eps, 1] graded towards 0 and the image of the same under y = 1/v"""
        count = config.CHART_INTEGRAL_PANELS // 2
        bounds = [config.ZETA_GRADING ** i for i in range(count, -1, -1)]
        nodes, weights = np.polynomial.legendre.leggauss(config.GAUSS_ORDER)
        xs, ws = [], []
        for a, b in zip(bounds[:-1], bounds[1:]):
            xs.append(a + (b - a) * (nodes + 1.0) / 2.0)
            ws.append((b - a) / 2.0 * weights)
        return np.concatenate(xs), np.concatenate(ws), bounds[0]

    @classmethod
    def _half_line_rule(cls, e: float) -> Tuple[np.ndarray, np.ndarray]:
        """Linear rule for the integral over (0, inf) of y^e H(y); H(0) carries the piece below eps"""
        v, w, eps = cls._half_line_panels(config.GAUSS_ORDER)
        lower = (v, w * v ** e)
        upper = (1.0 / v, w * v ** (-e - 2.0))
        origin = eps ** (e + 1.0) / (e + 1.0)
        return (np.concatenate([[0.0], lower[0], upper[0]]),
                np.concatenate([[origin], lower[1], upper[1]]))

    @classmethod
    def _orbit_integral(cls, setup, contribution, phi: BumpFunction, lam: float,
                        orthants: Sequence[Tuple[Tuple[int, ...], int]]) -> Tuple[float, float]:
        """(C+, C-) contributed by the torus orbit of the cone spanned by the achieving rays"""
        cone = contribution.cone
        rays = cone.rays
        n = len(rays)
        chart = FanManager.chart(cone)
        achieving = contribution.achieving
        free = [k for k in range(n) if k not in achieving]
        f_tau = NewtonManager.gamma_part(setup.phase.nonflat(), contribution.tau).data
        g_gamma = NewtonManager.gamma_part(setup.weight_support, contribution.gamma).data
        scale = 1.0
        for k in achieving:
            scale /= float(setup.phase_level(rays[k]))

        plus = minus = 0.0
        for theta, count in orthants:
            f_theta = f_tau.orthant(theta)
            g_theta = g_gamma.orthant(theta)
            lf = [min(sum(a * x for a, x in zip(ray, e)) for e, _ in f_theta.terms) for ray in rays]
            lg = [min(sum(a * x for a, x in zip(ray, e)) for e, _ in g_theta.terms) for ray in rays]
            exponents = [-lam * lf[k] + lg[k] + sum(rays[k]) - 1.0 for k in free]
            if any(e <= -1.0 for e in exponents):
                raise InvariantViolation(f"Chart integral over the orbit of {rays} diverges at the origin")
            rules = [cls._half_line_rule(e) for e in exponents]
            if rules:
                free_grid = np.stack(np.meshgrid(*[nodes for nodes, _ in rules], indexing='ij'), axis=-1)
                free_grid = free_grid.reshape(-1, len(free))
            else:
                free_grid = np.zeros((1, 0))
            y = np.zeros((free_grid.shape[0], n))
            y[:, free] = free_grid
            x = chart.map_points(y)
            f_tilde = cls._pulled_cofactor(f_theta, rays, lf, y)
            g_tilde = cls._pulled_cofactor(g_theta, rays, lg, y)
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                common = g_tilde * phi(np.array(theta, dtype=float) * x)
                positive = np.where(f_tilde > 0, np.abs(f_tilde) ** (-lam), 0.0) * common
                negative = np.where(f_tilde < 0, np.abs(f_tilde) ** (-lam), 0.0) * common
            positive[~np.isfinite(positive)] = 0.0
            negative[~np.isfinite(negative)] = 0.0
            if rules:
                plus += count * scale * cls._contract(positive, rules)
                minus += count * scale * cls._contract(negative, rules)
            else:
                plus += count * scale * float(positive[0])
                minus += count * scale * float(negative[0])
        return plus, minus

    @classmethod
    def chart_coefficient_quadrature(cls, f: PowerData, g: Optional[PowerData] = None,
                                     phi: Optional[BumpFunction] = None, orthant: Optional[Sequence[int]] = None,
                                     localized: bool = False, cone=None) -> CoefficientReport:
        """
        Leading coefficients (C+, C-, B) from the chart integrals over the principal orbits.

        One chart per orbit is integrated; when several principal cones share an orbit the
        others are integrated too and their relative spread is reported. Passing a cone
        makes it the representative of its orbit.

        Raises:
            GatesNotHeld: gate (iv) of the ledger is not Holds
            NoncompactPrincipalFaceWithoutLocalization: a principal face is unbounded and
                localized is False
        """
        g = g if g is not None else PowerData.unit(f.n)
        phi = phi or BumpFunction()
        if f.n > 3:
            raise DimensionTooLarge(f"Chart quadrature supports n <= 3, got n = {f.n}")
        setup = ZetaManager.prepare(f, g)
        if setup.puiseux is not None or setup.weight_mode == "monomial":
            raise GatesNotHeld("Chart coefficients need a polynomial phase and a weight with a Newton polyhedron")
        ledger = ZetaManager.hypothesis_ledger(f, g, setup)
        if ledger.gate_iv != HOLDS:
            raise GatesNotHeld(f"Gate (iv) is {ledger.gate_iv}: the leading coefficient is not controlled")
        lead = ZetaManager.leading_pole_for(setup)
        lam = 1 / setup.pair.d
        pair = NumericPair(setup.phase, setup.weight_support, (1,) * f.n, 1, False)
        orthants = cls._orthants(pair, orthant)

        orbits: Dict[frozenset, List] = {}
        for contribution in lead.principal_cones:
            key = frozenset(contribution.cone.rays[k] for k in contribution.achieving)
            orbits.setdefault(key, []).append(contribution)

        c_plus = c_minus = 0.0
        spread = 0.0
        for members in orbits.values():
            if cone is not None:
                members = sorted(members, key=lambda c: c.cone.rays != tuple(cone.rays))
            first = members[0]
            if not first.tau.compact and not localized:
                raise NoncompactPrincipalFaceWithoutLocalization(
                    f"Principal face {first.tau.index} is unbounded; pass localized=True to integrate phi along it")
            plus, minus = cls._orbit_integral(setup, first, phi, float(lam), orthants)
            for other in members[1:]:
                other_plus, other_minus = cls._orbit_integral(setup, other, phi, float(lam), orthants)
                size = max(abs(plus) + abs(minus), 1e-300)
                spread = max(spread, (abs(other_plus - plus) + abs(other_minus - minus)) / size)
            c_plus += plus
            c_minus += minus
        if spread > config.SIGMA_AGREEMENT:
            logger.warning(f"⚠️ Charts of one orbit disagree by {spread:.2%}")
        b_value, re_b = ZetaManager.mellin_coefficient(c_plus, c_minus, lam, setup.pair.m)
        report = CoefficientReport(c_plus, c_minus, b_value, re_b, lam, setup.pair.m,
                                   method="chart quadrature", sigma_spread=spread)
        logger.info(f"🧮 Chart quadrature over {len(orbits)} orbit(s): C+ = {c_plus:.6g}, C- = {c_minus:.6g}")
        return report
