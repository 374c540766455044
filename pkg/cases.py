"""
Named cases for the newton-osc toolkit
Handles the worked examples behind the `example` command: phase/weight data, the exact
invariants they are known to have, and the numeric checks that go with them
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from scipy import integrate

from errors import InputFormatError
from numeric_harness import BumpFunction
from pair_metrics import PairManager
from power_data import FlatMarker, NewtonManager, PowerData
from utils import rat_str
from zeta_report import ZetaManager

logger = logging.getLogger('newton_osc.cases')

Reference = Callable[[BumpFunction], float]


@dataclass(frozen=True)
class NumericPlan:
    """
    One numeric check of a case.

    kind "decay" fits |I(t)| over t_range; kind "zeta" samples Z(s) to the right of pole
    (restricted to orthant when given) and fits the pole order, or locates the pole when
    locate is set. reference, when present, is the exact leading coefficient for the bump.
    """
    kind: str
    expected_exponent: Fraction
    order: int = 1
    t_range: Tuple[float, float] = (10.0, 1e4)
    rel_tol: Optional[float] = None
    orthant: Optional[Tuple[int, ...]] = None
    decades: Tuple[float, float] = (-4.0, -1.0)
    locate: bool = False
    tolerance: float = 0.05
    reference: Optional[Reference] = None

    def to_dict(self) -> dict:
        result = {"kind": self.kind, "expectedExponent": rat_str(self.expected_exponent), "order": self.order}
        if self.kind == "decay":
            result["tRange"] = list(self.t_range)
        else:
            result["decades"] = list(self.decades)
            result["orthant"] = list(self.orthant) if self.orthant else None
            result["locate"] = self.locate
        return result


@dataclass(frozen=True)
class Case:
    key: str
    description: str
    f: PowerData
    g: Optional[PowerData]
    expected: Dict[str, object]
    plans: Tuple[NumericPlan, ...] = ()
    unweighted: bool = False
    params: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.key,
            "description": self.description,
            "params": dict(self.params),
            "f": self.f.to_dict(),
            "g": self.g.to_dict() if self.g is not None else None,
            "expected": {k: rat_str(v) if isinstance(v, Fraction) else v for k, v in self.expected.items()},
            "numericPlans": [plan.to_dict() for plan in self.plans],
        }


def _axis_integral(phi: BumpFunction, n: int, axis: int, profile: Callable[[float], float]) -> float:
    """Integral over (0, R) of profile(y) * phi(y e_axis)"""
    def integrand(y):
        point = [0.0] * n
        point[axis] = y
        return profile(y) * float(phi([point])[0])
    value, _ = integrate.quad(integrand, 0.0, phi.radius, limit=200)
    return value


def _damped(power: int) -> Callable[[float], float]:
    return lambda y: y ** power * math.exp(-1.0 / (y * y)) if y > 0 else 0.0


class CaseManager:
    """Class to build the named worked examples"""

    @staticmethod
    def first_example(p: int = 1, q: int = 2, c: int = 1, key: str = "15.1") -> Case:
        """f = x1^4, g = c x1^2p x2^2p + x1^2q x2^2q exp(-1/x2^2)"""
        f = PowerData.from_terms(2, {(4, 0): 1})
        terms = {(2 * p, 2 * p): c} if c else {}
        g = PowerData.from_terms(2, terms, None, [FlatMarker((2 * q, 2 * q), 1)])
        leading = 2 * q + 1 if (c == 0 or p > q) else 2 * p + 1
        expected = {"d": Fraction(4, 2 * p + 1) if c else Fraction(4, 2 * q + 1), "m": 1,
                    "hatE": bool(c) and p <= q}

        def reference(phi: BumpFunction) -> float:
            total = 0.0
            if c and 2 * p + 1 == leading:
                total += c * _axis_integral(phi, 2, 1, lambda y: y ** (2 * p)) / 4.0
            if 2 * q + 1 == leading:
                total += _axis_integral(phi, 2, 1, _damped(2 * q)) / 4.0
            return total

        plan = NumericPlan("zeta", Fraction(-leading, 4), 1, orthant=(1, 1), decades=(-3.0, -1.0),
                           locate=True, tolerance=0.02, reference=reference)
        description = "flat weight: the pole follows the marker" if leading != 2 * p + 1 else "weight in the hat-E class"
        return Case(key, f"x1^4 against a weight with a flat term ({description})", f, g, expected, (plan,),
                    params={"p": p, "q": q, "c": c})

    @staticmethod
    def second_example(p: int = 2, q: int = 1) -> Case:
        """f = x1^4 + x2^4, g = x1^2 + x1^p x2^q exp(-1/x3^2)"""
        f = PowerData.from_terms(3, {(4, 0, 0): 1, (0, 4, 0): 1})
        g = PowerData.from_terms(3, {(2, 0, 0): 1}, None, [FlatMarker((p, q, 0), 2)])
        expected = {"d": Fraction(1), "m": 1, "hatE": p >= 2}

        def reference(phi: BumpFunction) -> float:
            return (math.pi / (2.0 * math.sqrt(2.0))) * _axis_integral(phi, 3, 2, lambda y: 1.0) / 4.0

        plan = NumericPlan("zeta", Fraction(-1), 1, orthant=(1, 1, 1), decades=(-4.0, -1.5), tolerance=0.01,
                           reference=reference)
        return Case("15.2", "x1^4 + x2^4 with a flat term in the third variable", f, g, expected, (plan,),
                    params={"p": p, "q": q})

    @staticmethod
    def third_example() -> Case:
        """f = (x1 x2 x3)^4, g = x1^4 x2^4 x3^2 + x1^2 x2^2 x3^4 exp(-1/x3^2)"""
        f = PowerData.monomial((4, 4, 4))
        g = PowerData.from_terms(3, {(4, 4, 2): 1}, None, [FlatMarker((2, 2, 4), 2)])
        expected = {"d": Fraction(4, 3), "m": 1, "hatE": False, "trueOrder": 2}

        def reference(phi: BumpFunction) -> float:
            return _axis_integral(phi, 3, 2, _damped(1)) / 16.0

        plan = NumericPlan("zeta", Fraction(-3, 4), 2, orthant=(1, 1, 1), decades=(-5.0, -2.0), tolerance=0.05,
                           reference=reference)
        return Case("15.3", "monomial phase where a flat term raises the pole order", f, g, expected, (plan,))

    @staticmethod
    def saddle_counterexample() -> Case:
        f = PowerData.monomial((1, 1))
        g = PowerData.monomial((0, 2))
        plan = NumericPlan("decay", Fraction(-3), t_range=(10.0, 1e3), rel_tol=1e-13, tolerance=0.1)
        return Case("remark4.6", "x1 x2 with weight x2^2: decay t^-3 beyond the polyhedral prediction",
                    f, g, {"d": Fraction(1), "m": 1, "status": "PredictionOnly"}, (plan,))

    @staticmethod
    def flat_phase() -> Case:
        f = PowerData.from_terms(2, {(2, 0): 1}, None, [FlatMarker((0, 0), 1)])
        return Case("remark3.10", "x1^2 + exp(-1/x2^2): Newton data of a phase with a flat part",
                    f, None, {"d": Fraction(2), "m": 1, "fTau": "1*x1^2"}, unweighted=True)

    @staticmethod
    def fresnel() -> Case:
        f = PowerData.monomial((2,))
        plan = NumericPlan("decay", Fraction(-1, 2), tolerance=0.01)
        return Case("fresnel", "x^2 in one variable", f, None, {"d": Fraction(2), "m": 1}, (plan,))

    @staticmethod
    def product_square() -> Case:
        f = PowerData.monomial((2, 2))
        plans = (
            NumericPlan("zeta", Fraction(-1, 2), 2, decades=(-4.0, -1.5), tolerance=0.01,
                        reference=lambda phi: phi.at_origin),
            NumericPlan("decay", Fraction(-1, 2), 2, t_range=(10.0, 1e4), tolerance=0.05),
        )
        return Case("x1sq-x2sq", "x1^2 x2^2: double pole with coefficient phi(0)", f, None,
                    {"d": Fraction(2), "m": 2}, plans)

    BUILDERS = {
        "15.1": lambda params: CaseManager.first_example(**params),
        "15.1-flat": lambda params: CaseManager.first_example(**{"p": 2, "q": 1, **params}, key="15.1-flat"),
        "15.2": lambda params: CaseManager.second_example(**params),
        "15.3": lambda params: CaseManager.third_example(**params),
        "remark4.6": lambda params: CaseManager.saddle_counterexample(**params),
        "remark3.10": lambda params: CaseManager.flat_phase(**params),
        "fresnel": lambda params: CaseManager.fresnel(**params),
        "x1sq-x2sq": lambda params: CaseManager.product_square(**params),
    }

    @classmethod
    def names(cls):
        return sorted(cls.BUILDERS)

    @classmethod
    def build(cls, key: str, params: Optional[Dict[str, int]] = None) -> Case:
        """
        Build a named case.

        Args:
            key: case id, one of names()
            params: integer parameters (p, q, c for 15.1; p, q for 15.2)

        Returns:
            Case
        """
        if key not in cls.BUILDERS:
            raise InputFormatError(f"Unknown example {key!r}; choose from {', '.join(cls.names())}")
        try:
            case = cls.BUILDERS[key](params or {})
        except TypeError as e:
            raise InputFormatError(f"Bad parameters {params} for example {key}: {e}") from e
        logger.info(f"📚 Example {key}: f = {case.f}" + (f", g = {case.g}" if case.g is not None else ""))
        return case

    @staticmethod
    def parse_params(text: Optional[str]) -> Dict[str, int]:
        """'p=2,q=1' -> {'p': 2, 'q': 1}"""
        if not text:
            return {}
        params = {}
        for item in text.split(","):
            name, sep, value = item.partition("=")
            if not sep:
                raise InputFormatError(f"Parameter {item!r} is not of the form name=value")
            try:
                params[name.strip()] = int(value)
            except ValueError as e:
                raise InputFormatError(f"Parameter {name} must be an integer") from e
        return params

    @staticmethod
    def check_invariants(case: Case) -> Dict[str, dict]:
        """Exact invariants of the case against its known values"""
        if case.unweighted:
            metrics = PairManager.unweighted_metrics(case.f.nonflat())
            computed = {"d": metrics.d, "m": metrics.m, "fTau": str(metrics.tau_part)}
        else:
            g = case.g if case.g is not None else PowerData.unit(case.f.n)
            setup = ZetaManager.prepare(case.f, g)
            computed = {"d": setup.pair.d, "m": setup.pair.m}
            if "hatE" in case.expected:
                computed["hatE"] = NewtonManager.is_hat_e(g)
        checks = {}
        for name, value in computed.items():
            expected = case.expected.get(name)
            shown = rat_str(value) if isinstance(value, Fraction) else value
            checks[name] = {"expected": rat_str(expected) if isinstance(expected, Fraction) else expected,
                            "computed": shown, "match": expected == value}
            if expected != value:
                logger.warning(f"⚠️ Example {case.key}: {name} = {shown}, expected {checks[name]['expected']}")
        return checks
