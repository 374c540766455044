"""
Commands module for the newton-osc toolkit
Handles the analyze, verify and example commands and turns errors into JSON bodies
"""
import logging
import os
from typing import Dict, Optional, Sequence, Tuple

import config
from cases import Case, CaseManager, NumericPlan
from charts import ChartManager
from data_manager import DataManager
from errors import DimensionTooLarge, NewtonOscError, PhaseWithoutFiniteDistance
from numeric_harness import BumpFunction, FitResult, HarnessManager
from pair_metrics import PairManager
from power_data import NewtonManager, PowerData
from utils import approx, rat_str
from zeta_report import HOLDS, CoefficientReport, ZetaManager

logger = logging.getLogger('newton_osc.commands')

# Export the process_command function at the module level
__all__ = ['process_command', 'analyze', 'verify', 'example']

COEFFICIENT_TOLERANCE = 0.05  # relative gap allowed between fitted and predicted B


def _permute(f: PowerData, g: Optional[PowerData], permutation: Optional[Sequence[int]]):
    if permutation is None:
        return f, g
    logger.info(f"🔀 Permuting axes by {[j + 1 for j in permutation]}")
    return f.permuted(permutation), g.permuted(permutation) if g is not None else None


def analyze(f: PowerData, g: Optional[PowerData] = None, permutation: Optional[Sequence[int]] = None,
            radius: float = config.DEFAULT_BUMP_RADIUS) -> Dict:
    """
    Symbolic pipeline: pair invariants, fan, pole report, ledger and verdict.

    Args:
        f: phase
        g: weight, the unit weight when None
        permutation: optional axis permutation applied to both
        radius: bump radius, only phi(0) enters the exact coefficients

    Returns:
        Report body
    """
    f, g = _permute(f, g, permutation)
    weight = g if g is not None else PowerData.unit(f.n)
    setup = ZetaManager.prepare(f, weight)
    phi = BumpFunction(radius)

    body = {
        "f": f.to_dict(),
        "g": weight.to_dict(),
        "flags": {
            "fConvenient": NewtonManager.is_convenient(setup.phase),
            "gHatE": NewtonManager.is_hat_e(weight),
            "gFlat": weight.is_flat,
            "weightMode": setup.weight_mode,
        },
        "pair": setup.pair.to_dict(),
        "fan": setup.fan.to_dict(),
    }
    if setup.puiseux is not None:
        body["puiseux"] = setup.puiseux.to_dict()
    try:
        body["unweighted"] = PairManager.unweighted_metrics(setup.phase.nonflat()).to_dict()
    except PhaseWithoutFiniteDistance as e:
        logger.warning(f"⚠️ No unweighted distance: {e}")
    if not weight.is_flat and setup.puiseux is None:
        body["symmetry"] = PairManager.symmetry_check(f, weight).to_dict()

    lead = ZetaManager.leading_pole_for(setup)
    body["poles"] = {
        "candidates": ZetaManager.candidate_poles(f, weight).to_dict(),
        "leading": lead.to_dict(),
        "negativeIntegers": ZetaManager.negative_integer_orders(f, weight).to_dict(),
        "asymptoticExponents": [rat_str(x) for x in ZetaManager.asymptotic_exponents(f, weight)],
    }
    body["verdict"] = ZetaManager.oscillation_index(f, weight, phi.at_origin).to_dict()
    logger.info(f"✅ Analysis done: {PairManager.describe(setup.pair)}")
    return body


def _plot_path(path: Optional[str], plan: NumericPlan, many: bool) -> Optional[str]:
    if path is None or not many:
        return path
    stem, ext = os.path.splitext(path)
    return f"{stem}_{plan.kind}{ext}"


def _relative_gap(value: complex, reference: complex) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


def run_plan(f: PowerData, g: Optional[PowerData], plan: NumericPlan, phi: BumpFunction,
             coefficient: Optional[CoefficientReport] = None, strict: bool = False,
             plot_data: Optional[str] = None, plot: Optional[str] = None, label: str = "") -> Dict:
    """
    Run one numeric check and compare it with the prediction.

    A zeta plan passes when the fitted order matches (or the located pole lies within the
    plan tolerance) and, with a reference, the fitted coefficient is within the tolerance.
    A decay plan passes when the fitted exponent is within the tolerance; with a predicted
    coefficient B the fitted leading coefficient is compared too.
    """
    result: Dict = {"plan": plan.to_dict()}
    if plan.kind == "zeta":
        pole = float(plan.expected_exponent)
        samples = HarnessManager.zeta_samples(f, g, phi, pole, 2 * config.MIN_POLE_SAMPLES, plan.decades,
                                              plan.orthant)
        if plan.locate:
            fit = HarnessManager.locate_pole(samples, plan.order, strict)
            passed = abs(fit.location - pole) <= plan.tolerance
        else:
            fit = HarnessManager.fit_pole(samples, plan.expected_exponent, strict)
            passed = fit.log_power == plan.order
            reference = None
            if plan.reference is not None:
                reference = plan.reference(phi)
            elif coefficient is not None and plan.orthant is None and plan.order == coefficient.rho:
                reference = coefficient.c
            if reference is not None:
                gap = _relative_gap(fit.coefficient, reference)
                result["reference"] = {"coefficient": approx(reference), "relativeGap": approx(gap)}
                passed = passed and gap <= plan.tolerance
        rows = [(s, z) for s, z in samples]
        header = ("s", "Z")
        if plot:
            ChartManager.pole_chart(samples, pole, fit, label, plot)
    else:
        samples = HarnessManager.decay_samples(f, g, phi, plan.t_range, config.MIN_DECAY_SAMPLES, plan.rel_tol)
        fit = HarnessManager.fit_decay(samples, strict)
        passed = abs(fit.exponent - float(plan.expected_exponent)) <= plan.tolerance
        if coefficient is not None and coefficient.rho == plan.order:
            lead = HarnessManager.leading_coefficient(samples, coefficient.lam, coefficient.rho)
            gap = _relative_gap(lead.coefficient, coefficient.b)
            result["leadingCoefficient"] = {"fit": lead.to_dict(), "predictedB": approx(coefficient.b),
                                            "relativeGap": approx(gap)}
            passed = passed and gap <= COEFFICIENT_TOLERANCE
        rows = [(t, abs(v), v.real, v.imag) for t, v in samples]
        header = ("t", "|I|", "Re I", "Im I")
        if plot:
            ChartManager.decay_chart(samples, fit, label, plot)
    if plot_data:
        DataManager.write_csv(plot_data, header, rows)
    result.update({"fit": fit.to_dict(), "samples": len(samples), "passed": passed})
    logger.info(f"{'✅' if passed else '❌'} {plan.kind} check for {label or 'input'}")
    return result


def _coefficient(f: PowerData, g: Optional[PowerData], verdict, phi: BumpFunction) -> Optional[CoefficientReport]:
    """Exact coefficients when available, the chart quadrature when gate (iv) holds"""
    if verdict.coefficient is not None:
        return verdict.coefficient
    if verdict.ledger.gate_iv != HOLDS or f.n > 3:
        return None
    try:
        return HarnessManager.chart_coefficient_quadrature(f, g, phi, localized=True)
    except NewtonOscError as e:
        logger.warning(f"⚠️ No chart coefficient: {e}")
        return None


def verify(f: PowerData, g: Optional[PowerData] = None, permutation: Optional[Sequence[int]] = None,
           radius: float = config.DEFAULT_BUMP_RADIUS, strict: bool = False,
           plot_data: Optional[str] = None, plot: Optional[str] = None) -> Dict:
    """Numeric harness against the symbolic prediction beta = -1/d, eta = m"""
    f, g = _permute(f, g, permutation)
    if f.n > 3:
        raise DimensionTooLarge(f"Numeric verification supports n <= 3, got n = {f.n}")
    phi = BumpFunction(radius)
    verdict = ZetaManager.oscillation_index(f, g, phi.at_origin)
    coefficient = _coefficient(f, g, verdict, phi)

    plans = [NumericPlan("zeta", verdict.beta, verdict.eta, tolerance=0.01)]
    if f.n <= 2:
        plans.append(NumericPlan("decay", verdict.beta, verdict.eta, tolerance=config.DECAY_EXPONENT_TOLERANCE))
    many = len(plans) > 1
    checks = [run_plan(f, g, plan, phi, coefficient, strict, _plot_path(plot_data, plan, many),
                       _plot_path(plot, plan, many), "input") for plan in plans]
    return {
        "bump": phi.to_dict(),
        "prediction": {"beta": rat_str(verdict.beta), "eta": verdict.eta, "status": verdict.status},
        "coefficient": coefficient.to_dict() if coefficient is not None else None,
        "checks": checks,
        "passed": all(check["passed"] for check in checks),
    }


def example(key: str, params: Optional[Dict[str, int]] = None, numeric: bool = False,
            radius: float = config.DEFAULT_BUMP_RADIUS, strict: bool = False,
            plot_data: Optional[str] = None, plot: Optional[str] = None) -> Dict:
    """Run a named case: exact invariants always, its numeric checks on request"""
    case: Case = CaseManager.build(key, params)
    checks = CaseManager.check_invariants(case)
    body = {"case": case.to_dict(), "checks": checks}
    if case.unweighted:
        body["analysis"] = {"unweighted": PairManager.unweighted_metrics(case.f.nonflat()).to_dict()}
    else:
        body["analysis"] = analyze(case.f, case.g, radius=radius)
        if "status" in case.expected:
            status = body["analysis"]["verdict"]["status"]
            checks["status"] = {"expected": case.expected["status"], "computed": status,
                                "match": status == case.expected["status"]}

    if numeric and case.plans:
        phi = BumpFunction(radius)
        verdict = ZetaManager.oscillation_index(case.f, case.g, phi.at_origin)
        coefficient = verdict.coefficient
        many = len(case.plans) > 1
        body["numeric"] = [run_plan(case.f, case.g, plan, phi, coefficient, strict,
                                    _plot_path(plot_data, plan, many), _plot_path(plot, plan, many), case.key)
                           for plan in case.plans]
    body["passed"] = all(check["match"] for check in checks.values()) and \
        all(check["passed"] for check in body.get("numeric", []))
    return body


def process_command(args) -> Tuple[int, Dict]:
    """
    Dispatch a parsed command line.

    Returns:
        (exit status, JSON report)
    """
    logger.info(f"Processing command: {args.command}")
    try:
        if args.command == "analyze":
            f, g = DataManager.load_pair(args.input)
            permutation = DataManager.parse_permutation(args.permute, f.n)
            return 0, DataManager.report("analysis", analyze(f, g, permutation, args.radius))

        elif args.command == "verify":
            f, g = DataManager.load_pair(args.input)
            permutation = DataManager.parse_permutation(args.permute, f.n)
            body = verify(f, g, permutation, args.radius, args.strict, args.plot_data, args.plot)
            return (0 if body["passed"] else 2), DataManager.report("verification", body)

        elif args.command == "example":
            params = CaseManager.parse_params(args.param)
            body = example(args.case_id, params, args.numeric, args.radius, args.strict, args.plot_data, args.plot)
            return (0 if body["passed"] else 2), DataManager.report("example", body)

        raise ValueError(f"Unknown command {args.command}")
    except NewtonOscError as e:
        logger.error(f"❌ {type(e).__name__}: {e}", exc_info=True)
        body = {"error": str(e), "type": type(e).__name__}
        partial = getattr(e, "partial_fan", None)
        if partial is not None:
            body["partialFan"] = partial.to_dict()
        result = getattr(e, "result", None)
        if isinstance(result, FitResult):
            body["fit"] = result.to_dict()
        return 1, DataManager.report("error", body)
