"""Scenario execution: one executor per task kind, run on a thread pool."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from starmod.core.bundle import (
    ClassicalProjection,
    bimodule_suite,
    check_fullness,
    conjugate_projection,
    deform_projection,
    equivalence_suite,
    metric_suite,
    module_equivalence,
    solve_two_chart_cocycle,
    verify_cocycle,
)
from starmod.core.errors import PreconditionError, ScenarioError
from starmod.core.matrix import StarMatrix, first_matrix_difference, mat_adjoint
from starmod.core.picard import (
    CohomologyModel,
    invert_witness,
    kernel_description,
    morita_check,
    outequiv_compose,
    outequiv_identity,
    outequiv_inverse,
    outequiv_normal_form,
)
from starmod.core.reports import CheckReport
from starmod.core.sampling import Sampler
from starmod.core.star import StarProduct, moyal_star, perturbed_star, twist_by_automorphism, twist_star
from starmod.core.star_axioms import check_intertwining, check_star_axioms
from starmod.core.trace_index import cyclicity_suite, index, index_invariance_check
from starmod.infrastructure import codec
from starmod.infrastructure.config import (
    MAX_WORKERS,
    ORDERING_CONVENTION,
    STAR_AXIOM_SAMPLES,
    SUITE_SAMPLES,
    TRACE_NORMALIZATION,
)
from starmod.infrastructure.scenario import Scenario, TaskSpec

log = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
COMPUTED = "computed"
ERROR = "error"

Outcome = Tuple[str, Dict[str, Any]]


@dataclass
class TaskResult:
    id: str
    kind: str
    status: str
    details: Dict[str, Any] = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        data = {"id": self.id, "kind": self.kind, "status": self.status, "details": self.details}
        if include_timings:
            data["runtime_ms"] = round(self.runtime_ms, 3)
        return data


@dataclass
class ScenarioReport:
    scenario: Scenario
    tasks: List[TaskResult] = field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        return {status: sum(1 for t in self.tasks if t.status == status)
                for status in (PASS, FAIL, COMPUTED, ERROR)}

    @property
    def success(self) -> bool:
        return all(t.status in (PASS, COMPUTED) for t in self.tasks)

    @property
    def exit_status(self) -> int:
        return 0 if self.success else 1

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        return {
            "scenario": self.scenario.name,
            "algebra": codec.encode_descriptor(self.scenario.descriptor),
            "K": self.scenario.K,
            "seed": self.scenario.seed,
            "conventions": {"normalization": TRACE_NORMALIZATION, "ordering": ORDERING_CONVENTION},
            "summary": self.counts(),
            "tasks": [t.to_dict(include_timings) for t in self.tasks],
        }


def _status(report: CheckReport) -> str:
    return PASS if report.passed else FAIL


class ScenarioRunner:
    """Resolves definitions and executes the tasks of one scenario."""

    def __init__(self, scenario: Scenario, max_workers: int = MAX_WORKERS) -> None:
        self.scenario = scenario
        self.max_workers = max(1, max_workers)
        self._executors: Dict[str, Callable[[Dict[str, Any], Sampler, StarProduct], Outcome]] = {
            "check-star": self._check_star,
            "intertwining": self._intertwining,
            "deform-projection": self._deform_projection,
            "bimodule-suite": self._bimodule_suite,
            "metric-suite": self._metric_suite,
            "module-equivalence": self._module_equivalence,
            "fullness": self._fullness,
            "cocycle": self._cocycle,
            "cyclicity": self._cyclicity,
            "index": self._index,
            "index-invariance": self._index_invariance,
            "morita-check": self._morita_check,
            "outequiv": self._outequiv,
            "kernel": self._kernel,
        }

    # Definitions

    def _definition(self, params: Dict[str, Any], name: str, expected: str) -> Dict[str, Any]:
        value = params.get(name)
        if value is None:
            raise ScenarioError(f"Missing parameter {name!r}")
        if isinstance(value, str):
            if value not in self.scenario.definitions:
                raise ScenarioError(f"Unknown definition {value!r}")
            value = self.scenario.definitions[value]
        if value.get("type", expected) != expected:
            raise ScenarioError(f"Parameter {name!r} must be a {expected}, got a {value.get('type')}")
        return value

    def _star(self, params: Dict[str, Any]) -> StarProduct:
        spec = params.get("star", self.scenario.star)
        descriptor, K = self.scenario.descriptor, self.scenario.K
        star = perturbed_star(descriptor, K) if spec.get("product") == "perturbed" else moyal_star(descriptor, K)
        if "transform" in spec:
            T = codec.decode_transform(descriptor, self._definition(spec, "transform", "transform"), K)
            star = twist_star(T, star)
        if "automorphism" in spec:
            star = twist_by_automorphism(codec.decode_automorphism(spec["automorphism"]), star)
        return star

    def _projection(self, params: Dict[str, Any]) -> ClassicalProjection:
        return codec.decode_projection(self.scenario.descriptor, self._definition(params, "projection", "projection"))

    def _matrix(self, params: Dict[str, Any], name: str, star: StarProduct) -> StarMatrix:
        return codec.decode_matrix(star, self._definition(params, name, "matrix"))

    def _classical_inverse(self, params: Dict[str, Any]):
        grid = params.get("classical_inverse")
        return None if grid is None else codec.decode_grid(self.scenario.descriptor, grid)

    def _model(self, params: Dict[str, Any]) -> CohomologyModel:
        return codec.decode_model(self._definition(params, "model", "model"))

    # Execution

    def run(self) -> ScenarioReport:
        tasks = self.scenario.tasks
        log.info(f"Running {len(tasks)} tasks with {self.max_workers} workers")
        results: List[Tuple[int, TaskResult]] = []
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_task = {
                executor.submit(self.execute, position, task): (position, task)
                for position, task in enumerate(tasks)
            }
            for future in as_completed(future_to_task):
                position, task = future_to_task[future]
                results.append((position, future.result()))
        results.sort(key=lambda item: item[0])
        report = ScenarioReport(self.scenario, [r for _, r in results])
        log.info(f"Scenario finished: {report.counts()}")
        return report

    def execute(self, position: int, task: TaskSpec) -> TaskResult:
        """Run one task; exceptions become an error status."""
        start = time.perf_counter()
        log.info(f"Task {task.id} ({task.kind}) started")
        try:
            sampler = Sampler([self.scenario.seed, position])
            star = self._star(task.params)
            status, details = self._executors[task.kind](task.params, sampler, star)
        except Exception as e:
            log.warning(f"Task {task.id} ({task.kind}) failed with an error: {e}")
            status, details = ERROR, {"error": str(e), "type": type(e).__name__}
        runtime_ms = (time.perf_counter() - start) * 1000
        log.info(f"Task {task.id} finished: {status} ({runtime_ms:.1f} ms)")
        return TaskResult(task.id, task.kind, status, details, runtime_ms)

    # Executors per task kind

    def _check_star(self, params, sampler, star) -> Outcome:
        seed = [self.scenario.seed, int(sampler.integer(0, 2 ** 31 - 1))]
        report = check_star_axioms(star, int(params.get("samples", STAR_AXIOM_SAMPLES)), seed)
        return _status(report), codec.encode_check_report(report)

    def _intertwining(self, params, sampler, star) -> Outcome:
        T = codec.decode_transform(star.descriptor, self._definition(params, "transform", "transform"), star.order)
        seed = [self.scenario.seed, int(sampler.integer(0, 2 ** 31 - 1))]
        report = check_intertwining(twist_star(T, star), int(params.get("samples", SUITE_SAMPLES)), seed)
        details = codec.encode_check_report(report)
        details["transform"] = codec.encode_transform(T)
        return _status(report), details

    def _deform_projection(self, params, sampler, star) -> Outcome:
        P0 = self._projection(params)
        D = deform_projection(P0, star)
        report = CheckReport("projection deformation", conventions={"ordering": star.convention})
        report.add("idempotent").record(D.idempotency_defect(), ("P",))
        report.add("classical-limit").record(None if D.P.classical() == P0.grid else 0, ("P",))
        if D.hermitian:
            report.add("hermitian").record(first_matrix_difference(mat_adjoint(D.P), D.P), ("P",))
        details = codec.encode_check_report(report)
        details["deformed"] = not D.P.is_classical()
        details["projection"] = codec.encode_deformed_projection(D)
        return _status(report), details

    def _bimodule_suite(self, params, sampler, star) -> Outcome:
        D = deform_projection(self._projection(params), star)
        report = bimodule_suite(D, sampler, int(params.get("samples", SUITE_SAMPLES)))
        return _status(report), codec.encode_check_report(report)

    def _metric_suite(self, params, sampler, star) -> Outcome:
        D = deform_projection(self._projection(params), star)
        report = metric_suite(D, sampler, int(params.get("samples", SUITE_SAMPLES)))
        return _status(report), codec.encode_check_report(report)

    def _module_equivalence(self, params, sampler, star) -> Outcome:
        D = deform_projection(self._projection(params), star)
        conjugated = conjugate_projection(D, self._matrix(params, "U", star), self._classical_inverse(params))
        direct = deform_projection(conjugated.classical, star)
        E = module_equivalence(direct, conjugated)
        report = equivalence_suite(E, sampler, int(params.get("samples", SUITE_SAMPLES)))
        return _status(report), codec.encode_check_report(report)

    def _fullness(self, params, sampler, star) -> Outcome:
        return COMPUTED, codec.encode_fullness(check_fullness(self._projection(params)))

    def _cocycle(self, params, sampler, star) -> Outcome:
        if "cocycle" in params:
            C = codec.decode_cocycle(star, self._definition(params, "cocycle", "cocycle"))
        else:
            charts = tuple(params.get("charts", ("a", "b")))
            C = solve_two_chart_cocycle(self._matrix(params, "solve", star), self._classical_inverse(params), charts)
        for perturbation in params.get("perturb", []):
            _perturb(C.overlaps, star, perturbation)
        report = verify_cocycle(C, star)
        details = codec.encode_check_report(report)
        details["cocycle"] = codec.encode_cocycle(C)
        return _status(report), details

    def _cyclicity(self, params, sampler, star) -> Outcome:
        report = cyclicity_suite(star, sampler, int(params.get("samples", STAR_AXIOM_SAMPLES)),
                                 int(params.get("size", 2)))
        return _status(report), codec.encode_check_report(report)

    def _index(self, params, sampler, star) -> Outcome:
        D = deform_projection(self._projection(params), star)
        value = index(D)
        details = codec.encode_index(value)
        details["normalization"] = TRACE_NORMALIZATION
        expected = params.get("expect")
        if expected is None:
            return COMPUTED, details
        return (PASS if value.to_strings()[: len(expected)] == list(expected) else FAIL), details

    def _index_invariance(self, params, sampler, star) -> Outcome:
        D = deform_projection(self._projection(params), star)
        report = index_invariance_check(D, self._matrix(params, "U", star), self._classical_inverse(params))
        return (PASS if report.passed else FAIL), codec.encode_index_invariance(report)

    def _morita_check(self, params, sampler, star) -> Outcome:
        model = self._model(params)
        c = codec.decode_class(self._definition(params, "class", "class"), model)
        c_prime = codec.decode_class(self._definition(params, "class_prime", "class"), model)
        report = morita_check(c, c_prime, model)
        details = codec.encode_morita(report)
        details["model"] = codec.encode_model(model)
        details["classes"] = [codec.encode_class(c), codec.encode_class(c_prime)]
        if report.equivalent:
            try:
                inverse = invert_witness(report.witness, model, (c, c_prime))
            except PreconditionError as e:
                log.info(f"No inverse witness: {e}")
                inverse = None
            details["inverse_witness"] = codec.encode_witness(inverse)
        expected = params.get("expect")
        if expected is None:
            return COMPUTED, details
        return (PASS if report.equivalent == bool(expected) else FAIL), details

    def _outequiv(self, params, sampler, star) -> Outcome:
        op = params.get("op", "normal_form")
        model = self._model(params) if "model" in params else None
        if op == "identity":
            result = outequiv_identity(int(params["d1"]), int(params.get("K", self.scenario.K)))
        elif op == "inverse":
            result = outequiv_inverse(codec.decode_outequiv(self._definition(params, "e1", "outequiv")))
        elif op == "compose":
            result = outequiv_compose(
                codec.decode_outequiv(self._definition(params, "e1", "outequiv")),
                codec.decode_outequiv(self._definition(params, "e2", "outequiv")),
                model,
            )
        elif op == "normal_form":
            result = outequiv_normal_form(codec.decode_outequiv(self._definition(params, "e1", "outequiv")))
        else:
            raise ScenarioError(f"Unknown outequiv operation {op!r}")
        details = {"op": op, "result": codec.encode_outequiv(result)}
        expected = params.get("expect")
        if expected is None:
            return COMPUTED, details
        return (PASS if outequiv_normal_form(codec.decode_outequiv(expected)) == result else FAIL), details

    def _kernel(self, params, sampler, star) -> Outcome:
        description = kernel_description(self._model(params), int(params.get("K", self.scenario.K)))
        return COMPUTED, codec.encode_kernel(description)


def _perturb(overlaps: Dict[Tuple[str, str], StarMatrix], star: StarProduct, spec: Dict[str, Any]) -> None:
    """Add c·λ^r·E_ij to one transition matrix (1-based entry)."""
    pair = tuple(str(x) for x in spec["pair"])
    if pair not in overlaps:
        raise ScenarioError(f"Cannot perturb missing overlap {pair}")
    M = overlaps[pair]
    i, j = (int(x) for x in spec.get("entry", (1, 1)))
    unit = StarMatrix.unit(star, M.n_rows, i, j, codec.decode_scalar(spec.get("coeff", "1")))
    overlaps[pair] = M + unit.shift(int(spec.get("order", 1)))
    log.debug(f"Perturbed overlap {pair} at entry ({i}, {j})")


def run_scenario(scenario: Scenario, max_workers: Optional[int] = None) -> ScenarioReport:
    return ScenarioRunner(scenario, max_workers if max_workers is not None else MAX_WORKERS).run()
