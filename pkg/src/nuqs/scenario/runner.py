__all__ = [
    "SweepRecord",
    "ValidationReport",
    "map_ordered",
    "parallel_available",
    "run_vacuum_sweep",
    "run_matter_sweep",
    "run_dune_cp_scan",
    "run_dune_matter_compare",
    "run_circuit_validate",
    "run_readout_demo",
    "run_scenario",
]

import functools
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import unitary_group

from nuqs.nmr.readout import (
    evolved_pps,
    extract_probabilities,
    noisy_readout,
    pps_debias,
)
from nuqs.oscillation.constant import Backend, Flavor, MatterMode
from nuqs.oscillation.functional import (
    Baseline,
    OscParams,
    as_probability,
    build_pmns,
    probability_closed_form,
)
from nuqs.oscillation.matter import MatterContext, matter_amplitudes
from nuqs.qcircuit.pipeline import (
    embed_pmns,
    pipeline_state,
    pipeline_unitary,
    run_pipeline,
)
from nuqs.qcircuit.synthesis import phase_aligned_distance, synthesize
from nuqs.scenario.config import ScenarioConfig, ScenarioKind, XKind
from nuqs.utils.exceptions import ConfigError, NumericalValidationError, SynthesisError

# config logger
logger = logging.getLogger(__name__)

CONSERVATION_ATOL = 1e-9
"""Largest ``|P_e + P_mu + P_tau - 1|`` of a noiseless record"""

_FLAVORS = (Flavor.E, Flavor.MU, Flavor.TAU)

T = TypeVar("T")


class SweepRecord(BaseModel):
    """One output row; field order is the column order of the CSV output"""

    model_config = ConfigDict(frozen=True)

    scenario: str
    backend: str
    mode: str
    initial: str
    x_kind: str
    x: float
    V_eV: float
    delta_rad: float
    P_e: float
    P_mu: float
    P_tau: float

    @property
    def total(self) -> float:
        return self.P_e + self.P_mu + self.P_tau


class ValidationReport(BaseModel):
    """Outcome of the ``circuit-validate`` scenario"""

    scenario: str = ScenarioKind.CIRCUIT_VALIDATE.name
    seed: int
    draws: int
    haar_draws: int
    tolerance: float
    synthesized: int
    max_reconstruction_error: float
    cnot_counts: list[int]
    max_cnot_count: int
    max_backend_deviation: float
    passed: bool


@dataclass(frozen=True)
class _Point:
    """One grid point of a sweep"""

    index: int
    initial: Flavor
    x: float
    V: float
    delta: float
    mode: Optional[MatterMode]


def _chunks(items: Sequence[T], n_chunks: int) -> list[Sequence[T]]:
    size = max(1, math.ceil(len(items) / n_chunks))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _run_chunk(func: Callable[[T], Any], chunk: Sequence[T]) -> list[Any]:
    return [func(item) for item in chunk]


def parallel_available() -> bool:
    """Whether the optional :mod:`joblib` backend of :func:`map_ordered` imports"""
    try:
        import joblib  # noqa: F401
    except ImportError:
        return False
    return True


def map_ordered(
    func: Callable[[T], Any], items: Sequence[T], workers: int = 1
) -> list[Any]:
    """``[func(item) for item in items]``, spread over a :mod:`joblib` pool

    Items are split into one contiguous chunk per worker and results come back in
    input order, so the output does not depend on ``workers``.

    Args:
        func (Callable[[T], Any]): Picklable function of one item
        items (Sequence[T]): Work items
        workers (int, optional): Number of processes; ``1`` runs in-process without
            importing :mod:`joblib`. Defaults to 1.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return _run_chunk(func, items)

    try:
        from joblib import Parallel, delayed
    except ImportError as ie:
        from nuqs.utils.import_utils import optional_component_not_installed

        optional_component_not_installed(__name__, "parallel", ie)

    chunks = _chunks(items, workers)
    results = Parallel(n_jobs=min(workers, len(chunks)))(
        delayed(_run_chunk)(func, chunk) for chunk in chunks
    )
    return [result for chunk in results for result in chunk]


def _baseline(cfg: ScenarioConfig, x: float) -> Baseline:
    if cfg.x_kind is XKind.ENERGY:
        return Baseline(L=cfg.baseline_km, E=x)
    return Baseline.from_l_over_e(x, energy=cfg.energy_gev)


def _sweep_probabilities(cfg: ScenarioConfig, point: _Point) -> np.ndarray:
    params = cfg.params.to_osc_params().with_delta(point.delta)
    baseline = _baseline(cfg, point.x)

    if point.mode is None:
        if cfg.backend is Backend.CLOSED_FORM:
            return np.array(
                [
                    probability_closed_form(
                        params, baseline, point.initial, beta, cfg.antineutrino
                    )
                    for beta in _FLAVORS
                ]
            )
        if cfg.antineutrino:
            # conjugate mixing is the same as flipping the CP phase
            params = params.with_delta(-point.delta)
        probabilities = run_pipeline(
            params,
            baseline,
            point.initial,
            cfg.backend,
            phi_ab_policy=cfg.phi_ab_policy,
        )
        return probabilities[:3]

    ctx = MatterContext(E=baseline.E, V=point.V, convention=cfg.potential_convention)
    if cfg.backend is Backend.CLOSED_FORM:
        amplitudes = matter_amplitudes(
            params,
            ctx,
            baseline.L,
            point.initial,
            mode=point.mode,
            form=cfg.approx_form,
        )
        return np.array([as_probability(abs(a) ** 2) for a in amplitudes])
    probabilities = run_pipeline(
        params,
        baseline,
        point.initial,
        cfg.backend,
        matter=ctx,
        phi_ab_policy=cfg.phi_ab_policy,
        mode=point.mode,
        form=cfg.approx_form,
    )
    return probabilities[:3]


def _record(
    cfg: ScenarioConfig, point: _Point, backend: str, mode: str, p: Sequence[float]
) -> SweepRecord:
    return SweepRecord(
        scenario=cfg.scenario.name,
        backend=backend,
        mode=mode,
        initial=point.initial.name,
        x_kind=cfg.x_kind.name,
        x=float(point.x),
        V_eV=float(point.V),
        delta_rad=float(point.delta),
        P_e=float(p[0]),
        P_mu=float(p[1]),
        P_tau=float(p[2]),
    )


def _checked(record: SweepRecord) -> SweepRecord:
    if abs(record.total - 1.0) > CONSERVATION_ATOL:
        raise NumericalValidationError(
            f"Probabilities of {record.initial} at x={record.x!r} sum to "
            f"{record.total!r}."
        )
    return record


def _evaluate_sweep_point(cfg: ScenarioConfig, point: _Point) -> list[SweepRecord]:
    probabilities = _sweep_probabilities(cfg, point)
    mode = "vacuum" if point.mode is None else point.mode.name
    return [_checked(_record(cfg, point, cfg.backend.name, mode, probabilities))]


def _evaluate_readout_point(cfg: ScenarioConfig, point: _Point) -> list[SweepRecord]:
    params = cfg.params.to_osc_params().with_delta(point.delta)
    baseline = _baseline(cfg, point.x)
    backend = Backend.MATRIX4 if cfg.backend is Backend.CLOSED_FORM else cfg.backend
    state = pipeline_state(
        params, baseline, point.initial, backend, phi_ab_policy=cfg.phi_ab_policy
    )
    truth = np.abs(state[:3]) ** 2

    rho = evolved_pps(state, cfg.eta)
    readout = noisy_readout(rho, cfg.sigma, seed=[cfg.seed, point.index])
    recovered = extract_probabilities(readout).raw
    if cfg.eta < 1.0:
        recovered = pps_debias(recovered, cfg.eta)

    exact = _checked(_record(cfg, point, "exact", "vacuum", truth))
    measured = _record(cfg, point, "nmr", "vacuum", recovered)
    if cfg.sigma == 0.0:
        measured = _checked(measured)
    return [exact, measured]


def _sweep_points(
    cfg: ScenarioConfig,
    modes: Sequence[Optional[MatterMode]],
    potentials: Sequence[float],
) -> list[_Point]:
    points: list[_Point] = []
    for V in potentials:
        for delta in cfg.resolved_deltas():
            for mode in modes:
                for initial in cfg.resolved_initial_flavors():
                    for x in cfg.resolved_grid().values():
                        points.append(
                            _Point(
                                index=len(points),
                                initial=initial,
                                x=x,
                                V=V,
                                delta=delta,
                                mode=mode,
                            )
                        )
    return points


def _run_points(
    cfg: ScenarioConfig,
    points: list[_Point],
    evaluate: Callable[[ScenarioConfig, _Point], list[SweepRecord]],
    workers: int,
) -> list[SweepRecord]:
    logger.info(f"↓↓↓ Starting '{cfg.scenario.name}' on {len(points)} points ↓↓↓")
    chunks = map_ordered(functools.partial(evaluate, cfg), points, workers=workers)
    records = [record for chunk in chunks for record in chunk]
    logger.info(
        f"↑↑↑ Finished '{cfg.scenario.name}' with {len(records)} records ↑↑↑"
    )
    return records


def _vacuum_only(cfg: ScenarioConfig) -> list[Optional[MatterMode]]:
    if any(V != 0.0 for V in cfg.resolved_potentials()):
        raise ConfigError(
            f"'{cfg.scenario.name}' runs in vacuum; use a matter scenario for V > 0."
        )
    return [None]


def _matter_modes(cfg: ScenarioConfig) -> list[Optional[MatterMode]]:
    if cfg.antineutrino:
        raise ConfigError("Antineutrinos are only supported in vacuum scenarios.")
    return list(cfg.matter_modes)


def run_vacuum_sweep(cfg: ScenarioConfig, workers: int = 1) -> list[SweepRecord]:
    """All nine vacuum channels over the L/E grid"""
    points = _sweep_points(cfg, _vacuum_only(cfg), [0.0])
    return _run_points(cfg, points, _evaluate_sweep_point, workers)


def run_matter_sweep(cfg: ScenarioConfig, workers: int = 1) -> list[SweepRecord]:
    """All nine channels over the L/E grid at fixed energy, per potential and mode"""
    points = _sweep_points(cfg, _matter_modes(cfg), cfg.resolved_potentials())
    return _run_points(cfg, points, _evaluate_sweep_point, workers)


def run_dune_cp_scan(cfg: ScenarioConfig, workers: int = 1) -> list[SweepRecord]:
    """Channels of the initial flavors over the energy grid, one curve per CP phase"""
    points = _sweep_points(cfg, _vacuum_only(cfg), [0.0])
    return _run_points(cfg, points, _evaluate_sweep_point, workers)


def run_dune_matter_compare(cfg: ScenarioConfig, workers: int = 1) -> list[SweepRecord]:
    """Energy-grid curves for every potential, CP phase and matter mode"""
    points = _sweep_points(cfg, _matter_modes(cfg), cfg.resolved_potentials())
    return _run_points(cfg, points, _evaluate_sweep_point, workers)


def run_readout_demo(cfg: ScenarioConfig, workers: int = 1) -> list[SweepRecord]:
    """Exact probabilities next to the emulated NMR readout of the same state

    Every grid point yields an ``exact`` record and an ``nmr`` record. The noise of
    point ``i`` is seeded with ``[seed, i]``.
    """
    points = _sweep_points(cfg, _vacuum_only(cfg), [0.0])
    return _run_points(cfg, points, _evaluate_readout_point, workers)


@dataclass(frozen=True)
class _ValidationItem:
    unitary: np.ndarray
    params: Optional[OscParams] = None
    baseline: Optional[Baseline] = None


def _random_params(rng: np.random.Generator) -> OscParams:
    dm2_31 = rng.uniform(1.0e-3, 3.0e-3) * rng.choice([-1.0, 1.0])
    return OscParams(
        theta12=rng.uniform(0.0, math.pi / 2),
        theta13=rng.uniform(0.0, math.pi / 2),
        theta23=rng.uniform(0.0, math.pi / 2),
        delta=rng.uniform(-math.pi, math.pi),
        dm2_21=rng.uniform(1.0e-5, 1.0e-4),
        dm2_31=float(dm2_31),
    )


def _validation_items(cfg: ScenarioConfig) -> list[_ValidationItem]:
    rng = np.random.default_rng(cfg.seed)
    draws = [(cfg.params.to_osc_params(), Baseline.from_l_over_e(500.0))]
    for _ in range(cfg.draws):
        params = _random_params(rng)
        draws.append((params, Baseline.from_l_over_e(rng.uniform(0.0, 1600.0))))

    items = []
    for params, baseline in draws:
        items.append(_ValidationItem(unitary=embed_pmns(build_pmns(params)).u4))
        items.append(
            _ValidationItem(
                unitary=pipeline_unitary(
                    params, baseline, phi_ab_policy=cfg.phi_ab_policy
                ),
                params=params,
                baseline=baseline,
            )
        )
    for _ in range(cfg.haar_draws):
        items.append(_ValidationItem(unitary=unitary_group.rvs(4, random_state=rng)))
    return items


def _backend_deviation(cfg: ScenarioConfig, item: _ValidationItem) -> float:
    deviation = 0.0
    for initial in _FLAVORS:
        p_matrix, p_circuit = (
            run_pipeline(
                item.params,
                item.baseline,
                initial,
                backend,
                phi_ab_policy=cfg.phi_ab_policy,
            )
            for backend in (Backend.MATRIX4, Backend.CIRCUIT)
        )
        deviation = max(deviation, float(np.max(np.abs(p_matrix - p_circuit))))
    return deviation


def _validate_item(
    cfg: ScenarioConfig, item: _ValidationItem
) -> tuple[float, int, float]:
    try:
        circuit = synthesize(item.unitary, atol=math.inf)
        deviation = 0.0 if item.params is None else _backend_deviation(cfg, item)
    except SynthesisError as error:
        logger.warning(f"Synthesis failed: {error}")
        return math.inf, 4, math.inf
    error = phase_aligned_distance(item.unitary, circuit.unitary())
    return error, circuit.cnot_count, deviation


def run_circuit_validate(cfg: ScenarioConfig, workers: int = 1) -> ValidationReport:
    """Synthesizes seeded pipeline and Haar-random unitaries and checks the results

    The targets are the embedded mixing matrix and the full evolution for the recipe
    parameters and ``cfg.draws`` random parameter sets, plus ``cfg.haar_draws``
    Haar-random unitaries.
    """
    items = _validation_items(cfg)
    logger.info(f"↓↓↓ Starting 'circuit-validate' on {len(items)} unitaries ↓↓↓")
    results = map_ordered(
        functools.partial(_validate_item, cfg), items, workers=workers
    )
    errors, counts, deviations = zip(*results)

    report = ValidationReport(
        seed=cfg.seed,
        draws=cfg.draws,
        haar_draws=cfg.haar_draws,
        tolerance=cfg.tolerance,
        synthesized=len(items),
        max_reconstruction_error=float(max(errors)),
        cnot_counts=[int(c) for c in counts],
        max_cnot_count=int(max(counts)),
        max_backend_deviation=float(max(deviations)),
        passed=bool(
            max(errors) <= cfg.tolerance
            and max(counts) <= 3
            and max(deviations) <= cfg.tolerance
        ),
    )
    logger.info(
        "↑↑↑ Finished 'circuit-validate': "
        f"max error {report.max_reconstruction_error:.3e}, "
        f"max CNOTs {report.max_cnot_count}, passed={report.passed} ↑↑↑"
    )
    return report


SCENARIO_RUNNERS = {
    ScenarioKind.VACUUM_SWEEP: run_vacuum_sweep,
    ScenarioKind.MATTER_SWEEP: run_matter_sweep,
    ScenarioKind.DUNE_CP_SCAN: run_dune_cp_scan,
    ScenarioKind.DUNE_MATTER_COMPARE: run_dune_matter_compare,
    ScenarioKind.CIRCUIT_VALIDATE: run_circuit_validate,
    ScenarioKind.READOUT_DEMO: run_readout_demo,
}
"""Runner of every scenario kind"""


def run_scenario(
    cfg: ScenarioConfig, workers: int = 1
) -> Union[list[SweepRecord], ValidationReport]:
    """Dispatches ``cfg`` to the runner of its scenario kind"""
    return SCENARIO_RUNNERS[cfg.scenario](cfg, workers=workers)
