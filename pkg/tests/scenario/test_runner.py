import math
import sys

import numpy as np
import pytest

from nuqs.oscillation.constant import DUNE_BASELINE_KM, OSC_PHASE_FACTOR
from nuqs.scenario import runner
from nuqs.scenario.config import ScenarioKind, load_config
from nuqs.scenario.runner import (
    SweepRecord,
    ValidationReport,
    map_ordered,
    run_circuit_validate,
    run_dune_cp_scan,
    run_dune_matter_compare,
    run_matter_sweep,
    run_readout_demo,
    run_scenario,
    run_vacuum_sweep,
)
from nuqs.utils.exceptions import ConfigError, NumericalValidationError

# globals
STEPS = 21


def _probabilities(records):
    return np.array([[r.P_e, r.P_mu, r.P_tau] for r in records])


def test_map_ordered_keeps_order():
    items = list(range(17))
    assert map_ordered(math.factorial, items) == [math.factorial(i) for i in items]
    assert map_ordered(math.factorial, []) == []


def test_map_ordered_with_workers():
    pytest.importorskip("joblib")
    items = list(range(17))
    assert map_ordered(math.factorial, items, workers=3) == map_ordered(
        math.factorial, items
    )


def test_vacuum_sweep():
    cfg = load_config("vacuum-sweep", overrides=[f"grid.steps={STEPS}"])
    records = run_vacuum_sweep(cfg)
    assert len(records) == 3 * STEPS
    assert all(isinstance(r, SweepRecord) for r in records)
    assert [r.initial for r in records[::STEPS]] == ["e", "mu", "tau"]
    assert all(abs(r.total - 1.0) <= 1e-9 for r in records)

    # L/E = 0 keeps every flavor
    starts = _probabilities(records[::STEPS])
    assert np.allclose(starts, np.eye(3), atol=1e-14)
    assert {r.mode for r in records} == {"vacuum"}
    assert {r.x_kind for r in records} == {"l-over-e"}


@pytest.mark.parametrize("backend", ["matrix4", "circuit"])
def test_vacuum_backends_agree(backend):
    overrides = [f"grid.steps={STEPS}", "params.delta_deg=-90"]
    reference = run_vacuum_sweep(load_config("vacuum-sweep", overrides=overrides))
    cfg = load_config("vacuum-sweep", overrides=overrides + [f"backend={backend}"])
    records = run_vacuum_sweep(cfg)
    assert {r.backend for r in records} == {backend}
    assert np.max(np.abs(_probabilities(records) - _probabilities(reference))) <= 1e-9


def test_antineutrino_backends_agree():
    overrides = [f"grid.steps={STEPS}", "params.delta_deg=60", "antineutrino=true"]
    reference = run_vacuum_sweep(load_config("vacuum-sweep", overrides=overrides))
    records = run_vacuum_sweep(
        load_config("vacuum-sweep", overrides=overrides + ["backend=matrix4"])
    )
    assert np.max(np.abs(_probabilities(records) - _probabilities(reference))) <= 1e-9

    neutrino = run_vacuum_sweep(
        load_config("vacuum-sweep", overrides=overrides[:2])
    )
    assert np.max(np.abs(_probabilities(neutrino) - _probabilities(reference))) > 1e-3


def test_matter_sweep():
    cfg = load_config("matter-sweep", overrides=[f"grid.steps={STEPS}"])
    records = run_matter_sweep(cfg)
    assert len(records) == 3 * 3 * STEPS
    assert [r.V_eV for r in records[:: 3 * STEPS]] == [0.0, 5e-5, 1e-4]

    vacuum = run_vacuum_sweep(load_config("vacuum-sweep", overrides=[f"grid.steps={STEPS}"]))
    in_vacuum = _probabilities(records[: 3 * STEPS])
    assert np.max(np.abs(in_vacuum - _probabilities(vacuum))) <= 1e-10
    assert np.max(np.abs(_probabilities(records[-3 * STEPS :]) - in_vacuum)) > 1e-3


def test_matter_modes_agree():
    cfg = load_config(
        "matter-sweep",
        overrides=[f"grid.steps={STEPS}", "matter_modes=[exact, approx]"],
    )
    records = run_matter_sweep(cfg)
    assert len(records) == 3 * 2 * 3 * STEPS
    exact = _probabilities([r for r in records if r.mode == "exact"])
    approx = _probabilities([r for r in records if r.mode == "approx"])
    assert np.max(np.abs(exact - approx)) <= 0.02


def test_dune_cp_scan():
    records = run_dune_cp_scan(load_config("dune-cp-scan"))
    assert len(records) == 4 * 200
    assert {r.initial for r in records} == {"mu"}
    assert {r.x_kind for r in records} == {"energy"}

    curves = _probabilities(records).reshape(4, 200, 3)
    assert np.max(np.abs(curves[1, :, 0] - curves[3, :, 0])) > 0.01
    assert np.max(np.abs(curves[0, :, 0] - curves[2, :, 0])) > 0.01
    assert records[200].delta_rad == pytest.approx(math.pi / 2)



def test_dune_cp_curves_meet_at_full_periods():
    # dm2_31 = 30 dm2_21, so both phases are whole turns where phi_21 = 2 pi
    dm2_21 = 7.5e-5
    energy = OSC_PHASE_FACTOR * dm2_21 * DUNE_BASELINE_KM / math.pi
    overrides = [
        f"params.dm2_21={dm2_21!r}",
        f"params.dm2_31={30.0 * dm2_21!r}",
        f"grid.min={energy!r}",
        "grid.max=8.0",
        "grid.steps=2",
    ]
    records = run_dune_cp_scan(load_config("dune-cp-scan", overrides=overrides))
    curves = _probabilities(records).reshape(4, 2, 3)
    assert records[0].x == pytest.approx(energy, rel=1e-15)
    for curve in curves[1:]:
        assert np.max(np.abs(curve[0] - curves[0, 0])) <= 1e-10
    assert np.allclose(curves[0, 0], [0.0, 1.0, 0.0], atol=1e-10)


def test_dune_matter_compare():
    overrides = [f"grid.steps={STEPS}"]
    records = run_dune_matter_compare(
        load_config("dune-matter-compare", overrides=overrides)
    )
    assert len(records) == 2 * 2 * STEPS
    assert {r.mode for r in records} == {"approx"}

    vacuum = run_dune_cp_scan(
        load_config("dune-cp-scan", overrides=overrides + ["deltas_deg=[0, -90]"])
    )
    in_vacuum = _probabilities(records[: 2 * STEPS])
    assert np.max(np.abs(in_vacuum - _probabilities(vacuum))) <= 1e-10

    deviation = np.max(np.abs(_probabilities(records[2 * STEPS :]) - in_vacuum))
    assert 1e-4 < deviation < 0.15


def test_parallel_sweep_matches_serial():
    pytest.importorskip("joblib")
    cfg = load_config("matter-sweep", overrides=[f"grid.steps={STEPS}"])
    assert run_matter_sweep(cfg, workers=2) == run_matter_sweep(cfg, workers=1)


def test_vacuum_scenarios_reject_matter():
    cfg = load_config("vacuum-sweep", overrides=["potentials_ev=[1.0e-4]"])
    with pytest.raises(ConfigError):
        run_vacuum_sweep(cfg)
    cfg = load_config("matter-sweep", overrides=["antineutrino=true"])
    with pytest.raises(ConfigError):
        run_matter_sweep(cfg)


def test_conservation_is_enforced(monkeypatch):
    monkeypatch.setattr(
        runner, "_sweep_probabilities", lambda cfg, point: np.array([0.5, 0.5, 0.5])
    )
    cfg = load_config("vacuum-sweep", overrides=["grid.steps=2"])
    with pytest.raises(NumericalValidationError):
        run_vacuum_sweep(cfg)


def test_circuit_validate():
    cfg = load_config("circuit-validate", overrides=["draws=2", "haar_draws=3"])
    report = run_circuit_validate(cfg)
    assert isinstance(report, ValidationReport)
    assert report.passed
    assert report.synthesized == 9
    assert len(report.cnot_counts) == 9
    assert report.max_cnot_count <= 3
    assert report.max_reconstruction_error <= 1e-9
    assert report.max_backend_deviation <= 1e-9
    assert run_circuit_validate(cfg) == report


def test_circuit_validate_fails_on_tight_tolerance():
    cfg = load_config(
        "circuit-validate", overrides=["draws=1", "haar_draws=1", "tolerance=1.0e-300"]
    )
    assert not run_circuit_validate(cfg).passed


def test_noiseless_readout_demo():
    cfg = load_config("readout-demo", overrides=["grid.steps=11"])
    records = run_readout_demo(cfg)
    assert len(records) == 2 * 3 * 11
    exact, nmr = records[::2], records[1::2]
    assert {r.backend for r in exact} == {"exact"}
    assert {r.backend for r in nmr} == {"nmr"}
    assert np.max(np.abs(_probabilities(exact) - _probabilities(nmr))) <= 1e-12


def test_pseudo_pure_readout_demo():
    cfg = load_config("readout-demo", overrides=["grid.steps=11", "eta=0.3"])
    records = run_readout_demo(cfg)
    exact, nmr = records[::2], records[1::2]
    assert np.max(np.abs(_probabilities(exact) - _probabilities(nmr))) <= 1e-12


def test_noisy_readout_demo_is_reproducible():
    cfg = load_config("readout-demo", overrides=["grid.steps=11", "sigma=1.0e-2"])
    records = run_readout_demo(cfg)
    assert run_readout_demo(cfg) == records
    exact, nmr = records[::2], records[1::2]
    deviation = np.max(np.abs(_probabilities(exact) - _probabilities(nmr)))
    assert 0.0 < deviation < 0.1

    reseeded = run_readout_demo(cfg.model_copy(update={"seed": 8}))
    assert reseeded != records


def test_run_scenario_dispatches():
    cfg = load_config("vacuum-sweep", overrides=["grid.steps=2"])
    assert run_scenario(cfg) == run_vacuum_sweep(cfg)
    assert set(runner.SCENARIO_RUNNERS) == set(ScenarioKind)


def test_parallel_without_joblib(monkeypatch):
    monkeypatch.setitem(sys.modules, "joblib", None)
    with pytest.raises(ImportError, match="parallel"):
        map_ordered(math.factorial, [1, 2, 3], workers=2)
    assert map_ordered(math.factorial, [1, 2, 3], workers=1) == [1, 2, 6]
