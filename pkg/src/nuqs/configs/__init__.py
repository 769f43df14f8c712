# ref: https://stackoverflow.com/a/50797410/18971263
import pathlib

# path to all config/db files
parent_dir = pathlib.Path(__file__).parent
DATA_DIR = parent_dir / "data"


VACUUM_SWEEP_RECIPE = DATA_DIR / "vacuum-sweep.yaml"
"""Vacuum probabilities of all nine channels over L/E in [0, 1600] km/GeV

Note:
    The sampling of the L/E axis is a plotting choice, not a physical statement.
"""

MATTER_SWEEP_RECIPE = DATA_DIR / "matter-sweep.yaml"
"""Same L/E axis at a fixed 0.5 GeV for matter potentials 0, 5e-5 and 1e-4 eV"""

DUNE_CP_SCAN_RECIPE = DATA_DIR / "dune-cp-scan.yaml"
"""Muon to electron appearance over 0.5 to 8 GeV at the 1285 km baseline

Note:
    Scans the CP phases 0, pi/2, pi and -pi/2. Set ``baseline_km`` to 1298 for the
    alternative baseline.
"""

DUNE_MATTER_COMPARE_RECIPE = DATA_DIR / "dune-matter-compare.yaml"
"""Appearance at the long baseline for V in {0, 1e-4} eV and delta in {0, -pi/2}"""

CIRCUIT_VALIDATE_RECIPE = DATA_DIR / "circuit-validate.yaml"
"""Seeded synthesis and backend-agreement check of the two-qubit pipeline"""

READOUT_DEMO_RECIPE = DATA_DIR / "readout-demo.yaml"
"""Emulated NMR readout of the vacuum L/E sweep next to the exact probabilities"""

SCENARIO_RECIPES = {
    "vacuum-sweep": VACUUM_SWEEP_RECIPE,
    "matter-sweep": MATTER_SWEEP_RECIPE,
    "dune-cp-scan": DUNE_CP_SCAN_RECIPE,
    "dune-matter-compare": DUNE_MATTER_COMPARE_RECIPE,
    "circuit-validate": CIRCUIT_VALIDATE_RECIPE,
    "readout-demo": READOUT_DEMO_RECIPE,
}
"""Shipped recipe of every scenario, keyed by scenario name"""
