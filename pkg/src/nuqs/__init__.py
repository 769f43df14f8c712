__all__ = [
    "OscParams",
    "Baseline",
    "probability_closed_form",
    "MatterContext",
    "matter_probability",
    "synthesize",
    "run_pipeline",
    "load_config",
    "run_scenario",
]

import logging

logger = logging.getLogger(__name__)


# main functions, class, constants, etc that end-user wants
from nuqs.oscillation.functional import Baseline, OscParams, probability_closed_form
from nuqs.oscillation.matter import MatterContext, matter_probability
from nuqs.qcircuit.pipeline import run_pipeline
from nuqs.qcircuit.synthesis import synthesize
from nuqs.scenario.config import load_config
from nuqs.scenario.runner import run_scenario
