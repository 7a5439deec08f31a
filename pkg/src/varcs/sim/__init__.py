"""Simulation harness: seeded streams, Monte Carlo runs and result files."""

from .config_file import SEED_ENV, default_seed, load_experiment, log_grid, parse_config_text
from .harness import (
    CI_METHODS,
    METHODS,
    ExperimentResult,
    ExperimentSpec,
    coverage_and_width,
    run_replication,
    sharpness_curve,
    supermartingale_means,
)
from .io import CSV_COLUMNS, emit_csv, emit_svg, parse_csv
from .streams import StreamSpec, generate_batch, generate_stream, parse_stream, true_moments
