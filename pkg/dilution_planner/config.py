# dilution_planner/config.py
from __future__ import annotations

from pathlib import Path


# -----------------------------
# Concentration grid
# -----------------------------

# Largest supported d in k/2^d
MAX_PRECISION = 30

# Grid for gen-series and generated corpora when --precision is not given
DEFAULT_PRECISION = 4


# -----------------------------
# Plan documents
# -----------------------------

PLAN_FORMAT_VERSION = 1

SAMPLE_REF = "sample"
BUFFER_REF = "buffer"


# -----------------------------
# Shipped data
# -----------------------------

DATA_DIR = Path(__file__).resolve().parent / "data"

SERIES_JSON_NAME = "series.json"
REFERENCE_JSON_NAME = "reference.json"
WITNESS_JSON_NAME = "ts1_witness.json"


# -----------------------------
# Oracle defaults
# -----------------------------

ORACLE_MAX_STEPS = 12
ORACLE_MAX_DROPLETS = 6
ORACLE_MAX_PRECISION = 5
ORACLE_TIME_BUDGET_S = 30.0

# Check the clock every N expansions
ORACLE_CLOCK_EVERY = 256


# -----------------------------
# Corpora
# -----------------------------

DEFAULT_SEED = 7
CORPUS_MAX_TARGETS = 10
CORPUS_MAX_PRECISION = 7
