"""Configuration constants for the starmod engine and scenario runner."""

import os

from dotenv import load_dotenv

load_dotenv()

# Truncation
DEFAULT_TRUNCATION_ORDER = int(os.getenv("STARMOD_DEFAULT_K", "4"))
MAX_TRUNCATION_ORDER = 6

# Sampling for property checks
DEFAULT_SEED = int(os.getenv("STARMOD_SEED", "0"))
SAMPLE_MODE_BOUND = 3       # torus modes |m_j| <= 3
SAMPLE_PLANE_DEGREE = 3     # plane monomials of total degree <= 3
SAMPLE_MAX_TERMS = 3        # terms per sampled element
SAMPLE_COEFFICIENTS = (     # (re, im) pairs: 0, ±1, ±i, ±1/2
    (0, 0),
    (1, 0), (-1, 0),
    (0, 1), (0, -1),
    ("1/2", 0), ("-1/2", 0),
)
STAR_AXIOM_SAMPLES = 50
SUITE_SAMPLES = 20

# Conventions recorded in reports
ORDERING_CONVENTION = "weyl"
TRACE_NORMALIZATION = "unit-volume"

# Scenario runner
MAX_WORKERS = int(os.getenv("STARMOD_MAX_WORKERS", "4"))
LOG_LEVEL = os.getenv("STARMOD_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
REPORT_INDENT = 2

# File paths
OUTPUT_DIR = "output"
