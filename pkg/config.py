"""
Configuration loader for the Borel map analyzer
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Sequence prefix lengths
DEFAULT_TERMS = int(os.getenv('BOREL_DEFAULT_TERMS', 10000))
MIN_TERMS = 64

# Logging
LOG_LEVEL = os.getenv('BOREL_LOG_LEVEL', 'WARNING')
LOG_FILE = os.getenv('BOREL_LOG_FILE', None)

# Numeric tolerances
STABILITY_RTOL = float(os.getenv('BOREL_STABILITY_RTOL', 0.01))
BISECTION_TOL = float(os.getenv('BOREL_BISECTION_TOL', 1e-3))
GAMMA_SEARCH_CAP = float(os.getenv('BOREL_GAMMA_SEARCH_CAP', 256))
INDEX_ZERO_TOL = float(os.getenv('BOREL_INDEX_ZERO_TOL', 0.02))
LC_SLACK = 1e-12
EQUIVALENCE_TOL = 1e-6

# Flat-function grid defaults (moduli x arguments)
FLAT_GRID = (64, 64)
C2_EXPONENT_RANGE = 8

# Cap for the direct two-index (mg) scan on non log-convex input
MG_SCAN_LIMIT = 2000


# Validation
def validate_config():
    """Validate numeric configuration"""
    if DEFAULT_TERMS < MIN_TERMS:
        raise ValueError(f"BOREL_DEFAULT_TERMS must be at least {MIN_TERMS}")
    if not 0 < STABILITY_RTOL < 1:
        raise ValueError("BOREL_STABILITY_RTOL must lie in (0, 1)")
    if BISECTION_TOL <= 0:
        raise ValueError("BOREL_BISECTION_TOL must be positive")
    if GAMMA_SEARCH_CAP < 2:
        raise ValueError("BOREL_GAMMA_SEARCH_CAP must be at least 2")
    if LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise ValueError(f"Unknown BOREL_LOG_LEVEL: {LOG_LEVEL}")
    return True
