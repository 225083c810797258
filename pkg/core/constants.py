# elephantwalk/core/constants.py

ENGINE_VERSION = "0.3.0"

# Run defaults
DEFAULT_STEPS = 1000
DEFAULT_ENSEMBLE_SIZE = 50
DEFAULT_WINDOW_FRACTION = 0.5
DEFAULT_SEED = 42
DEFAULT_WORKERS = 2

# Grids are given in degrees at the CLI
GRID_START_DEG = 0
GRID_STOP_DEG = 90
GRID_STEP_DEG = 5

# Step law
Q_MIN = 0.5
Q_ONE_TOLERANCE = 1e-6

# Initial states
GAUSSIAN_TRUNCATION_SIGMAS = 6

# Numerical tolerances
NORM_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-12
RADICAND_TOLERANCE = 1e-12
STATIONARY_SLOPE_TOLERANCE = 1e-4
MIN_FIT_POINTS = 10
DECAY_FLOOR = 1e-12
