import os
from dotenv import load_dotenv

load_dotenv()

# Privacy defaults (epsilon 4 and unit neighbour bound throughout the experiments)
DEFAULT_EPSILON = float(os.getenv("DP_EPSILON", "4"))
DEFAULT_ALPHA = float(os.getenv("DP_ALPHA", "1"))
DEFAULT_T_MULTIPLIER = float(os.getenv("DP_T_MULTIPLIER", "1"))
DEFAULT_SEED = int(os.getenv("DP_SEED", "0"))

# Synthetic two-blob data
DEFAULT_N_PER_CLUSTER = int(os.getenv("DATAGEN_N_PER_CLUSTER", "1000"))
DEFAULT_CENTER_DISTANCE = float(os.getenv("DATAGEN_CENTER_DISTANCE", "4"))
DEFAULT_CLUSTER_STD = float(os.getenv("DATAGEN_CLUSTER_STD", "1"))

# k-means
KMEANS_N_INIT = int(os.getenv("KMEANS_N_INIT", "10"))
KMEANS_MAX_ITER = int(os.getenv("KMEANS_MAX_ITER", "300"))
KMEANS_TOL = float(os.getenv("KMEANS_TOL", "1e-4"))

# Experiments
TABLE1_SEEDS = int(os.getenv("TABLE1_SEEDS", "20"))
DEFAULT_N_PAIRS = int(os.getenv("DISTANCE_N_PAIRS", "1000"))
DEFAULT_N_REPEATS = int(os.getenv("DISTANCE_N_REPEATS", "1000"))
HISTOGRAM_BINS = 101

# Release internals (projection matrix, noise) are only reachable with this on
DIAGNOSTICS_ENABLED = os.getenv("DP_DIAGNOSTICS", "0").lower() in ("1", "true", "yes")

# Manifests
MANIFEST_SCHEMA_VERSION = "1.0"
SOURCE_DATE_EPOCH = os.getenv("SOURCE_DATE_EPOCH")  # pins manifest timestamps when set
