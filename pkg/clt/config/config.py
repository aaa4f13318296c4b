import os

# Numeric precision for model math. Gradient checks always run in float64.
DEFAULT_DTYPE = os.getenv("CLT_DTYPE", "float64")
LOG_FLOOR = 1e-12  # clamp inside log() for cross-entropy and KL


# Encoder / classifier architecture
EMBEDDING_DIM = 300
FILTER_WIDTHS = (3, 4, 5)
FEATURE_MAPS = 100  # per filter width
ATTENTION_DIM = 100
JOINT_ORDER = ("lone", "bag")  # concatenation order for the joint head
EMBEDDING_INIT_RANGE = 0.25  # uniform(-r, r) for rows missing from pretrained vectors


# Optimisation
BATCH_SIZE = 32
DROPOUT_RATE = 0.5
MAX_NORM = 3.0  # l2 row constraint on classifier heads
ADADELTA_RHO = 0.95
ADADELTA_EPSILON = 1e-6
MAX_EPOCHS = 20
EARLY_STOPPING_PATIENCE = 3
PRETRAIN_EPOCHS = 3  # per stepwise-pretraining stage
LAMBDA_GRID = (0.01, 0.1, 1.0)
PSEUDO_LONGS_PER_BATCH = 1


# Text processing
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
PAD_ID = 0
UNK_ID = 1
MIN_COUNT = 2
SENTENCE_END_TOKENS = (".", "!", "?", ";")
CHUNK_SIZE = 20  # tokens per fixed chunk
MAX_SEGMENTS = 60
PSEUDO_LONG_K_MIN = 3
PSEUDO_LONG_K_MAX = 10


# Cross-validation
NUM_FOLDS = 5
DEV_FRACTION = 0.1
LAMBDA_TUNING_FOLDS = 1  # folds used to pick lambda before the full protocol
NUM_LENGTH_BUCKETS = 10  # deciles


# Gradient checking
GRADCHECK_STEP = 1e-5
GRADCHECK_TOLERANCE = 1e-4
GRADCHECK_PROBES = 400


# Checkpoints and reports
CHECKPOINT_MAGIC = b"CLTCKPT\n"
CHECKPOINT_VERSION = 1
REPORT_DECIMALS = 4
REPORT_FILENAME = "report.json"
REPORT_TABLE_FILENAME = "report.txt"
METRICS_FILENAME = "metrics.jsonl"
MANIFEST_FILENAME = "manifest.json"


# Environment
ENV_PREFIX = "CLT_"
ROOT_SEED = 13


# Exit codes
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_DIVERGED = 3
