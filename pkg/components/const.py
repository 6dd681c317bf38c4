import re

PROGRAM_NAME = "sct-check"
CONFIG_FILE = "sct.ini"
DEBUG_ENV_VARIABLE = "SCT_CHECK_DEBUG"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Normalization budget used by conversion checks
DEFAULT_FUEL = 10_000
# Fuzz harness budgets
DEFAULT_FUZZ_SEEDS = 16
DEFAULT_FUZZ_DEPTH = 50
# Upper bound on terms explored from a single start term
DEFAULT_FUZZ_MAX_NODES = 2000
# Depth of generated constructor terms
FUZZ_TERM_DEPTH = 2
DEFAULT_JSON_INDENT = 2

# Exit codes are a pure function of the verdict
EXIT_TERMINATING = 0
EXIT_MAYBE = 1
EXIT_ERROR = 2

VERDICT_TERMINATING = "TERMINATING"
VERDICT_MAYBE = "MAYBE"
VERDICT_ERROR = "ERROR"

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"
UNCHECKED = "unchecked"

REASON_SKIPPED_TYPING = "condition (d) skipped"
REASON_UNDECIDED_FUEL = "condition (d) undecided (fuel)"

KEYWORDS = frozenset({"symbol", "rule", "infix", "TYPE", "KIND"})
WILDCARD = "_"
# Prefix of the variables the parser creates for `_` in a left-hand side
WILDCARD_PREFIX = "_w"
ARROW_BINDER = "_"

IDENT_PATTERN = re.compile(r"[A-Za-z0-9][A-Za-z0-9_']*")
OPERATOR_CHARACTERS = "+-*/<>=^&|~%@$?#"
OPERATOR_PATTERN = re.compile(rf"[{re.escape(OPERATOR_CHARACTERS)}]+")
UNICODE_ALIASES = {"→": "->", "λ": "\\", "∀": "!"}

# Minimum thefuzz score for a "did you mean" suggestion
SUGGESTION_CUTOFF = 70

INF_TEXT = "inf"
