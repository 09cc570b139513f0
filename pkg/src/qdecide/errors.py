"""Error taxonomy shared across the package.

``ValueError`` is reserved for malformed arguments and unparseable input
(maps, configs, MDP files).  The classes below cover resource limits and
numerically/semantically broken models, so callers can map them to distinct
process exit codes or HTTP statuses.
"""


class CapacityError(Exception):
    """A requested register or problem size exceeds the simulable budget."""


class ModelError(Exception):
    """An MDP or learning model is structurally or numerically invalid."""


class DivergenceError(ModelError):
    """An iterative computation failed to converge within its budget."""
