"""Tabular MDP planning with Grover-backed action selection.

The planning model is an undiscounted stochastic-shortest-path MDP: costs
g(i, u, j) accrue per transition, absorbing states cost nothing, and the
optimal values satisfy V*(i) = min_u sum_j p(i,u,j) * (g(i,u,j) + V*(j)).
Action selection treats "which action attains the minimum" as an
unstructured search over an action register, answered by Grover search in
O(sqrt(N_a)) oracle queries instead of a linear scan.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import grover
from .errors import DivergenceError, ModelError

__all__ = [
    "TabularMdp",
    "ValueTable",
    "bellman_backup",
    "value_iteration",
    "grover_select_action",
    "complexity_table",
    "format_two_sig_figs",
    "mdp_from_document",
    "mdp_from_path",
]

#: Row-stochasticity tolerance for transition matrices.
PROBABILITY_TOL = 1e-9

MDP_DOCUMENT_KEYS = {"num_states", "num_actions", "absorbing", "transitions", "costs"}


@dataclass(frozen=True)
class TabularMdp:
    """A finite MDP: p(i, u, j) transition probabilities and g(i, u, j) costs.

    Arrays are indexed [state][action][next_state].  Absorbing states must
    self-loop with probability 1 at zero cost under every action.
    """

    num_states: int
    num_actions: int
    transitions: np.ndarray = field(repr=False)
    costs: np.ndarray = field(repr=False)
    absorbing: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.num_states < 1 or self.num_actions < 1:
            raise ValueError("an MDP needs at least one state and one action")
        shape = (self.num_states, self.num_actions, self.num_states)
        transitions = np.asarray(self.transitions, dtype=np.float64)
        costs = np.asarray(self.costs, dtype=np.float64)
        if transitions.shape != shape:
            raise ValueError(
                f"transitions must have shape {shape}, got {transitions.shape}"
            )
        if costs.shape != shape:
            raise ValueError(f"costs must have shape {shape}, got {costs.shape}")
        if not np.all(np.isfinite(transitions)) or not np.all(np.isfinite(costs)):
            raise ValueError("transition probabilities and costs must be finite")
        absorbing = frozenset(int(i) for i in self.absorbing)
        for i in absorbing:
            if not 0 <= i < self.num_states:
                raise ValueError(f"absorbing state {i} out of range")
        if np.any(transitions < 0):
            raise ModelError("transition probabilities must be non-negative")
        row_sums = transitions.sum(axis=2)
        if np.max(np.abs(row_sums - 1.0)) > PROBABILITY_TOL:
            worst = np.unravel_index(np.argmax(np.abs(row_sums - 1.0)), row_sums.shape)
            raise ModelError(
                f"transition row (state {worst[0]}, action {worst[1]}) sums to "
                f"{row_sums[worst]!r}, not 1"
            )
        for i in absorbing:
            for u in range(self.num_actions):
                if abs(transitions[i, u, i] - 1.0) > PROBABILITY_TOL:
                    raise ModelError(
                        f"absorbing state {i} must self-loop with probability 1 "
                        f"under action {u}"
                    )
                if abs(costs[i, u, i]) > PROBABILITY_TOL:
                    raise ModelError(
                        f"absorbing state {i} must have zero self-loop cost "
                        f"under action {u}"
                    )
        transitions.setflags(write=False)
        costs.setflags(write=False)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "absorbing", absorbing)


@dataclass(frozen=True)
class ValueTable:
    """State values V(i), one finite entry per state."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be a one-dimensional vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def bellman_backup(
    mdp: TabularMdp, state: int, values: ValueTable
) -> tuple[np.ndarray, int, float]:
    """One-state backup: q[u] = sum_j p(i,u,j) * (g(i,u,j) + V(j)).

    Returns (q_values, best_action, best_value) with the argmin tie broken
    toward the lowest action index.
    """
    if not 0 <= state < mdp.num_states:
        raise ValueError(f"state {state} out of range")
    if values.values.shape[0] != mdp.num_states:
        raise ValueError("value table size does not match the MDP")
    q_values = np.einsum(
        "uj,uj->u",
        mdp.transitions[state],
        mdp.costs[state] + values.values[None, :],
    )
    best_action = int(np.argmin(q_values))  # np.argmin takes the first minimum
    return q_values, best_action, float(q_values[best_action])


def _check_absorbing_reachable(mdp: TabularMdp) -> None:
    """Reject MDPs where some state cannot reach the absorbing set at all.

    The scan walks the reverse transition graph (union over actions) from
    the absorbing states; value iteration cannot terminate for states
    outside the reached set.
    """
    if not mdp.absorbing:
        raise ModelError("a shortest-path MDP needs at least one absorbing state")
    can_step = mdp.transitions.max(axis=1) > 0.0  # [i][j]: some action moves i -> j
    reached = np.zeros(mdp.num_states, dtype=bool)
    frontier = sorted(mdp.absorbing)
    reached[frontier] = True
    while frontier:
        j = frontier.pop()
        predecessors = np.nonzero(can_step[:, j] & ~reached)[0]
        reached[predecessors] = True
        frontier.extend(int(i) for i in predecessors)
    if not reached.all():
        missing = np.nonzero(~reached)[0]
        raise ModelError(
            f"absorbing set unreachable from states {missing.tolist()}"
        )


def value_iteration(
    mdp: TabularMdp, tolerance: float, max_sweeps: int = 100_000
) -> ValueTable:
    """Synchronous fixed-point iteration of the Bellman backup from V = 0.

    Stops when no state's value moves by more than tolerance in a sweep;
    raises DivergenceError if max_sweeps pass without that happening.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be at least 1")
    _check_absorbing_reachable(mdp)
    values = np.zeros(mdp.num_states, dtype=np.float64)
    for _ in range(max_sweeps):
        # q[i][u] for all states at once; min over the action axis.
        targets = mdp.costs + values[None, None, :]
        new_values = np.einsum("iuj,iuj->iu", mdp.transitions, targets).min(axis=1)
        change = float(np.max(np.abs(new_values - values)))
        values = new_values
        if change <= tolerance:
            return ValueTable(values)
    raise DivergenceError(
        f"value iteration did not converge within {max_sweeps} sweeps "
        f"(last sweep moved a value by {change!r})"
    )


#: Attempts per Grover selection before falling back to the classical argmin.
MAX_SEARCH_ATTEMPTS = 4


def grover_select_action(
    mdp: TabularMdp, state: int, values: ValueTable, rng
) -> tuple[int, int]:
    """Pick the cost-minimizing action by Grover search over an action register.

    The register has n = ceil(log2(N_a)) qubits (at least one); action
    indices >= N_a are padding and never marked.  A measurement that misses
    the marked action (possible since success probability is 1 - O(1/2^n))
    triggers a retry, up to three retries, after which the classical argmin
    is returned.  The second element of the result is the total number of
    oracle queries consumed across attempts.
    """
    _, best_action, _ = bellman_backup(mdp, state, values)
    if mdp.num_actions == 1:
        return 0, 0
    n = max(1, math.ceil(math.log2(mdp.num_actions)))
    problem = grover.GroverProblem(num_qubits=n, marked_index=best_action)
    total_queries = 0
    for _ in range(MAX_SEARCH_ATTEMPTS):
        report = grover.search(problem, rng)
        total_queries += report.oracle_queries
        if report.measured_outcome == best_action:
            return report.measured_outcome, total_queries
    return best_action, total_queries


def format_two_sig_figs(value: float) -> str:
    """Render a positive count like 316227.77 as '3.2x10^5'."""
    mantissa_exp = f"{value:.1e}"  # e.g. '3.2e+05'
    mantissa, exponent = mantissa_exp.split("e")
    if mantissa.endswith(".0"):
        mantissa = mantissa[:-2]
    return f"{mantissa}x10^{int(exponent)}"


def complexity_table(
    num_states: int, action_counts: list[int]
) -> list[tuple[int, str, str]]:
    """Query-count comparison rows: linear scan vs Grover-backed selection.

    For each action count N_a the classical policy evaluation touches
    num_states * N_a action values; the amplified search touches
    num_states * sqrt(N_a).  Both are rendered at two significant figures.
    """
    if num_states < 1 or any(count < 1 for count in action_counts):
        raise ValueError("state and action counts must be positive")
    rows = []
    for count in action_counts:
        classical = float(num_states) * float(count)
        quantum = float(num_states) * math.sqrt(float(count))
        rows.append((count, format_two_sig_figs(classical), format_two_sig_figs(quantum)))
    return rows


def mdp_from_document(document: dict) -> TabularMdp:
    """Build an MDP from its JSON document form.

    Schema: {"num_states": int, "num_actions": int, "absorbing": [int],
    "transitions": [[[p, ...], ...], ...], "costs": [[[g, ...], ...], ...]}
    with both arrays indexed [state][action][next_state].
    """
    if not isinstance(document, dict):
        raise ValueError("MDP document must be a JSON object")
    missing = MDP_DOCUMENT_KEYS - document.keys()
    if missing:
        raise ValueError(f"MDP document missing keys: {sorted(missing)}")
    unknown = document.keys() - MDP_DOCUMENT_KEYS
    if unknown:
        raise ValueError(f"MDP document has unknown keys: {sorted(unknown)}")
    num_states = document["num_states"]
    num_actions = document["num_actions"]
    if not isinstance(num_states, int) or not isinstance(num_actions, int):
        raise ValueError("num_states and num_actions must be integers")
    absorbing = document["absorbing"]
    if not isinstance(absorbing, list) or not all(
        isinstance(i, int) for i in absorbing
    ):
        raise ValueError("absorbing must be a list of state indices")
    try:
        transitions = np.asarray(document["transitions"], dtype=np.float64)
        costs = np.asarray(document["costs"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"transitions/costs are not numeric arrays: {exc}") from exc
    expected = (num_states, num_actions, num_states)
    if transitions.shape != expected or costs.shape != expected:
        raise ValueError(
            f"transitions and costs must be nested [state][action][next_state] "
            f"arrays of shape {expected}"
        )
    return TabularMdp(
        num_states=num_states,
        num_actions=num_actions,
        transitions=transitions,
        costs=costs,
        absorbing=frozenset(absorbing),
    )


def mdp_from_path(path) -> TabularMdp:
    """Load an MDP document from a JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    return mdp_from_document(document)
