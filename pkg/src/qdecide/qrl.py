"""Reinforcement learning with amplitude-encoded policies.

Each free state s carries a normalized complex amplitude vector C_a over a
2^n-slot action register (n = ceil(log2 N_a); slots past N_a are padding and
stay exactly zero).  Acting samples a with probability |C_a|^2, mimicking a
measurement without collapsing the stored vector.  Learning interleaves two
updates along the trajectory:

* value:      V(s) += alpha * (r + gamma * V(s') - V(s)),  V(terminal) = 0
* amplitude:  C_a *= exp(lambda * (r + V(s'))), then renormalize the state

so good outcomes multiplicatively boost the taken action's probability and
bad ones shrink it.  Episode step counts are trajectory lengths in cells
(states visited over time, start included), matching the path metric used
by greedy evaluation and the map's cell-count oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gridworld import GridMap, TransitionTables, build_transition_tables
from .rng import RandomStream

__all__ = [
    "QubitBudget",
    "PolicyAmplitudes",
    "QrlConfig",
    "QrlAgent",
    "EpisodeRecord",
    "ScheduleEvidence",
    "qubit_budget",
    "init_uniform",
    "new_agent",
    "select_action",
    "td_update",
    "amplitude_update",
    "run_episode",
    "train",
    "greedy_path_cells",
    "validate_schedule",
    "CONFIG_KEYS",
    "config_from_document",
    "default_config_document",
]

#: Exponent bound for the amplitude reinforcement factor (amplitude scale).
EXPONENT_CLAMP = 50.0

#: Tolerance for the per-state policy normalization invariant.
POLICY_NORM_TOL = 1e-10


@dataclass(frozen=True)
class QubitBudget:
    """Register widths: m state qubits and n action qubits, both minimal."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("qubit budgets must be at least 1")


def qubit_budget(num_states: int, num_actions: int) -> QubitBudget:
    """Smallest registers covering the spaces: 2^m >= N_s, 2^n >= N_a.

    For counts >= 2 the minimal width also satisfies 2^m <= 2 * N_s (and
    likewise for actions), so the register at most doubles the space.
    """
    if num_states < 1 or num_actions < 1:
        raise ValueError("state and action counts must be positive")
    return QubitBudget(
        m=max(1, (num_states - 1).bit_length()),
        n=max(1, (num_actions - 1).bit_length()),
    )


class PolicyAmplitudes:
    """Per-state amplitude vectors over the padded action register.

    Stored as one list of complex amplitudes per state; each list has 2^n
    entries of which only the first num_actions are live.  Use
    ``as_array()`` for a numpy view in tests and reports.
    """

    def __init__(self, vectors: list[list[complex]], num_actions: int) -> None:
        self.vectors = vectors
        self.num_actions = num_actions

    @property
    def num_states(self) -> int:
        return len(self.vectors)

    @property
    def num_slots(self) -> int:
        return len(self.vectors[0]) if self.vectors else 0

    def as_array(self) -> np.ndarray:
        return np.array(self.vectors, dtype=np.complex128)

    def check_invariants(self, tolerance: float = POLICY_NORM_TOL) -> None:
        for state, vector in enumerate(self.vectors):
            total = sum(c.real * c.real + c.imag * c.imag for c in vector)
            if abs(total - 1.0) > tolerance:
                raise ValueError(
                    f"state {state}: policy norm {total!r} is not 1"
                )
            for slot in range(self.num_actions, len(vector)):
                if vector[slot] != 0:
                    raise ValueError(
                        f"state {state}: padded action {slot} has non-zero "
                        f"amplitude {vector[slot]!r}"
                    )


def init_uniform(num_states: int, num_actions: int) -> PolicyAmplitudes:
    """Uniform policies: every live amplitude 1/sqrt(N_a), pads exactly 0."""
    if num_states < 1 or num_actions < 1:
        raise ValueError("state and action counts must be positive")
    slots = 2 ** qubit_budget(num_states, num_actions).n
    amplitude = complex(1.0 / math.sqrt(num_actions), 0.0)
    vectors = [
        [amplitude] * num_actions + [0j] * (slots - num_actions)
        for _ in range(num_states)
    ]
    return PolicyAmplitudes(vectors, num_actions)


CONFIG_KEYS = {
    "alpha",
    "gamma",
    "lambda",
    "epsilon",
    "max_steps",
    "max_episodes",
    "step_reward",
    "goal_reward",
    "seed",
    "map_path",
}


@dataclass(frozen=True)
class QrlConfig:
    """Training hyperparameters.  ``lam`` is the reinforcement gain lambda."""

    alpha: float
    gamma: float
    lam: float
    epsilon: float
    max_steps: int
    max_episodes: int
    step_reward: float
    goal_reward: float
    seed: int
    map_path: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma!r}")
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.max_episodes < 1:
            raise ValueError("max_episodes must be at least 1")


def default_config_document() -> dict:
    """The shipped training configuration (tuned for the default map)."""
    return {
        "alpha": 0.05,
        "gamma": 0.99,
        "lambda": 0.25,
        "epsilon": 0.015,
        "max_steps": 2000,
        "max_episodes": 20000,
        "step_reward": -1.0,
        "goal_reward": 100.0,
        "seed": 1,
        "map_path": None,
    }


def config_from_document(document: dict) -> QrlConfig:
    """Parse and validate a JSON config object; unknown keys are rejected."""
    if not isinstance(document, dict):
        raise ValueError("config must be a JSON object")
    unknown = document.keys() - CONFIG_KEYS
    if unknown:
        raise ValueError(f"config has unknown keys: {sorted(unknown)}")
    missing = (CONFIG_KEYS - {"map_path"}) - document.keys()
    if missing:
        raise ValueError(f"config missing keys: {sorted(missing)}")

    def number(key: str) -> float:
        value = document[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"config key {key!r} must be a number")
        return float(value)

    def integer(key: str) -> int:
        value = document[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"config key {key!r} must be an integer")
        return value

    map_path = document.get("map_path")
    if map_path is not None and not isinstance(map_path, str):
        raise ValueError("config key 'map_path' must be a string or null")
    return QrlConfig(
        alpha=number("alpha"),
        gamma=number("gamma"),
        lam=number("lambda"),
        epsilon=number("epsilon"),
        max_steps=integer("max_steps"),
        max_episodes=integer("max_episodes"),
        step_reward=number("step_reward"),
        goal_reward=number("goal_reward"),
        seed=integer("seed"),
        map_path=map_path,
    )


@dataclass
class QrlAgent:
    """Mutable learner state: V table, amplitude policy, config, progress."""

    values: list[float]
    policy: PolicyAmplitudes
    config: QrlConfig
    episode_count: int = 0

    @property
    def num_states(self) -> int:
        return len(self.values)

    @property
    def num_actions(self) -> int:
        return self.policy.num_actions


def new_agent(num_states: int, num_actions: int, config: QrlConfig) -> QrlAgent:
    """Fresh agent: V = 0 everywhere, uniform amplitudes."""
    return QrlAgent(
        values=[0.0] * num_states,
        policy=init_uniform(num_states, num_actions),
        config=config,
    )


def select_action(agent: QrlAgent, state: int, rng) -> int:
    """Sample an action with probability |C_a|^2 (non-destructively).

    ``rng`` needs only a ``random()`` method: a numpy Generator and
    RandomStream both work.  Padded slots carry zero probability and are
    never returned.
    """
    policy = agent.policy
    vector = policy.vectors[state]
    draw = rng.random()
    cumulative = 0.0
    last_live = policy.num_actions - 1
    for action in range(last_live):
        c = vector[action]
        cumulative += c.real * c.real + c.imag * c.imag
        if draw < cumulative:
            return action
    return last_live


def td_update(
    agent: QrlAgent, state: int, reward: float, next_state: int | None
) -> float:
    """V(s) += alpha * (r + gamma * V(s') - V(s)); terminal s' counts as 0.

    Returns the applied change.
    """
    values = agent.values
    next_value = 0.0 if next_state is None else values[next_state]
    delta = agent.config.alpha * (
        reward + agent.config.gamma * next_value - values[state]
    )
    values[state] += delta
    return delta


def amplitude_update(
    agent: QrlAgent, state: int, action: int, reward: float, next_state: int | None
) -> None:
    """Reinforce the taken action: C_a *= e^(lambda*(r+V(s'))), renormalize.

    The exponent is clamped to +/-50 (amplitude scale) before
    exponentiation.  Renormalization divides the whole state vector by its
    freshly summed norm — the sum must be recomputed every update, because
    propagating the norm in closed form lets rounding error compound
    multiplicatively under repeated suppression.  Zero pads stay exactly
    zero because 0j times a float is 0j.
    """
    policy = agent.policy
    if not 0 <= action < policy.num_actions:
        raise ValueError(f"action {action} is not a live action")
    next_value = 0.0 if next_state is None else agent.values[next_state]
    exponent = agent.config.lam * (reward + next_value)
    if exponent > EXPONENT_CLAMP:
        exponent = EXPONENT_CLAMP
    elif exponent < -EXPONENT_CLAMP:
        exponent = -EXPONENT_CLAMP
    vector = policy.vectors[state]
    vector[action] = vector[action] * math.exp(exponent)
    total = 0.0
    for c in vector:
        total += c.real * c.real + c.imag * c.imag
    scale = 1.0 / math.sqrt(total)
    vector[:] = [c * scale for c in vector]


@dataclass(frozen=True)
class EpisodeRecord:
    """One episode's outcome.

    ``steps`` is the trajectory length in cells: the number of states
    visited over time including the start, so an episode that reaches the
    goal in k moves records k + 1.  Truncated episodes record exactly
    max_steps.
    """

    steps: int
    total_reward: float
    max_abs_delta_v: float


def run_episode(
    agent: QrlAgent,
    tables: TransitionTables,
    rng,
    delta_sink: dict[int, float] | None = None,
) -> EpisodeRecord:
    """Play one episode from the start cell, learning along the trajectory.

    Loops select_action -> step transition -> td_update -> amplitude_update
    until the goal is reached or the trajectory length hits max_steps.
    ``delta_sink``, when given, collects each visited state's last |dV|.
    """
    max_steps = agent.config.max_steps
    next_table = tables.next_state
    reward_table = tables.rewards
    done_table = tables.done
    state = tables.start_index
    steps = 1
    total_reward = 0.0
    max_abs_delta = 0.0
    if state == tables.goal_index:
        return EpisodeRecord(steps=1, total_reward=0.0, max_abs_delta_v=0.0)
    while steps < max_steps:
        action = select_action(agent, state, rng)
        next_state = next_table[state][action]
        reward = reward_table[state][action]
        done = done_table[state][action]
        bootstrap = None if done else next_state
        delta = td_update(agent, state, reward, bootstrap)
        amplitude_update(agent, state, action, reward, bootstrap)
        total_reward += reward
        abs_delta = -delta if delta < 0.0 else delta
        if abs_delta > max_abs_delta:
            max_abs_delta = abs_delta
        if delta_sink is not None:
            delta_sink[state] = abs_delta
        steps += 1
        if done:
            break
        state = next_state
    return EpisodeRecord(
        steps=steps, total_reward=total_reward, max_abs_delta_v=max_abs_delta
    )


def train(agent: QrlAgent, grid_map: GridMap) -> list[EpisodeRecord]:
    """Run episodes until converged or max_episodes; returns the full log.

    Convergence: after an episode, every state visited during that episode
    must have its last value change within epsilon.  Non-convergence shows
    up in the log (it simply has max_episodes entries), never as an error.
    """
    config = agent.config
    tables = build_transition_tables(
        grid_map, config.step_reward, config.goal_reward
    )
    if tables.num_states != agent.num_states:
        raise ValueError(
            f"agent has {agent.num_states} states but the map enumerates "
            f"{tables.num_states}"
        )
    stream = RandomStream(np.random.default_rng(config.seed))
    log: list[EpisodeRecord] = []
    for _ in range(config.max_episodes):
        deltas: dict[int, float] = {}
        record = run_episode(agent, tables, stream, delta_sink=deltas)
        log.append(record)
        agent.episode_count += 1
        if all(delta <= config.epsilon for delta in deltas.values()):
            break
    return log


def greedy_path_cells(agent: QrlAgent, tables: TransitionTables) -> int:
    """Length in cells of the argmax-|C_a|^2 path from start to goal.

    Ties break toward the lowest action index; the walk is capped at
    4 * num_states moves and returns -1 if the goal is not reached.
    """
    state = tables.start_index
    cells = 1
    for _ in range(4 * tables.num_states):
        if state == tables.goal_index:
            return cells
        vector = agent.policy.vectors[state]
        best_action = 0
        best_prob = -1.0
        for action in range(agent.policy.num_actions):
            c = vector[action]
            prob = c.real * c.real + c.imag * c.imag
            if prob > best_prob:
                best_prob = prob
                best_action = action
        state = tables.next_state[state][best_action]
        cells += 1
    return cells if state == tables.goal_index else -1


@dataclass(frozen=True)
class ScheduleEvidence:
    """Robbins-Monro probe of a stepsize schedule at a finite horizon.

    sum_diverges_evidence is the partial sum of the stepsizes and
    sum_squares the partial sum of their squares, both at the horizon.
    ``accepted`` reports whether the schedule behaves like sum(alpha_k)
    diverging with sum(alpha_k^2) converging: the tail from horizon/2 to
    horizon must still grow the plain sum but barely move the square sum.
    """

    sum_diverges_evidence: float
    sum_squares: float
    accepted: bool


#: Tail-growth thresholds for the half-to-full horizon probe.
_TAIL_DIVERGENCE_MIN = 1e-2
_TAIL_SQUARES_MAX = 1e-2


def validate_schedule(stepsizes, horizon: int) -> ScheduleEvidence:
    """Probe a positive stepsize schedule against the convergence conditions.

    ``stepsizes`` is a callable k -> alpha_k on 1-based indices; it may be
    numpy-vectorized or scalar-only.  A schedule is accepted when the tail
    sum over (horizon/2, horizon] exceeds a fixed floor (divergent sum)
    while the tail sum of squares stays under a fixed ceiling (convergent
    sum of squares); 1/k passes both, constants fail the second, and 1/k^2
    fails the first.
    """
    if horizon < 4:
        raise ValueError("horizon must be at least 4")
    indices = np.arange(1, horizon + 1, dtype=np.float64)
    try:
        values = np.asarray(stepsizes(indices), dtype=np.float64)
        if values.shape != indices.shape:
            raise TypeError("not vectorized")
    except (TypeError, ValueError):
        values = np.fromiter(
            (stepsizes(int(k)) for k in range(1, horizon + 1)),
            dtype=np.float64,
            count=horizon,
        )
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ValueError("stepsizes must be positive and finite")
    squares = values * values
    half = horizon // 2
    total = float(values.sum())
    total_squares = float(squares.sum())
    tail = float(values[half:].sum())
    tail_squares = float(squares[half:].sum())
    accepted = tail > _TAIL_DIVERGENCE_MIN and tail_squares < _TAIL_SQUARES_MAX
    return ScheduleEvidence(
        sum_diverges_evidence=total,
        sum_squares=total_squares,
        accepted=accepted,
    )
