"""A 13x13 rooms-with-corridor gridworld with four cell-to-cell actions.

Coordinates are (row, col) with row 0 at the top; "up" decrements the row.
Moves into walls or off the grid are not executed: the agent stays put but
the step is still charged.  Episodes are scored over *trajectory cells*:
a path's length counts the states visited including the start, so a path
of k moves has length k + 1.  The BFS oracle, by contrast, reports moves
(graph edges); the two views differ by exactly one everywhere.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum

from .errors import ModelError

__all__ = [
    "Action",
    "GridMap",
    "GridState",
    "parse_map",
    "load_map_file",
    "default_map",
    "default_map_text",
    "step",
    "shortest_path_bfs",
    "shortest_path_cells",
    "enumerate_states",
    "TransitionTables",
    "build_transition_tables",
    "DEFAULT_STEP_REWARD",
    "DEFAULT_GOAL_REWARD",
]

GRID_SIZE = 13

DEFAULT_STEP_REWARD = -1.0
DEFAULT_GOAL_REWARD = 100.0


class Action(IntEnum):
    """The four cell-to-cell moves, in their canonical index order."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


#: (row delta, col delta) per action, indexable by Action value.
ACTION_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class GridState:
    """A position on the grid; must be a free cell of its map."""

    position: tuple[int, int]


@dataclass(frozen=True)
class GridMap:
    """Walls plus the start and goal cells of a 13x13 episodic maze."""

    width: int
    height: int
    blocked: frozenset[tuple[int, int]]
    start: tuple[int, int]
    goal: tuple[int, int]

    def __post_init__(self) -> None:
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise ValueError(f"{name} cell {cell} is outside the grid")
            if cell in self.blocked:
                raise ValueError(f"{name} cell {cell} is a wall")

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        row, col = cell
        return 0 <= row < self.height and 0 <= col < self.width

    def is_free(self, cell: tuple[int, int]) -> bool:
        return self.in_bounds(cell) and cell not in self.blocked


def parse_map(text: str) -> GridMap:
    """Parse the 13x13 map format: '#' wall, '.' free, one 'S', one 'G'.

    The goal must be reachable from the start; anything else is rejected.
    """
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if len(lines) != GRID_SIZE:
        raise ValueError(f"map must have {GRID_SIZE} lines, got {len(lines)}")
    blocked: set[tuple[int, int]] = set()
    start: tuple[int, int] | None = None
    goal: tuple[int, int] | None = None
    for row, line in enumerate(lines):
        if len(line) != GRID_SIZE:
            raise ValueError(
                f"map line {row} must have {GRID_SIZE} characters, got {len(line)}"
            )
        for col, char in enumerate(line):
            if char == "#":
                blocked.add((row, col))
            elif char == "S":
                if start is not None:
                    raise ValueError("map has more than one start cell")
                start = (row, col)
            elif char == "G":
                if goal is not None:
                    raise ValueError("map has more than one goal cell")
                goal = (row, col)
            elif char != ".":
                raise ValueError(
                    f"map line {row} column {col}: invalid character {char!r}"
                )
    if start is None:
        raise ValueError("map has no start cell")
    if goal is None:
        raise ValueError("map has no goal cell")
    grid_map = GridMap(
        width=GRID_SIZE,
        height=GRID_SIZE,
        blocked=frozenset(blocked),
        start=start,
        goal=goal,
    )
    if shortest_path_bfs(grid_map) < 0:
        raise ModelError("goal is not reachable from the start")
    return grid_map


def load_map_file(path) -> GridMap:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_map(handle.read())


def step(
    grid_map: GridMap,
    state: GridState,
    action: Action,
    step_reward: float = DEFAULT_STEP_REWARD,
    goal_reward: float = DEFAULT_GOAL_REWARD,
) -> tuple[GridState, float, bool]:
    """Take one action: move if the target cell is free, else stay put.

    Every step earns step_reward; arriving at the goal additionally earns
    goal_reward and ends the episode.
    """
    if not grid_map.is_free(state.position):
        raise ValueError(f"state {state.position} is not a free cell")
    if state.position == grid_map.goal:
        raise ValueError("cannot step from the goal state")
    delta = ACTION_DELTAS[Action(action)]
    target = (state.position[0] + delta[0], state.position[1] + delta[1])
    next_position = target if grid_map.is_free(target) else state.position
    reward = step_reward
    done = next_position == grid_map.goal
    if done:
        reward += goal_reward
    return GridState(next_position), reward, done


def shortest_path_bfs(grid_map: GridMap) -> int:
    """Moves (graph edges) on a shortest start-to-goal path; -1 if unreachable.

    Uses the same blocked-move graph as step: neighbors are the four
    adjacent free cells.
    """
    if grid_map.start == grid_map.goal:
        return 0
    distances = {grid_map.start: 0}
    queue = deque([grid_map.start])
    while queue:
        cell = queue.popleft()
        base = distances[cell]
        for delta in ACTION_DELTAS:
            neighbor = (cell[0] + delta[0], cell[1] + delta[1])
            if neighbor in distances or not grid_map.is_free(neighbor):
                continue
            if neighbor == grid_map.goal:
                return base + 1
            distances[neighbor] = base + 1
            queue.append(neighbor)
    return -1


def shortest_path_cells(grid_map: GridMap) -> int:
    """Cells visited along a shortest start-to-goal trajectory, start included.

    This is the path-length convention used for episode step counts and
    greedy-policy evaluation: one more than the BFS move count.
    """
    moves = shortest_path_bfs(grid_map)
    return moves + 1 if moves >= 0 else -1


def enumerate_states(grid_map: GridMap) -> list[GridState]:
    """All free cells in row-major order; the canonical state indexing."""
    return [
        GridState((row, col))
        for row in range(grid_map.height)
        for col in range(grid_map.width)
        if (row, col) not in grid_map.blocked
    ]


@dataclass(frozen=True)
class TransitionTables:
    """step() memoized over the state enumeration, for index-based loops.

    next_state[s][a], rewards[s][a], done[s][a] tabulate every transition;
    entries for the goal state are self-loops (episodes never step from it).
    """

    num_states: int
    num_actions: int
    start_index: int
    goal_index: int
    next_state: tuple[tuple[int, ...], ...]
    rewards: tuple[tuple[float, ...], ...]
    done: tuple[tuple[bool, ...], ...]


def build_transition_tables(
    grid_map: GridMap,
    step_reward: float = DEFAULT_STEP_REWARD,
    goal_reward: float = DEFAULT_GOAL_REWARD,
) -> TransitionTables:
    states = enumerate_states(grid_map)
    index_of = {state.position: i for i, state in enumerate(states)}
    next_rows, reward_rows, done_rows = [], [], []
    for state in states:
        next_row, reward_row, done_row = [], [], []
        for action in Action:
            if state.position == grid_map.goal:
                next_row.append(index_of[state.position])
                reward_row.append(0.0)
                done_row.append(True)
                continue
            next_state, reward, done = step(
                grid_map, state, action, step_reward, goal_reward
            )
            next_row.append(index_of[next_state.position])
            reward_row.append(reward)
            done_row.append(done)
        next_rows.append(tuple(next_row))
        reward_rows.append(tuple(reward_row))
        done_rows.append(tuple(done_row))
    return TransitionTables(
        num_states=len(states),
        num_actions=len(Action),
        start_index=index_of[grid_map.start],
        goal_index=index_of[grid_map.goal],
        next_state=tuple(next_rows),
        rewards=tuple(reward_rows),
        done=tuple(done_rows),
    )


_DEFAULT_MAP: GridMap | None = None


def default_map_text() -> str:
    """Text of the shipped rooms-with-corridor map."""
    from importlib.resources import files

    return files("qdecide.data").joinpath("default_map.txt").read_text(
        encoding="utf-8"
    )


def default_map() -> GridMap:
    """The shipped map: four rooms inside a perimeter corridor, S=(4,4), G=(8,8)."""
    global _DEFAULT_MAP
    if _DEFAULT_MAP is None:
        _DEFAULT_MAP = parse_map(default_map_text())
    return _DEFAULT_MAP
