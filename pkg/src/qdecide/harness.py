"""Experiment drivers tying the stack together.

Every command here is a pure function from explicit inputs (plus a seed) to
a result dictionary carrying structured fields, a human-readable ``text``
rendering, and — for the run-log commands — a deterministic ``csv`` string
(LF line endings, floats at full round-trip precision).  The HTTP service
and the command-line client are both thin shells over these functions.
"""

from __future__ import annotations

import json
import os

import numpy as np

from . import gridworld, grover, planner, qrl

__all__ = [
    "cmd_grover",
    "cmd_table1",
    "cmd_plan",
    "cmd_plan_file",
    "cmd_map_check",
    "cmd_train",
    "cmd_train_file",
    "cmd_sweep",
    "cmd_sweep_file",
    "TRAIN_CSV_HEADER",
    "SWEEP_CSV_HEADER",
    "TABLE1_NUM_STATES",
    "TABLE1_ACTION_COUNTS",
    "EXPECTED_OPTIMUM_CELLS",
]

TRAIN_CSV_HEADER = "seed,episode,steps,total_reward,max_abs_delta_v"
SWEEP_CSV_HEADER = "alpha,seed,episode,steps,total_reward,max_abs_delta_v,status"

TABLE1_NUM_STATES = 10**4
TABLE1_ACTION_COUNTS = [10**2, 10**3, 10**4, 10**5, 10**6, 10**7, 10**8]

#: The shipped map's optimal start-to-goal trajectory, counted in cells.
EXPECTED_OPTIMUM_CELLS = 25

STATUS_CONVERGED = "converged"
STATUS_NO_CONVERGE = "no-converge"


def _csv_number(value) -> str:
    """Full-precision, round-trippable rendering for CSV cells."""
    return repr(float(value))


def cmd_grover(qubits: int, target: int, trials: int, seed: int) -> dict:
    """Run repeated searches for one target and compare against prediction."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    problem = grover.GroverProblem(num_qubits=qubits, marked_index=target)
    rng = np.random.default_rng(seed)
    successes = 0
    csv_lines = ["trial,outcome,succeeded"]
    iterations = grover.optimal_iterations(qubits)
    predicted = grover.predicted_amplitude(qubits, iterations) ** 2
    for trial in range(1, trials + 1):
        report = grover.search(problem, rng)
        successes += report.succeeded
        csv_lines.append(
            f"{trial},{report.measured_outcome},{int(report.succeeded)}"
        )
    empirical = successes / trials
    text = "\n".join(
        [
            f"qubits: {qubits} (search space 2^{qubits} = {2**qubits})",
            f"target index: {target}",
            f"theta: {problem.theta:.6f} rad",
            f"iterations (oracle queries per run): {iterations}",
            f"predicted success: {predicted:.6f}",
            f"empirical success: {empirical:.6f} over {trials} trials",
        ]
    )
    return {
        "qubits": qubits,
        "target": target,
        "theta": problem.theta,
        "iterations": iterations,
        "oracle_queries": iterations,
        "predicted_success": predicted,
        "empirical_success": empirical,
        "trials": trials,
        "text": text,
        "csv": "\n".join(csv_lines) + "\n",
    }


def cmd_table1() -> dict:
    """Classical-vs-amplified query counts at N_s = 10^4, seven sizes of N_a."""
    rows = planner.complexity_table(TABLE1_NUM_STATES, TABLE1_ACTION_COUNTS)
    header = f"{'N_a':>10}  {'classical N_s*N_a':>18}  {'quantum N_s*sqrt(N_a)':>22}"
    lines = [f"query counts for N_s = {TABLE1_NUM_STATES}", header]
    structured = []
    for count, classical, quantum in rows:
        lines.append(f"{count:>10}  {classical:>18}  {quantum:>22}")
        structured.append(
            {"num_actions": count, "classical": classical, "quantum": quantum}
        )
    return {
        "num_states": TABLE1_NUM_STATES,
        "rows": structured,
        "text": "\n".join(lines),
    }


def cmd_plan(mdp_document: dict, tolerance: float = 1e-9, seed: int = 0) -> dict:
    """Solve an MDP and pick each state's action by amplified search.

    Reports the optimal values, the per-state chosen actions (identical to
    the classical argmin; the search retries and falls back on failure),
    and the oracle queries spent.
    """
    mdp = planner.mdp_from_document(mdp_document)
    values = planner.value_iteration(mdp, tolerance)
    rng = np.random.default_rng(seed)
    states = []
    total_queries = 0
    for state in range(mdp.num_states):
        action, queries = planner.grover_select_action(mdp, state, values, rng)
        total_queries += queries
        states.append(
            {
                "state": state,
                "value": float(values.values[state]),
                "action": action,
                "oracle_queries": queries,
            }
        )
    lines = [
        f"states: {mdp.num_states}, actions: {mdp.num_actions}, "
        f"absorbing: {sorted(mdp.absorbing)}",
        f"{'state':>6}  {'V*':>12}  {'action':>6}  {'queries':>7}",
    ]
    for row in states:
        lines.append(
            f"{row['state']:>6}  {row['value']:>12.6f}  "
            f"{row['action']:>6}  {row['oracle_queries']:>7}"
        )
    lines.append(
        f"total oracle queries: {total_queries} "
        f"(linear scans would probe {mdp.num_states * mdp.num_actions} "
        f"action values)"
    )
    return {
        "num_states": mdp.num_states,
        "num_actions": mdp.num_actions,
        "values": [float(v) for v in values.values],
        "states": states,
        "total_oracle_queries": total_queries,
        "text": "\n".join(lines),
    }


def cmd_plan_file(mdp_path, tolerance: float = 1e-9, seed: int = 0) -> dict:
    with open(mdp_path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{mdp_path}: not valid JSON: {exc}") from exc
    return cmd_plan(document, tolerance, seed)


def cmd_map_check(map_text: str | None = None) -> dict:
    """Validate a map document and check its optimum against the target.

    Without a map document, checks the shipped default map.
    """
    if map_text is None:
        map_text = gridworld.default_map_text()
    grid_map = gridworld.parse_map(map_text)
    num_states = len(gridworld.enumerate_states(grid_map))
    moves = gridworld.shortest_path_bfs(grid_map)
    cells = gridworld.shortest_path_cells(grid_map)
    ok = cells == EXPECTED_OPTIMUM_CELLS
    verdict = "PASS" if ok else "FAIL"
    text = "\n".join(
        [
            f"dimensions: {grid_map.width}x{grid_map.height}",
            f"free states: {num_states}",
            f"start: {grid_map.start}, goal: {grid_map.goal}",
            f"shortest path: {moves} moves = {cells} cells",
            f"expected optimum: {EXPECTED_OPTIMUM_CELLS} cells "
            f"({EXPECTED_OPTIMUM_CELLS - 1} moves) -> {verdict}",
        ]
    )
    return {
        "width": grid_map.width,
        "height": grid_map.height,
        "num_states": num_states,
        "start": list(grid_map.start),
        "goal": list(grid_map.goal),
        "bfs_moves": moves,
        "path_cells": cells,
        "expected_cells": EXPECTED_OPTIMUM_CELLS,
        "ok": ok,
        "text": text,
    }


def _resolve_map(config: qrl.QrlConfig, map_text: str | None) -> gridworld.GridMap:
    if map_text is not None:
        return gridworld.parse_map(map_text)
    if config.map_path:
        return gridworld.load_map_file(config.map_path)
    return gridworld.default_map()


def _run_training(
    config: qrl.QrlConfig, grid_map: gridworld.GridMap
) -> tuple[list[qrl.EpisodeRecord], dict]:
    tables = gridworld.build_transition_tables(
        grid_map, config.step_reward, config.goal_reward
    )
    agent = qrl.new_agent(tables.num_states, tables.num_actions, config)
    log = qrl.train(agent, grid_map)
    greedy_cells = qrl.greedy_path_cells(agent, tables)
    optimal_cells = gridworld.shortest_path_cells(grid_map)
    converged = greedy_cells == optimal_cells
    summary = {
        "alpha": config.alpha,
        "seed": config.seed,
        "episodes": len(log),
        "final_steps": log[-1].steps if log else 0,
        "greedy_path_cells": greedy_cells,
        "optimal_path_cells": optimal_cells,
        "status": STATUS_CONVERGED if converged else STATUS_NO_CONVERGE,
    }
    return log, summary


def _train_csv_rows(seed: int, log: list[qrl.EpisodeRecord]) -> list[str]:
    return [
        f"{seed},{episode},{record.steps},"
        f"{_csv_number(record.total_reward)},{_csv_number(record.max_abs_delta_v)}"
        for episode, record in enumerate(log, start=1)
    ]


def _summary_text(summary: dict) -> str:
    return (
        f"alpha={summary['alpha']} seed={summary['seed']}: "
        f"{summary['episodes']} episodes, final episode steps "
        f"{summary['final_steps']}, greedy path {summary['greedy_path_cells']} "
        f"cells (optimal {summary['optimal_path_cells']}) -> {summary['status']}"
    )


def cmd_train(config_document: dict, map_text: str | None = None) -> dict:
    """One training run; returns the per-episode CSV log and a summary."""
    config = qrl.config_from_document(config_document)
    grid_map = _resolve_map(config, map_text)
    log, summary = _run_training(config, grid_map)
    csv_text = "\n".join([TRAIN_CSV_HEADER] + _train_csv_rows(config.seed, log))
    return {
        "summary": summary,
        "text": _summary_text(summary),
        "csv": csv_text + "\n",
    }


def cmd_sweep(
    config_document: dict,
    alphas: list[float],
    seeds: list[int],
    map_text: str | None = None,
) -> dict:
    """Train once per (alpha, seed) pair; rows ordered by (alpha, seed).

    Each run starts from a fresh agent with the base config's other keys;
    the run's final status (greedy path optimal or not) is repeated on its
    rows.
    """
    if not alphas:
        raise ValueError("sweep needs at least one alpha")
    if not seeds:
        raise ValueError("sweep needs at least one seed")
    base = qrl.config_from_document(config_document)
    grid_map = _resolve_map(base, map_text)
    lines = [SWEEP_CSV_HEADER]
    summaries = []
    for alpha in alphas:
        for seed in seeds:
            document = dict(config_document)
            document["alpha"] = alpha
            document["seed"] = seed
            config = qrl.config_from_document(document)
            log, summary = _run_training(config, grid_map)
            summaries.append(summary)
            status = summary["status"]
            alpha_text = _csv_number(alpha)
            for episode, record in enumerate(log, start=1):
                lines.append(
                    f"{alpha_text},{seed},{episode},{record.steps},"
                    f"{_csv_number(record.total_reward)},"
                    f"{_csv_number(record.max_abs_delta_v)},{status}"
                )
    text = "\n".join(_summary_text(summary) for summary in summaries)
    return {
        "runs": summaries,
        "text": text,
        "csv": "\n".join(lines) + "\n",
    }


def _write_text(path, content: str) -> None:
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(content)


def _load_config_file(config_path) -> dict:
    with open(config_path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{config_path}: not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ValueError(f"{config_path}: config must be a JSON object")
    if document.get("map_path"):
        # Paths inside a config file resolve relative to the file itself.
        base = os.path.dirname(os.path.abspath(os.fspath(config_path)))
        document["map_path"] = os.path.normpath(
            os.path.join(base, document["map_path"])
        )
    return document


def cmd_train_file(config_path, out_path=None) -> dict:
    """File-level wrapper: read a config, train, optionally write the CSV."""
    result = cmd_train(_load_config_file(config_path))
    if out_path is not None:
        _write_text(out_path, result["csv"])
    return result


def cmd_sweep_file(config_path, alphas, seeds, out_path=None) -> dict:
    """File-level wrapper for sweeps; see cmd_sweep."""
    result = cmd_sweep(_load_config_file(config_path), alphas, seeds)
    if out_path is not None:
        _write_text(out_path, result["csv"])
    return result
