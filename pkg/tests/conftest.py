"""Shared fixtures and generators for the test suite."""

import numpy as np
import pytest

from qdecide.planner import TabularMdp


@pytest.fixture
def rng():
    """A fresh deterministic random generator."""
    return np.random.default_rng(12345)


def make_rng(seed: int = 12345):
    return np.random.default_rng(seed)


def random_ssp_mdp(
    seed: int, max_states: int = 8, max_actions: int = 8
) -> TabularMdp:
    """A random stochastic-shortest-path MDP with one absorbing state.

    Every action keeps some probability of reaching the absorbing state,
    so value iteration always has a finite fixed point.
    """
    gen = make_rng(seed)
    num_states = int(gen.integers(2, max_states + 1))
    num_actions = int(gen.integers(1, max_actions + 1))
    absorbing = num_states - 1
    transitions = gen.random((num_states, num_actions, num_states))
    transitions[:, :, absorbing] += 0.25
    transitions /= transitions.sum(axis=2, keepdims=True)
    costs = gen.random((num_states, num_actions, num_states)) * 4.0
    transitions[absorbing] = 0.0
    transitions[absorbing, :, absorbing] = 1.0
    costs[absorbing] = 0.0
    return TabularMdp(
        num_states, num_actions, transitions, costs, frozenset({absorbing})
    )
