"""Quantum-accelerated decision stack: Grover action search and amplitude-policy RL.

The package simulates small quantum registers densely on a classical machine
and uses them for two things:

* Grover amplitude amplification as the action-selection subroutine of a
  tabular MDP planner (quadratic query savings over linear argmin scans).
* A reinforcement learner whose per-state policy is an amplitude vector;
  actions are sampled with Born-rule probabilities and amplitudes are
  reweighted multiplicatively from TD feedback.

Both are exercised on a 13x13 four-room gridworld with a perimeter corridor.
"""

from .errors import CapacityError, DivergenceError, ModelError

__all__ = ["CapacityError", "DivergenceError", "ModelError"]

__version__ = "0.1.0"
