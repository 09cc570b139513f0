"""Grover amplitude amplification over simulated registers.

One Grover iteration composes two reflections: a phase flip that negates the
marked basis state's amplitude, then the "inversion about the mean" diffusion
reflection.  Starting from the uniform superposition on n qubits, the marked
amplitude after j iterations is sin((2j+1) * theta) with sin^2(theta) = 1/2^n,
so running int(pi / (4 * theta)) iterations drives the success probability to
1 - O(1/2^n) using only O(sqrt(2^n)) oracle applications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .statevector import (
    MAX_QUBITS,
    QuantumRegister,
    hadamard_all,
    init_basis,
    measure_all,
)

__all__ = [
    "GroverProblem",
    "GroverReport",
    "diffusion",
    "phase_flip",
    "grover_iterate",
    "predicted_amplitude",
    "optimal_iterations",
    "search",
    "marked_index_from_predicate",
]


def _theta(num_qubits: int) -> float:
    """Rotation angle: sin^2(theta) = 1/2^n, theta in (0, pi/2]."""
    return math.asin(math.sqrt(1.0 / 2**num_qubits))


@dataclass(frozen=True)
class GroverProblem:
    """A single-target search instance on an n-qubit register.

    theta is derived from num_qubits; passing it explicitly is only useful
    for round-tripping and must agree with arcsin(sqrt(1/2^n)).
    """

    num_qubits: int
    marked_index: int
    theta: float = float("nan")

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("search needs at least one qubit")
        if not 0 <= self.marked_index < 2**self.num_qubits:
            raise ValueError(
                f"marked index {self.marked_index} out of range for "
                f"{self.num_qubits} qubits"
            )
        expected = _theta(self.num_qubits)
        if math.isnan(self.theta):
            object.__setattr__(self, "theta", expected)
        elif abs(self.theta - expected) > 1e-12:
            raise ValueError(
                f"theta {self.theta!r} does not satisfy sin^2(theta) = 1/2^n"
            )


@dataclass(frozen=True)
class GroverReport:
    """Outcome of one search run: schedule, cost, prediction, measurement."""

    iterations_run: int
    oracle_queries: int
    predicted_success: float
    measured_outcome: int
    succeeded: bool

    def __post_init__(self) -> None:
        if self.oracle_queries != self.iterations_run:
            raise ValueError("each Grover iteration costs exactly one oracle query")
        if not 0.0 <= self.predicted_success <= 1.0:
            raise ValueError("predicted success must be a probability")


def phase_flip(register: QuantumRegister, marked_index: int) -> QuantumRegister:
    """Negate the marked basis state's amplitude, leaving all others alone."""
    if not 0 <= marked_index < register.num_amplitudes:
        raise ValueError(f"marked index {marked_index} out of range")
    amps = register.amplitudes.copy()
    amps[marked_index] = -amps[marked_index]
    return QuantumRegister(register.num_qubits, amps)


def diffusion(register: QuantumRegister) -> QuantumRegister:
    """Reflect about the uniform state: each a_i becomes 2<a> - a_i."""
    amps = register.amplitudes
    mean = amps.mean()
    return QuantumRegister(register.num_qubits, 2.0 * mean - amps)


def grover_iterate(register: QuantumRegister, marked_index: int) -> QuantumRegister:
    """One Grover iteration U_G: phase flip on the mark, then diffusion."""
    return diffusion(phase_flip(register, marked_index))


def predicted_amplitude(num_qubits: int, iterations: int) -> float:
    """Closed form for the marked amplitude: sin((2j+1) * theta)."""
    if iterations < 0:
        raise ValueError("iteration count must be non-negative")
    return math.sin((2 * iterations + 1) * _theta(num_qubits))


def optimal_iterations(num_qubits: int) -> int:
    """Iteration schedule int(pi / (4 * theta)), truncated toward zero.

    The ratio is nudged by 1e-12 before truncating: at n=1 the exact value
    is 1.0 but floating-point evaluation lands a hair below it, and the
    schedule must not round an exact integer down.
    """
    if num_qubits < 1:
        raise ValueError("search needs at least one qubit")
    ratio = math.pi / (4.0 * _theta(num_qubits))
    return int(ratio + 1e-12)


def search(problem: GroverProblem, rng) -> GroverReport:
    """Run a full Grover search: prepare, iterate optimally, measure once."""
    n = problem.num_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    register = hadamard_all(init_basis(n, 0))
    iterations = optimal_iterations(n)
    for _ in range(iterations):
        register = grover_iterate(register, problem.marked_index)
    outcome, _ = measure_all(register, rng)
    amplitude = predicted_amplitude(n, iterations)
    return GroverReport(
        iterations_run=iterations,
        oracle_queries=iterations,
        predicted_success=amplitude * amplitude,
        measured_outcome=outcome,
        succeeded=outcome == problem.marked_index,
    )


def marked_index_from_predicate(
    num_qubits: int, predicate, verify: bool | None = None
) -> int:
    """Find the unique index satisfying predicate, for building a search.

    The closed-form analysis assumes exactly one marked element, so when
    ``verify`` is true (the default under __debug__) the whole domain is
    enumerated and a non-unique predicate is rejected.  With verify off the
    first match is trusted, which callers may use on hot paths.
    """
    if verify is None:
        verify = __debug__
    size = 2**num_qubits
    found = -1
    for x in range(size):
        if predicate(x):
            if found >= 0:
                raise ValueError(
                    f"predicate marks both {found} and {x}; the search "
                    f"target must be unique"
                )
            found = x
            if not verify:
                return found
    if found < 0:
        raise ValueError("predicate marks no index in the search domain")
    return found
