"""Dense simulation of n-qubit registers.

A register over n qubits is a complex amplitude vector of length 2^n.  Basis
index x encodes the qubits most-significant-first, so for a register holding
an input part (n qubits) followed by an output part (k qubits), basis index
``x * 2**k + y`` is the joint state |x, y>.

All operations return new registers; nothing mutates in place.  Measurement
is the only non-unitary operation, and all randomness flows through an
explicitly passed seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

#: Largest simulable register: 2**20 amplitudes is 16 MiB at complex128.
MAX_QUBITS = 20

#: Tolerance for the normalization invariant sum |C_x|^2 = 1.
NORM_TOL = 1e-10


def _as_amplitudes(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("amplitudes must be a one-dimensional vector")
    return arr


@dataclass(frozen=True)
class QuantumRegister:
    """An n-qubit state: 2^n complex amplitudes, normalized to 1.

    Amplitudes are plain complex numbers (``.real``/``.imag`` components,
    both finite); the modulus squared of entry x is the probability of
    measuring basis outcome x.
    """

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("a register needs at least one qubit")
        if self.num_qubits > MAX_QUBITS:
            raise CapacityError(
                f"{self.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit "
                f"simulation cap"
            )
        arr = _as_amplitudes(self.amplitudes)
        if arr.shape[0] != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for "
                f"{self.num_qubits} qubits, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sum(arr.real**2 + arr.imag**2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"register is not normalized: sum |C|^2 = {norm!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def num_amplitudes(self) -> int:
        return 2**self.num_qubits


def init_basis(num_qubits: int, basis_index: int) -> QuantumRegister:
    """Prepare the computational basis state |basis_index> on num_qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise CapacityError(
            f"register width {num_qubits} outside the supported"
            f" 1..{MAX_QUBITS} qubit range"
        )
    size = 2**num_qubits
    if not 0 <= basis_index < size:
        raise ValueError(
            f"basis index {basis_index} out of range for {num_qubits} qubits"
        )
    amplitudes = np.zeros(size, dtype=np.complex128)
    amplitudes[basis_index] = 1.0
    return QuantumRegister(num_qubits, amplitudes)


def hadamard_all(register: QuantumRegister) -> QuantumRegister:
    """Apply a Hadamard gate to every qubit (the n-fold tensor H^(x)n).

    From |0...0> this prepares the equal-weight superposition with every
    amplitude 1/sqrt(2^n).  The transform is its own inverse.
    """
    n = register.num_qubits
    amps = register.amplitudes.reshape((2,) * n)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for axis in range(n):
        lo = np.take(amps, 0, axis=axis)
        hi = np.take(amps, 1, axis=axis)
        amps = np.stack(((lo + hi) * inv_sqrt2, (lo - hi) * inv_sqrt2), axis=axis)
    return QuantumRegister(n, amps.reshape(-1))


def apply_function_oracle(
    register: QuantumRegister, num_input_qubits: int, f
) -> QuantumRegister:
    """Reversible function evaluation |x, y> -> |x, y XOR f(x)>.

    The register holds n = num_input_qubits input qubits (high bits) and
    k = num_qubits - n output qubits (low bits).  f maps [0, 2^n) into
    [0, 2^k).  With the output part initialized to |0> this acts as
    |x, 0> -> |x, f(x)>; the XOR form keeps the map a basis permutation
    (unitary) for any total f.
    """
    n = num_input_qubits
    k = register.num_qubits - n
    if n < 1 or k < 1:
        raise ValueError(
            "oracle needs at least one input and one output qubit "
            f"(got {n} input of {register.num_qubits} total)"
        )
    in_size, out_size = 2**n, 2**k
    fx = np.array([int(f(x)) for x in range(in_size)], dtype=np.int64)
    if fx.min() < 0 or fx.max() >= out_size:
        raise ValueError(
            f"function value out of range [0, {out_size}) for {k} output qubits"
        )
    grid = register.amplitudes.reshape(in_size, out_size)
    ys = np.arange(out_size, dtype=np.int64)
    new_grid = np.empty_like(grid)
    # Permute within each input row: amplitude at (x, y) moves to (x, y ^ f(x)).
    new_grid[np.arange(in_size)[:, None], ys[None, :] ^ fx[:, None]] = grid
    return QuantumRegister(register.num_qubits, new_grid.reshape(-1))


def probabilities(register: QuantumRegister) -> np.ndarray:
    """Per-outcome measurement probabilities |C_x|^2 (sums to 1)."""
    amps = register.amplitudes
    return amps.real**2 + amps.imag**2


def measure_all(register: QuantumRegister, rng) -> tuple[int, QuantumRegister]:
    """Sample a basis outcome with probability |C_x|^2 and collapse to it.

    Returns (outcome, collapsed register).  Deterministic given the
    generator's state.
    """
    probs = probabilities(register)
    cumulative = np.cumsum(probs)
    draw = rng.random()
    outcome = int(np.searchsorted(cumulative, draw * cumulative[-1], side="right"))
    outcome = min(outcome, register.num_amplitudes - 1)
    return outcome, init_basis(register.num_qubits, outcome)
