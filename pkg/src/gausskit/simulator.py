"""Statevector simulation: exact, post-selected, and noisy.

Two backends share one contract:

* ``simulate_exact`` carries every live ancilla as a real tensor factor
  and projects it at its measurement barrier; memory is 2**(data + live).
* ``simulate_postselected`` never materializes ancilla: each post-selected
  window gate becomes a diagonal contraction of the data register, which
  is what makes 20+ qubit runs cheap.

Both record one success probability per barrier; their product is the
squared subnormalization of the preparation.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import resources
from .circuit import Circuit, LayeredCircuit, MeasureBarrier
from .gates import (Gate, GateKind, GaussianSpec, ParameterError,
                    gate_matrix, rotation_kernel)
from .optimizer import ErrorBudget, expected_t_depth

MAX_QUBITS = 26


class CapacityError(RuntimeError):
    """The simulation would exceed the qubit or memory budget."""


def _check_capacity(n_bits: int, copies: int = 4) -> None:
    if n_bits > MAX_QUBITS:
        raise CapacityError(
            f"{n_bits} qubits exceeds the {MAX_QUBITS}-qubit simulator budget")
    limit_mb = os.environ.get("GAUSSKIT_MEM_LIMIT_MB")
    if limit_mb:
        need = (1 << n_bits) * 16 * copies / 1e6
        if need > float(limit_mb):
            raise CapacityError(
                f"state of {need:.0f} MB exceeds GAUSSKIT_MEM_LIMIT_MB={limit_mb}")


@dataclass
class StateVector:
    """Complex amplitudes plus the cumulative post-selection probability."""

    n_qubits: int
    amplitudes: np.ndarray
    cumulative_success: float = 1.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class SimReport:
    subnormalization: float
    layer_probs: tuple[float, ...]
    data_qubit_count: int
    l2_error: float | None = None
    expected_t_depth: float | None = None


NoiseRealization = dict[Gate, np.ndarray]


def sample_perturbation(delta: float, rng: np.random.Generator) -> np.ndarray:
    """Unitary exp(-i*(phi/2)*(n.sigma)) with uniform axis and ||P - I|| = delta.

    The eigenvalues are exp(-+i*phi/2), so the operator-norm distance from
    identity is 2*sin(phi/4); phi = 4*arcsin(delta/2) pins it to delta.
    """
    if delta == 0.0:
        return np.eye(2, dtype=complex)
    if not (0.0 < delta < 0.5):
        raise ParameterError("perturbation size must lie in [0, 0.5)")
    v = rng.normal(size=3)
    nx, ny, nz = v / np.linalg.norm(v)
    phi = 4.0 * math.asin(delta / 2.0)
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array(
        [[c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
         [-1j * s * (nx + 1j * ny), c + 1j * s * nz]],
        dtype=complex,
    )


def apply_noisy_rotation(gate: Gate, delta: float, rng: np.random.Generator,
                         alpha: float) -> np.ndarray:
    """The gate's full matrix left-multiplied by a random target perturbation."""
    ideal = gate_matrix(gate, alpha)
    if delta == 0.0:
        return ideal
    p = sample_perturbation(delta, rng)
    return _embed_target_perturbation(p, len(gate.controls)) @ ideal


def _embed_target_perturbation(p: np.ndarray, n_controls: int) -> np.ndarray:
    """Lift a 2x2 target perturbation to the gate's full space (target = MSB)."""
    return np.kron(p, np.eye(1 << n_controls, dtype=complex))


def _noise_delta(gate: Gate, budget: ErrorBudget) -> float:
    if gate.kind in (GateKind.H, GateKind.X, GateKind.CNOT):
        return 0.0
    if gate.synthesis_error is not None:
        return gate.synthesis_error
    return budget.delta_single if not gate.controls else budget.delta_controlled


def realize_noise(gates, budget: ErrorBudget,
                  rng: np.random.Generator) -> NoiseRealization:
    """Draw one target perturbation per rotation gate, keyed by the gate.

    Gates are frozen values, so the realization survives layer reordering;
    Clifford gates are exact (they cost no T gates).
    """
    realization: NoiseRealization = {}
    for gate in gates:
        delta = _noise_delta(gate, budget)
        if delta > 0.0:
            realization[gate] = sample_perturbation(delta, rng)
    return realization


def _apply_unitary(state: np.ndarray, mat: np.ndarray,
                   positions: list[int], total_bits: int) -> np.ndarray:
    """Apply mat to the bits at ``positions`` (matrix qubit 0 = its MSB)."""
    k = len(positions)
    if k == 1:
        # sliced in-place update avoids the transpose copies of the
        # general path; this is the hot loop of large prelude registers
        q = positions[0]
        view = state.reshape(-1, 2, 1 << q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
        view[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b
        return state
    t = state.reshape([2] * total_bits)
    axes = [total_bits - 1 - p for p in positions]
    t = np.moveaxis(t, axes, range(k))
    shape = t.shape
    t = (mat @ t.reshape(1 << k, -1)).reshape(shape)
    t = np.moveaxis(t, range(k), axes)
    return t.reshape(-1)


def _gate_full_matrix(gate: Gate, alpha: float,
                      noise: NoiseRealization | None) -> np.ndarray:
    mat = gate_matrix(gate, alpha)
    if noise and gate in noise:
        mat = _embed_target_perturbation(noise[gate], len(gate.controls)) @ mat
    return mat


def simulate_exact(circuit: Circuit,
                   noise: NoiseRealization | None = None
                   ) -> tuple[StateVector, SimReport]:
    """Full-unitary simulation; ancilla are materialized on first touch.

    Each measurement barrier projects its ancilla onto |0>, records the
    joint probability, renormalizes, and frees the memory.  Fails with
    CapacityError if data + live ancilla ever exceeds the qubit budget.
    """
    n_data = circuit.data_qubits
    _check_capacity(n_data)
    state = np.zeros(1 << n_data, dtype=complex)
    state[0] = 1.0
    position: dict[int, int] = {}  # live ancilla -> bit position
    total = n_data
    probs: list[float] = []

    def pos_of(q: int) -> int:
        nonlocal state, total
        if q < n_data:
            return q
        if q not in position:
            _check_capacity(total + 1)
            state = np.concatenate([state, np.zeros_like(state)])
            position[q] = total
            total += 1
        return position[q]

    for elem in circuit.elements:
        if isinstance(elem, MeasureBarrier):
            live = [a for a in elem.ancilla if a in position]
            if not live:
                probs.append(1.0)
                continue
            t = state.reshape([2] * total)
            idx = [slice(None)] * total
            for a in live:
                idx[total - 1 - position[a]] = 0
            kept = t[tuple(idx)].reshape(-1)
            p = float(np.vdot(kept, kept).real)
            if p <= 0.0:
                raise ParameterError("post-selection branch has zero amplitude")
            state = kept / math.sqrt(p)
            probs.append(p)
            dropped = sorted(position[a] for a in live)
            for a in live:
                del position[a]
            for a, pp in list(position.items()):
                position[a] = pp - sum(1 for d in dropped if d < pp)
            total -= len(live)
            continue
        positions = [pos_of(q) for q in elem.qubits]
        mat = _gate_full_matrix(elem, circuit.alpha, noise)
        state = _apply_unitary(state, mat, positions, total)

    if position:
        raise ParameterError(
            f"circuit ended with unmeasured live ancilla {sorted(position)}")
    gamma2 = float(np.prod(probs)) if probs else 1.0
    sv = StateVector(n_qubits=n_data, amplitudes=state,
                     cumulative_success=gamma2)
    report = SimReport(subnormalization=math.sqrt(gamma2),
                       layer_probs=tuple(probs), data_qubit_count=n_data)
    return sv, report


class _BitMasks:
    """Lazily cached per-qubit boolean masks over a 2**n index range."""

    def __init__(self, n_bits: int):
        self.n_bits = n_bits
        self._bits: dict[int, np.ndarray] = {}

    def bit(self, qubit: int) -> np.ndarray:
        mask = self._bits.get(qubit)
        if mask is None:
            idx = np.arange(1 << self.n_bits, dtype=np.int64)
            mask = ((idx >> qubit) & 1).astype(bool)
            self._bits[qubit] = mask
        return mask

    def control_mask(self, controls) -> np.ndarray:
        mask = None
        for ctl in controls:
            cur = self.bit(ctl.qubit)
            if not ctl.closed:
                cur = ~cur
            mask = cur if mask is None else (mask & cur)
        if mask is None:
            return np.ones(1 << self.n_bits, dtype=bool)
        return mask


def _apply_window(state: np.ndarray, mask: np.ndarray,
                  f_sel: complex, f_rest: complex) -> None:
    """In-place diagonal contraction: f_sel on the control subspace,
    f_rest elsewhere (f_rest is 1 for noiseless gates)."""
    if f_rest != 1.0:
        state *= f_rest
        f_sel = f_sel / f_rest
    np.multiply(state, f_sel, out=state, where=mask)


def _window_factors(gate: Gate, alpha: float,
                    noise: NoiseRealization | None) -> tuple[complex, complex]:
    """(factor on satisfied controls, factor elsewhere) for a post-selected
    ancilla-targeted B gate: matrix elements <0|P B|0> and <0|P|0>."""
    kernel = rotation_kernel(gate.kind, gate.exponent, alpha)
    if noise and gate in noise:
        p = noise[gate]
        return complex((p @ kernel)[0, 0]), complex(p[0, 0])
    return complex(kernel[0, 0]), 1.0 + 0.0j


def simulate_postselected(circuit: Circuit | LayeredCircuit,
                          noise: NoiseRealization | None = None
                          ) -> tuple[StateVector, SimReport]:
    """Data-register-only simulation via diagonal window contraction.

    Ancilla-targeted B gates multiply the data state by <0|B|0> on their
    control subspace (the block-encoding identity); barriers record the
    accumulated norm loss as that round's success probability.
    """
    if isinstance(circuit, LayeredCircuit):
        circuit = circuit.to_circuit()
    n = circuit.data_qubits
    _check_capacity(n)
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    bits = _BitMasks(n)
    probs: list[float] = []

    for elem in circuit.elements:
        if isinstance(elem, MeasureBarrier):
            # contraction factors applied since the last barrier show up here
            nrm2 = float(np.vdot(state, state).real)
            if nrm2 <= 0.0:
                raise ParameterError("post-selection branch has zero amplitude")
            probs.append(nrm2)
            state = state / math.sqrt(nrm2)
            continue
        if circuit.is_ancilla(elem.target):
            if elem.kind is not GateKind.B:
                raise ParameterError(
                    "post-selected backend supports only B gates on ancilla")
            if any(circuit.is_ancilla(c.qubit) for c in elem.controls):
                raise ParameterError("ancilla-controlled gates are unsupported")
            f_sel, f_rest = _window_factors(elem, circuit.alpha, noise)
            _apply_window(state, bits.control_mask(elem.controls),
                          f_sel, f_rest)
            continue
        if any(circuit.is_ancilla(c.qubit) for c in elem.controls):
            raise ParameterError("ancilla-controlled gates are unsupported")
        mat = _gate_full_matrix(elem, circuit.alpha, noise)
        state = _apply_unitary(state, mat, list(elem.qubits), n)

    gamma2 = float(np.prod(probs)) if probs else 1.0
    sv = StateVector(n_qubits=n, amplitudes=state, cumulative_success=gamma2)
    report = SimReport(subnormalization=math.sqrt(gamma2),
                       layer_probs=tuple(probs), data_qubit_count=n)
    return sv, report


def l2_error(a, b) -> float:
    """Euclidean distance after aligning global phase.

    The phase maximizing Re<a|e^{i theta} b> is applied to b, then the
    difference is taken elementwise: at 2**20+ dimensions the textbook
    sqrt(2 - 2|<a|b>|) form loses the answer to dot-product rounding.
    """
    va = a.amplitudes if isinstance(a, StateVector) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, StateVector) else np.asarray(b)
    if va.shape != vb.shape:
        raise ParameterError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    ov = np.vdot(va, vb)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(va - vb * np.conj(phase)))


# ---------------------------------------------------------------------------
# Closed-form targets


def _normalized(amps: np.ndarray) -> np.ndarray:
    return amps / np.linalg.norm(amps)


def ideal_gaussian(n: int, alpha: float, tail: str = "finite") -> np.ndarray:
    """Normalized alpha**((x-(N-1)/2)**2) over x in [0, 2**n).

    tail="infinite" normalizes by the infinite-support sum instead, so the
    comparison also charges for the truncated tail mass.
    """
    x = np.arange(1 << n, dtype=float)
    log_a = math.log(alpha)
    center = ((1 << n) - 1) / 2.0
    amps = np.exp(log_a * (x - center) ** 2)
    if tail == "finite":
        return _normalized(amps)
    if tail == "infinite":
        return amps / math.sqrt(_infinite_norm_sq(log_a, center, symmetric=True))
    raise ParameterError(f"unknown tail convention {tail!r}")


def ideal_half_gaussian(n: int, alpha: float, tail: str = "finite") -> np.ndarray:
    """Normalized alpha**(x*x) over x in [0, 2**n)."""
    x = np.arange(1 << n, dtype=float)
    amps = np.exp(math.log(alpha) * x * x)
    if tail == "finite":
        return _normalized(amps)
    if tail == "infinite":
        return amps / math.sqrt(_infinite_norm_sq(math.log(alpha), 0.0,
                                                  symmetric=False))
    raise ParameterError(f"unknown tail convention {tail!r}")


def _infinite_norm_sq(log_a: float, center: float, symmetric: bool) -> float:
    # sum of alpha**(2*(x-center)**2) over all integers (or x >= 0)
    width = math.sqrt(35.0 * math.log(10.0) / (2.0 * abs(log_a)))
    lo = math.floor(center - width) if symmetric else 0
    hi = math.ceil(center + width)
    x = np.arange(lo, hi + 1, dtype=float)
    return float(np.exp(2.0 * log_a * (x - center) ** 2).sum())


def ideal_exponential(n: int, alpha: float) -> np.ndarray:
    x = np.arange(1 << n, dtype=float)
    return _normalized(np.exp(math.log(alpha) * x))


def ideal_phase_state(n: int, alpha: float, d: int) -> np.ndarray:
    x = np.arange(1 << n, dtype=float)
    return np.exp(1j * alpha * x ** d) / math.sqrt(1 << n)


def ideal_gaussian_2d(n_x: int, n_y: int, q, alpha: float) -> np.ndarray:
    from .builders import _normalize_quadratic_form

    cxx, cxy, cyy = _normalize_quadratic_form(q)
    x = np.arange(1 << n_x, dtype=float)[:, None]
    y = np.arange(1 << n_y, dtype=float)[None, :]
    form = cxx * x * x + cxy * x * y + cyy * y * y
    return _normalized(np.exp(math.log(alpha) * form).reshape(-1))


def ideal_core_half_shifted(core: int, alpha: float) -> np.ndarray:
    """Normalized alpha**((y+1/2)**2): the full Gaussian before symmetrization."""
    y = np.arange(1 << core, dtype=float)
    return _normalized(np.exp(math.log(alpha) * (y + 0.5) ** 2))


def ideal_state(spec: GaussianSpec, tail: str = "finite") -> StateVector:
    alpha = spec.derived_alpha
    if spec.mode == "full":
        amps = ideal_gaussian(spec.n_qubits, alpha, tail=tail)
    elif spec.mode == "half":
        amps = ideal_half_gaussian(spec.n_qubits, alpha, tail=tail)
    elif spec.mode == "2d":
        half = spec.n_qubits // 2
        q = spec.covariance if spec.covariance is not None else (1, 0, 1)
        amps = ideal_gaussian_2d(spec.n_qubits - half, half, q, alpha)
    else:
        raise ParameterError(f"no ideal state for mode {spec.mode!r}")
    return StateVector(n_qubits=spec.n_qubits, amplitudes=amps)


# ---------------------------------------------------------------------------
# Layered-Gaussian fast path (core register only, windows as diagonals)


def _core_count(layered: LayeredCircuit) -> int:
    core = layered.data_qubits - 1
    for layer in layered.layers:
        for g in layer.gates:
            if any(c.qubit >= core for c in g.controls):
                raise ParameterError("layer controls must stay on core qubits")
    return core


def core_pipeline(layered: LayeredCircuit,
                  noise: NoiseRealization | None = None,
                  order: tuple[int, ...] | None = None
                  ) -> tuple[np.ndarray, list[float]]:
    """Core-register simulation of prelude + layers (no postlude).

    The symmetrizing postlude is an isometry, so fidelity/error measured
    on the core equals the full-register value; this is the cheap path the
    delta search uses.
    """
    core = _core_count(layered)
    _check_capacity(core)
    state = np.zeros(1 << core, dtype=complex)
    state[0] = 1.0
    bits = _BitMasks(core)
    for gate in layered.prelude.gates():
        if gate.target >= core:
            continue  # the top-qubit Hadamard is not part of the core
        mat = _gate_full_matrix(gate, layered.alpha, noise)
        state = _apply_unitary(state, mat, list(gate.qubits), core)
    probs: list[float] = []
    seq = order if order is not None else range(len(layered.layers))
    for li in seq:
        for gate in layered.layers[li].gates:
            f_sel, f_rest = _window_factors(gate, layered.alpha, noise)
            _apply_window(state, bits.control_mask(gate.controls),
                          f_sel, f_rest)
        nrm2 = float(np.vdot(state, state).real)
        if nrm2 <= 0.0:
            raise ParameterError("post-selection branch has zero amplitude")
        probs.append(nrm2)
        state = state / math.sqrt(nrm2)
    return state, probs


class GaussianLayerModel:
    """Per-layer squared window diagonals for fast reordering studies.

    ``probs(order)`` returns every layer's exact success probability under
    that execution order in one vectorized pass.
    """

    def __init__(self, layered: LayeredCircuit,
                 noise: NoiseRealization | None = None):
        core = _core_count(layered)
        _check_capacity(core, copies=2 + len(layered.layers))
        state, _ = core_pipeline(
            layered.with_layers(()), noise=noise)
        self.weights0 = np.abs(state) ** 2
        bits = _BitMasks(core)
        self.layer_sq: list[np.ndarray] = []
        for layer in layered.layers:
            sq = np.ones(1 << core)
            for gate in layer.gates:
                f_sel, f_rest = _window_factors(gate, layered.alpha, noise)
                _apply_window(sq, bits.control_mask(gate.controls),
                              abs(f_sel) ** 2, abs(f_rest) ** 2)
            self.layer_sq.append(sq)

    def probs(self, order) -> np.ndarray:
        w = self.weights0.copy()
        prev = float(w.sum())
        out = np.empty(len(self.layer_sq))
        for i, li in enumerate(order):
            w *= self.layer_sq[li]
            cur = float(w.sum())
            out[i] = cur / prev
            prev = cur
        return out


def layer_success_probs(layered: LayeredCircuit,
                        noise: NoiseRealization | None = None) -> list[float]:
    """Exact p_k of each layer in its stored order."""
    _, probs = core_pipeline(layered, noise=noise)
    return probs


def run_noisy(layered: LayeredCircuit, budget: ErrorBudget,
              seed: int | None = 0) -> SimReport:
    """Simulate with randomly perturbed rotations and assemble the report.

    A rotations are perturbed at the single budget, controlled B rotations
    at the controlled budget; Cliffords stay exact.  The report's error is
    measured against the finite-window closed form.
    """
    rng = np.random.default_rng(seed)
    flat = layered.to_circuit()
    noise = realize_noise(flat.gates(), budget, rng)
    state, rep = simulate_postselected(flat, noise=noise)
    ideal = ideal_gaussian(layered.data_qubits, layered.alpha)
    eps = l2_error(ideal, state.amplitudes)
    et = None
    if budget.delta_single > 0.0 and budget.delta_controlled > 0.0:
        n0, nks = resources.layered_t_depth(layered, budget)
        et = expected_t_depth(n0, list(zip(nks, rep.layer_probs)))
    return SimReport(
        subnormalization=rep.subnormalization,
        layer_probs=rep.layer_probs,
        data_qubit_count=layered.data_qubits,
        l2_error=eps,
        expected_t_depth=et,
    )


# ---------------------------------------------------------------------------
# Repeat-until-success Monte Carlo


@dataclass(frozen=True)
class RusStats:
    """Empirical distribution of total T-depth spent until success."""

    samples: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    @property
    def stderr(self) -> float:
        return float(self.samples.std(ddof=1) / math.sqrt(len(self.samples)))


def monte_carlo_rus(layered: LayeredCircuit, budget: ErrorBudget,
                    trials: int, seed: int | None = 0) -> RusStats:
    """Sample the restart process: every attempt pays the prelude depth and
    each layer reached; a failed barrier restarts from scratch."""
    if trials < 1:
        raise ParameterError("need at least one trial")
    n0, nks = resources.layered_t_depth(layered, budget)
    ps = np.asarray(layer_success_probs(layered))
    return simulate_rus_process(n0, nks, ps, trials, seed)


def simulate_rus_process(n0: float, nks, ps, trials: int,
                         seed: int | None = 0) -> RusStats:
    ps = np.asarray(ps, dtype=float)
    nks = np.asarray(nks, dtype=float)
    if np.any(ps <= 0.0):
        raise ParameterError("a zero-probability layer never succeeds")
    rng = np.random.default_rng(seed)
    n_layers = len(ps)
    if n_layers == 0:
        return RusStats(samples=np.full(trials, float(n0)))
    cum = n0 + np.cumsum(nks)          # cost paid upon reaching layer k
    full_cost = float(cum[-1])
    total = np.zeros(trials)
    active = np.arange(trials)
    while active.size:
        u = rng.random((active.size, n_layers))
        fails = u >= ps[None, :]
        any_fail = fails.any(axis=1)
        first = np.where(any_fail, fails.argmax(axis=1), n_layers - 1)
        total[active] += np.where(any_fail, cum[first], full_cost)
        active = active[any_fail]
    return RusStats(samples=total)
