"""Circuit intermediate representation.

A circuit is an ordered sequence of gates and measurement barriers over a
register of ``data_qubits`` followed by ``ancilla_qubits``.  Qubit ``j``
of the data register carries binary weight ``2**j`` (least significant at
index 0).  A ``MeasureBarrier`` post-selects the listed ancilla on the
all-zero outcome, after which they count as reset and reusable.

All types are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .gates import Gate, GateKind, ParameterError


@dataclass(frozen=True)
class MeasureBarrier:
    """Post-selected |0> measurement of the listed ancilla (absolute indices)."""

    ancilla: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.ancilla)) != len(self.ancilla):
            raise ParameterError("duplicate ancilla in measure barrier")


Element = Gate | MeasureBarrier


@dataclass(frozen=True)
class Circuit:
    data_qubits: int
    ancilla_qubits: int
    alpha: float
    elements: tuple[Element, ...] = ()

    @property
    def total_qubits(self) -> int:
        return self.data_qubits + self.ancilla_qubits

    def is_ancilla(self, qubit: int) -> bool:
        return qubit >= self.data_qubits

    def gates(self) -> tuple[Gate, ...]:
        return tuple(e for e in self.elements if isinstance(e, Gate))

    def count(self, kind: GateKind, n_controls: int | None = None) -> int:
        return sum(
            1
            for g in self.gates()
            if g.kind is kind
            and (n_controls is None or len(g.controls) == n_controls)
        )

    def extended(self, *elements: Element) -> "Circuit":
        return replace(self, elements=self.elements + tuple(elements))


def validate(circuit: Circuit) -> list[str]:
    """Check circuit invariants; returns one message per violation.

    An empty list means the circuit is well-formed: all indices in range,
    every B-gate ancilla fresh (never used, or measured since last use),
    and no barrier measuring a data qubit.
    """
    violations: list[str] = []
    total = circuit.total_qubits
    dirty: set[int] = set()
    for idx, elem in enumerate(circuit.elements):
        if isinstance(elem, MeasureBarrier):
            for a in elem.ancilla:
                if not circuit.is_ancilla(a) or a >= total:
                    violations.append(
                        f"element {idx}: barrier measures non-ancilla qubit {a}")
            dirty.difference_update(elem.ancilla)
            continue
        for q in elem.qubits:
            if q < 0 or q >= total:
                violations.append(
                    f"element {idx}: qubit {q} out of range (total {total})")
        if elem.kind is GateKind.B and circuit.is_ancilla(elem.target):
            if elem.target in dirty:
                violations.append(
                    f"element {idx}: ancilla {elem.target} not reset before B gate")
            dirty.add(elem.target)
        else:
            # any other touch of an ancilla also marks it dirty
            for q in elem.qubits:
                if circuit.is_ancilla(q):
                    dirty.add(q)
    return violations


@dataclass(frozen=True)
class Layer:
    """One round of doubly-controlled rotations between measurement barriers.

    ``t_depth`` (the layer's T-depth) and ``success_prob`` are filled in by
    the resource model and the simulator; they stay None until computed.
    """

    gates: tuple[Gate, ...]
    t_depth: float | None = None
    success_prob: float | None = None

    def __post_init__(self) -> None:
        used: set[int] = set()
        targets: set[int] = set()
        for g in self.gates:
            if g.kind is not GateKind.B or len(g.controls) != 2:
                raise ParameterError("layers hold doubly-controlled B gates only")
            if g.target in targets:
                raise ParameterError("layer gates must target distinct ancilla")
            targets.add(g.target)
            ctl = {c.qubit for c in g.controls}
            if ctl & used:
                raise ParameterError("layer control sets must be disjoint")
            used |= ctl
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def control_pairs(self) -> tuple[tuple[int, int], ...]:
        out = []
        for g in self.gates:
            a, b = (c.qubit for c in g.controls)
            out.append((min(a, b), max(a, b)))
        return tuple(out)

    @property
    def ancilla(self) -> tuple[int, ...]:
        return tuple(g.target for g in self.gates)

    def with_stats(self, t_depth: float | None = None,
                   success_prob: float | None = None) -> "Layer":
        return replace(self, t_depth=t_depth, success_prob=success_prob)


@dataclass(frozen=True)
class LayeredCircuit:
    """Prelude (uncontrolled rotations), measurement layers, postlude.

    The prelude prepares the core register; each layer's gates execute in
    one T-depth step and end with a barrier; the postlude symmetrizes
    (Hadamard plus open-control CNOTs) and is Clifford-only.
    """

    prelude: Circuit
    layers: tuple[Layer, ...]
    postlude: Circuit

    @property
    def data_qubits(self) -> int:
        return self.prelude.data_qubits

    @property
    def ancilla_qubits(self) -> int:
        return self.prelude.ancilla_qubits

    @property
    def alpha(self) -> float:
        return self.prelude.alpha

    def with_layers(self, layers: tuple[Layer, ...]) -> "LayeredCircuit":
        return replace(self, layers=layers)

    def to_circuit(self) -> Circuit:
        """Flatten into a plain Circuit (each layer followed by its barrier)."""
        elements: list[Element] = list(self.prelude.elements)
        for layer in self.layers:
            elements.extend(layer.gates)
            if layer.gates:
                elements.append(MeasureBarrier(layer.ancilla))
        elements.extend(self.postlude.elements)
        return Circuit(
            data_qubits=self.data_qubits,
            ancilla_qubits=self.ancilla_qubits,
            alpha=self.alpha,
            elements=tuple(elements),
        )


def layer_pair_sets(layered: LayeredCircuit) -> list[tuple[tuple[int, int], ...]]:
    return [layer.control_pairs for layer in layered.layers]
