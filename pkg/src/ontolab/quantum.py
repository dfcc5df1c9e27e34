"""Pure states, projective measurements and psi-complete models.

Amplitudes are numpy complex vectors compared with tolerance ``EPS``. Born
probabilities are rationalized (continued fractions, denominator at most
``MAX_DENOMINATOR``) and renormalized exactly before they reach the exact
core, so nothing downstream sees a float. For the built-in states every
probability is one of 0, 1/4, 1/2, 1 and the conversion is lossless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ModelError
from .numeric import ZERO, Distribution
from .ontology import Classification, OntologicalModel, classify_property, observable_property
from .scenario import Assignment, MeasurementScenario, bell_scenario

EPS = 1e-9
MAX_DENOMINATOR = 10**6

_SQRT_HALF = 1 / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized amplitude vector over a fixed orthonormal basis."""

    amplitudes: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size == 0:
            raise ModelError("a state needs at least one amplitude")
        norm = float(np.vdot(vec, vec).real)
        if abs(norm - 1) > EPS:
            raise ModelError(f"state {self.label or ''} has squared norm {norm}, not 1")
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: PureState | np.ndarray) -> complex:
        """``<other|self>``."""
        vec = other.amplitudes if isinstance(other, PureState) else np.asarray(other, dtype=complex)
        return complex(np.vdot(vec, self.amplitudes))

    def fidelity(self, other: PureState) -> float:
        return abs(self.overlap(other)) ** 2

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def tensor(self, other: PureState, label: str | None = None) -> PureState:
        return PureState(np.kron(self.amplitudes, other.amplitudes), label)


KET0 = PureState(np.array([1, 0]), "ket0")
KET1 = PureState(np.array([0, 1]), "ket1")
KETPLUS = PureState(np.array([_SQRT_HALF, _SQRT_HALF]), "ketplus")
KETMINUS = PureState(np.array([_SQRT_HALF, -_SQRT_HALF]), "ketminus")
PHI_PLUS = PureState(np.array([_SQRT_HALF, 0, 0, _SQRT_HALF]), "phi_plus")

BUILTIN_STATES: dict[str, PureState] = {
    s.label: s for s in (KET0, KET1, KETPLUS, KETMINUS, PHI_PLUS)  # type: ignore[misc]
}


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Orthogonal eigenspaces, one per outcome label.

    Each outcome is given an orthonormal list of vectors spanning its
    eigenspace; together they must form an orthonormal basis. A single
    outcome whose eigenspace is everything is the trivial (identity)
    observable.
    """

    label: Hashable
    eigenspaces: Mapping[Hashable, tuple[np.ndarray, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        spaces = {}
        vecs = []
        for o, vs in self.eigenspaces.items():
            arrs = tuple(np.asarray(v, dtype=complex).reshape(-1) for v in vs)
            if not arrs:
                raise ModelError(f"outcome {o!r} of {self.label!r} has an empty eigenspace")
            spaces[o] = arrs
            vecs.extend(arrs)
        if not vecs:
            raise ModelError(f"measurement {self.label!r} has no outcomes")
        dim = vecs[0].size
        if any(v.size != dim for v in vecs):
            raise ModelError(f"measurement {self.label!r} mixes vector dimensions")
        if len(vecs) != dim:
            raise ModelError(f"measurement {self.label!r} spans {len(vecs)} of {dim} dimensions")
        gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
        if not np.allclose(gram, np.eye(dim), atol=EPS, rtol=0):
            raise ModelError(f"eigenvectors of {self.label!r} are not orthonormal")
        object.__setattr__(self, "eigenspaces", spaces)

    @classmethod
    def from_basis(cls, label: Hashable, vectors: Sequence, outcomes: Sequence[Hashable]) -> ProjectiveMeasurement:
        if len(vectors) != len(outcomes):
            raise ModelError("need one outcome label per basis vector")
        return cls(label, {o: (v,) for o, v in zip(outcomes, vectors)})

    @property
    def dim(self) -> int:
        return next(iter(self.eigenspaces.values()))[0].size

    @property
    def outcomes(self) -> tuple:
        return tuple(self.eigenspaces)


def z_measurement(label: Hashable = "Z", outcomes: Sequence[Hashable] = ("0", "1")) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(label, [KET0.amplitudes, KET1.amplitudes], outcomes)


def x_measurement(label: Hashable = "X", outcomes: Sequence[Hashable] = ("0", "1")) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(label, [KETPLUS.amplitudes, KETMINUS.amplitudes], outcomes)


def angle_measurement(label: Hashable, theta: float, outcomes: Sequence[Hashable] = ("0", "1")) -> ProjectiveMeasurement:
    """Spin along angle ``theta`` in the X-Z plane (``0`` is Z, ``pi/2`` is X)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return ProjectiveMeasurement.from_basis(label, [np.array([c, s]), np.array([-s, c])], outcomes)


def identity_measurement(label: Hashable, dim: int = 2, outcome: Hashable = "0") -> ProjectiveMeasurement:
    return ProjectiveMeasurement(label, {outcome: tuple(np.eye(dim))})


def product_measurement(parts: Sequence[tuple[Hashable, ProjectiveMeasurement]],
                        label: Hashable | None = None) -> ProjectiveMeasurement:
    """Joint measurement of commuting local measurements on tensor factors.

    ``parts`` lists ``(measurement label, measurement)`` in tensor-factor
    order. Outcomes are :class:`Assignment` objects over the labels.
    """
    acc: list[tuple[tuple, tuple[np.ndarray, ...]]] = [((), (np.ones(1, dtype=complex),))]
    for name, meas in parts:
        nxt = []
        for prefix, vecs in acc:
            for o, local in meas.eigenspaces.items():
                nxt.append((prefix + ((name, o),), tuple(np.kron(u, v) for u in vecs for v in local)))
        acc = nxt
    spaces = {Assignment(k): vs for k, vs in acc}
    return ProjectiveMeasurement(label if label is not None else tuple(n for n, _ in parts), spaces)


def _rationalize(probs: Mapping[Hashable, float]) -> Distribution:
    total = sum(probs.values())
    if abs(total - 1) > EPS:
        raise ModelError(f"Born probabilities sum to {total}; state and measurement are inconsistent")
    approx = {o: (ZERO if p < EPS else Fraction(p).limit_denominator(MAX_DENOMINATOR))
              for o, p in probs.items()}
    z = sum(approx.values(), ZERO)
    if z == 0:
        raise ModelError("all Born probabilities rounded to zero")
    return Distribution({o: q / z for o, q in approx.items()})


def born(state: PureState, m: ProjectiveMeasurement) -> Distribution:
    """``P(o) = sum_{v in eigenspace(o)} |<v|psi>|^2``, as exact rationals."""
    if state.dim != m.dim:
        raise ModelError(f"state of dimension {state.dim} measured by {m.label!r} of dimension {m.dim}")
    probs = {o: float(sum(abs(state.overlap(v)) ** 2 for v in vs)) for o, vs in m.eigenspaces.items()}
    return _rationalize(probs)


def local_joint_measurements(scenario: MeasurementScenario,
                             local: Mapping[Hashable, ProjectiveMeasurement]
                             ) -> dict[frozenset, ProjectiveMeasurement]:
    """Joint measurement per context from one local measurement per label.

    Members of a context act on consecutive tensor factors in the scenario's
    measurement order (e.g. ``A`` on the first qubit, ``B`` on the second).
    """
    out = {}
    for c in scenario.contexts:
        names = scenario.ordered(c)
        for n in names:
            if n not in local:
                raise ModelError(f"no quantum measurement given for {n!r}")
        out[c] = product_measurement([(n, local[n]) for n in names], label=frozenset(c))
    return out


def psi_complete_model(states: Mapping[Hashable, PureState] | Sequence[PureState],
                       scenario: MeasurementScenario,
                       joint: Mapping[Iterable[Hashable], ProjectiveMeasurement],
                       preparations: Mapping[Hashable, Distribution] | None = None) -> OntologicalModel:
    """The ontological model whose ontic states are the given quantum states.

    ``joint[context]`` must have :class:`Assignment` outcomes on that
    context. By default each state is its own preparation (a delta).
    """
    if not isinstance(states, Mapping):
        states = {s.label: s for s in states}
    if any(k is None for k in states):
        raise ModelError("every state needs a label to serve as an ontic state")
    jm = {frozenset(c): m for c, m in joint.items()}
    dims = {s.dim for s in states.values()} | {m.dim for m in jm.values()}
    if len(dims) != 1:
        raise ModelError(f"inconsistent dimensions {sorted(dims)}")
    response = {}
    for c in scenario.contexts:
        if c not in jm:
            raise ModelError(f"no joint measurement for context {sorted(map(str, c))}")
        for label, st in states.items():
            response[(label, c)] = born(st, jm[c])
    if preparations is None:
        preparations = {label: Distribution.delta(label) for label in states}
    return OntologicalModel(scenario, list(preparations), list(states), preparations, response)


def check_observable_epistemicity(model: OntologicalModel, m: Hashable) -> Classification:
    """Classify the observable property ``f_m`` of a psi-complete model."""
    return classify_property(observable_property(model, m))


def qubit_model() -> OntologicalModel:
    """psi-complete model over {|0>, |1>, |+>, |->} with Z and X measured separately."""
    scen = MeasurementScenario(["Z", "X"], ["0", "1"], [["Z"], ["X"]])
    local = {"Z": z_measurement(), "X": x_measurement()}
    return psi_complete_model([KET0, KET1, KETPLUS, KETMINUS], scen,
                              local_joint_measurements(scen, local))


def bell_model(thetas: Mapping[str, float] | None = None,
               states: Sequence[PureState] = (PHI_PLUS,)) -> OntologicalModel:
    """psi-complete model of two qubits on the (2,2,2) scenario.

    ``thetas`` gives the X-Z plane angle of each of A0, A1, B0, B1; the
    default measures Z and X on both sides.
    """
    scen = bell_scenario(2, 2, 2)
    if thetas is None:
        thetas = {"A0": 0.0, "A1": math.pi / 2, "B0": 0.0, "B1": math.pi / 2}
    local = {m: angle_measurement(m, thetas[m]) for m in scen.measurements}
    return psi_complete_model(list(states), scen, local_joint_measurements(scen, local))


CHSH_ANGLES = {"A0": 0.0, "A1": math.pi / 2, "B0": math.pi / 4, "B1": -math.pi / 4}


@dataclass(frozen=True, eq=False)
class SteeringEnsembles:
    """Remote preparations of the second qubit of |phi+>.

    ``first`` comes from measuring the first qubit in the Z basis, ``second``
    from the X basis; each is a list of ``(probability, state label)``.
    """

    first: tuple[tuple[Fraction, str], ...]
    second: tuple[tuple[Fraction, str], ...]
    states: Mapping[str, PureState]

    def density_matrix(self, which: int) -> np.ndarray:
        ens = self.first if which == 0 else self.second
        return sum(float(c) * self.states[lbl].density_matrix() for c, lbl in ens)

    def same_reduced_state(self) -> bool:
        return bool(np.allclose(self.density_matrix(0), self.density_matrix(1), atol=EPS, rtol=0))


def _identify(state: np.ndarray) -> str:
    probe = PureState(state)
    for name in ("ket0", "ket1", "ketplus", "ketminus"):
        if abs(probe.fidelity(BUILTIN_STATES[name]) - 1) < EPS:
            return name
    raise ModelError("remote state is not one of the built-in qubit states")


def remote_ensemble(shared: PureState, basis: Sequence[PureState]) -> list[tuple[Fraction, str]]:
    """Second-qubit ensemble after measuring the first qubit of ``shared`` in ``basis``."""
    if shared.dim != 4:
        raise ModelError("remote preparation needs a two-qubit state")
    psi = shared.amplitudes.reshape(2, 2)
    raw = {}
    states = {}
    for k, b in enumerate(basis):
        cond = b.amplitudes.conj() @ psi
        weight = float(np.vdot(cond, cond).real)
        raw[k] = weight
        if weight > EPS:
            states[k] = _identify(cond / math.sqrt(weight))
    probs = _rationalize(raw)
    return [(probs[k], states[k]) for k in range(len(basis)) if probs[k] != 0]


def steering_ensembles() -> SteeringEnsembles:
    first = remote_ensemble(PHI_PLUS, [KET0, KET1])
    second = remote_ensemble(PHI_PLUS, [KETPLUS, KETMINUS])
    labels = {lbl for _, lbl in first + second}
    ens = SteeringEnsembles(tuple(first), tuple(second), {k: BUILTIN_STATES[k] for k in sorted(labels)})
    if not ens.same_reduced_state():
        raise AssertionError("remote ensembles of |phi+> should share the reduced state I/2")
    return ens
