"""Two observers describing the left qubit of an entangled pair.

Both observers know the pair was prepared in ``cos t |00> + sin t |11>``.
Alice, at the right qubit, may apply a secret unitary and then measure it in
the computational basis; she updates her description of the left qubit to the
conditional pure state. Bob learns nothing and keeps the reduced state
``diag(cos^2 t, sin^2 t)``.

Sign convention, checked by direct multiplication: with the Hadamard,
outcome 0 gives ``[rho_bob, rho_alice] = +sin(4t)/4 (|0><1| - |1><0|)`` and
outcome 1 gives the negative of that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matrixio
from .qcore import (
    DEFAULT_TOL,
    BlochVector,
    DensityMatrix,
    DimensionError,
    Ket,
    Tolerances,
    UnitaryOp,
    bloch_from_qubit,
    frobenius,
    partial_trace_right,
    tensor,
)
from .sampling import Stream

THETA_MAX = math.pi / 4


class ImpossibleOutcomeError(ValueError):
    pass


class DegenerateGeometryError(ValueError):
    """Alice's two conditional directions are parallel, so no unique blind axis exists."""


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= THETA_MAX:
        raise ValueError(f"theta must lie in [0, pi/4], got {theta!r}")
    return theta


def hadamard() -> UnitaryOp:
    return UnitaryOp(np.array([[1, 1], [1, -1]]) / math.sqrt(2.0))


def identity() -> UnitaryOp:
    return UnitaryOp(np.eye(2))


def unitary_from_angles(polar: float, phi: float, lam: float) -> UnitaryOp:
    """U(2) element up to global phase, in the usual three-angle form."""
    c, s = math.cos(polar / 2), math.sin(polar / 2)
    return UnitaryOp(
        np.array(
            [
                [c, -np.exp(1j * lam) * s],
                [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
            ]
        )
    )


def random_unitary(rng: Stream) -> UnitaryOp:
    """Angles drawn uniformly: polar in [0, pi], both phases in [0, 2 pi). Not Haar."""
    u = rng.uniform(3)
    return unitary_from_angles(math.pi * u[0], 2 * math.pi * u[1], 2 * math.pi * u[2])


@dataclass(frozen=True)
class ScenarioConfig:
    theta: float
    alice_unitary: UnitaryOp = field(default_factory=hadamard)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_theta(self.theta))
        if not isinstance(self.alice_unitary, UnitaryOp) or self.alice_unitary.dim != 2:
            raise DimensionError("Alice's unitary must be a 2x2 UnitaryOp")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    probability: float
    alice_state: DensityMatrix
    bob_state: DensityMatrix


@dataclass(frozen=True)
class BlindDirectionReport:
    n_plus: BlochVector
    n_minus: BlochVector
    p: float
    q: float
    blind: BlochVector
    constraint_residual: float

    def to_json(self) -> dict:
        return {
            "n_plus": [float(x) for x in self.n_plus.as_array()],
            "n_minus": [float(x) for x in self.n_minus.as_array()],
            "p": self.p,
            "q": self.q,
            "blind": [float(x) for x in self.blind.as_array()],
            "constraint_residual": self.constraint_residual,
        }


def prepare_entangled(theta: float) -> Ket:
    theta = _check_theta(theta)
    return Ket([math.cos(theta), 0.0, 0.0, math.sin(theta)])


def apply_right_unitary(psi: Ket, u: UnitaryOp) -> Ket:
    if psi.dim != 4 or u.dim != 2:
        raise DimensionError("need a two-qubit ket and a single-qubit unitary")
    out = tensor(np.eye(2), u.matrix) @ psi.amplitudes
    return Ket(out, psi.tol)


def reduced_left(psi: Ket) -> DensityMatrix:
    return partial_trace_right(psi.density(), 2, 2)


def outcome_probabilities(psi: Ket) -> np.ndarray:
    amps = psi.amplitudes.reshape(2, 2)
    return np.sum(np.abs(amps) ** 2, axis=0)


def measure_right(
    psi: Ket,
    outcome: int | None = None,
    rng: Stream | None = None,
    prepared: Ket | None = None,
) -> MeasurementRecord:
    """Computational-basis measurement of the right qubit.

    With ``outcome=None`` the outcome is sampled from ``rng`` (one uniform
    draw, outcome 0 iff ``u < P(0)``). ``bob_state`` is the reduced state of
    ``prepared`` when given; otherwise of ``psi``, which is the same matrix
    whenever ``psi`` differs from the prepared state by a right-local unitary.
    """
    if psi.dim != 4:
        raise DimensionError("measure_right needs a two-qubit ket")
    probs = outcome_probabilities(psi)
    if outcome is None:
        if rng is None:
            raise ValueError("either an outcome or a random stream is required")
        outcome = 0 if rng.uniform(1)[0] < probs[0] else 1
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    p = float(probs[outcome])
    if p < psi.tol.norm:
        raise ImpossibleOutcomeError(f"outcome {outcome} has probability {p:.3e}")
    left = psi.amplitudes.reshape(2, 2)[:, outcome] / math.sqrt(p)
    alice = Ket(left, psi.tol).density()
    bob = reduced_left(prepared if prepared is not None else psi)
    return MeasurementRecord(outcome, min(max(p, 0.0), 1.0), alice, bob)


def run_scenario(config: ScenarioConfig, outcome: int | None = None) -> MeasurementRecord:
    prepared = prepare_entangled(config.theta)
    psi = apply_right_unitary(prepared, config.alice_unitary)
    rng = Stream(config.seed) if outcome is None else None
    return measure_right(psi, outcome, rng, prepared=prepared)


def conditional_records(config: ScenarioConfig) -> list[MeasurementRecord]:
    """Records for both outcomes, skipping any that cannot occur."""
    out = []
    for k in (0, 1):
        try:
            out.append(run_scenario(config, k))
        except ImpossibleOutcomeError:
            pass
    return out


def commutator(a: DensityMatrix, b: DensityMatrix) -> np.ndarray:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def closed_form_commutator(theta: float, outcome: int) -> np.ndarray:
    """``[rho_bob, rho_alice]`` for the Hadamard scenario, from the closed form."""
    sign = 1.0 if outcome == 0 else -1.0
    return sign * 0.25 * math.sin(4 * theta) * np.array([[0, 1], [-1, 0]], dtype=complex)


_Z = np.array([0.0, 0.0, 1.0])


def blind_direction(config: ScenarioConfig) -> BlindDirectionReport:
    """Alice's two conditional Bloch directions and the axis orthogonal to both.

    The blind axis is ``n_plus x n_minus`` normalized; when both directions
    lie in the x-z plane it is oriented to have a positive y component.
    Raises :class:`DegenerateGeometryError` when the directions are parallel.
    """
    tol = config.alice_unitary.tol
    if config.theta <= 0.0:
        raise DegenerateGeometryError("theta = 0: both conditional states are |0>")
    plus, minus = (run_scenario(config, k) for k in (0, 1))
    n = bloch_from_qubit(plus.alice_state).as_array()
    m = bloch_from_qubit(minus.alice_state).as_array()
    cross = np.cross(n, m)
    length = float(np.linalg.norm(cross))
    if length <= tol.eig:
        raise DegenerateGeometryError(
            f"conditional directions are parallel (|n x m| = {length:.3e})"
        )
    blind = cross / length
    if abs(n[1]) <= tol.eig and abs(m[1]) <= tol.eig and blind[1] < 0:
        blind = -blind
    blind = blind / np.linalg.norm(blind)
    p, q = plus.probability, minus.probability
    cos2t = math.cos(2 * config.theta)
    residual = float(np.linalg.norm(_Z - (p * n + q * m) / cos2t))
    return BlindDirectionReport(
        n_plus=BlochVector.from_array(n),
        n_minus=BlochVector.from_array(m),
        p=p,
        q=q,
        blind=BlochVector.from_array(blind),
        constraint_residual=residual,
    )


# ---------------------------------------------------------------------------
# scenario JSON


def unitary_from_spec(spec, tol: Tolerances = DEFAULT_TOL) -> UnitaryOp:
    """``"hadamard"``, ``"identity"`` or a matrix-JSON object."""
    if isinstance(spec, str):
        name = spec.lower()
        if name == "hadamard":
            return hadamard()
        if name == "identity":
            return identity()
        raise ValueError(f"unknown unitary name {spec!r}")
    return UnitaryOp(matrixio.matrix_from_json(spec), tol)


def config_from_json(obj) -> tuple[ScenarioConfig, int]:
    """Parse ``{"theta", "unitary", "seed", "shots"}``; returns ``(config, shots)``."""
    if not isinstance(obj, dict) or "theta" not in obj:
        raise ValueError('scenario JSON needs at least "theta"')
    theta = obj["theta"]
    if isinstance(theta, bool) or not isinstance(theta, (int, float)):
        raise ValueError(f"bad theta {theta!r}")
    shots = obj.get("shots", 1)
    if isinstance(shots, bool) or not isinstance(shots, int):
        raise ValueError(f"bad shots {shots!r}")
    config = ScenarioConfig(
        theta=float(theta),
        alice_unitary=unitary_from_spec(obj.get("unitary", "hadamard")),
        seed=obj.get("seed", 0),
    )
    return config, shots


def state_report(config: ScenarioConfig) -> dict:
    """JSON-ready summary of both observers' states for every possible outcome."""
    records = conditional_records(config)
    bob = records[0].bob_state
    outcomes = []
    for rec in records:
        comm = commutator(bob, rec.alice_state)
        outcomes.append(
            {
                "outcome": rec.outcome,
                "probability": rec.probability,
                "alice_state": matrixio.matrix_to_json(rec.alice_state.matrix),
                "commutator": matrixio.matrix_to_json(comm),
                "commutator_norm": frobenius(comm),
            }
        )
    return {"theta": config.theta, "bob_state": matrixio.matrix_to_json(bob.matrix), "outcomes": outcomes}

