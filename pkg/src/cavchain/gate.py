"""Mirror-terminated chains as conditional phase gates on stationary dot qubits.

Each dot stores a qubit in two ground states: one couples to its cavity
(state "g", coupling g kept) and one does not (state "r", coupling set to 0,
leaving an effectively empty cavity).  A photon sent down the waveguide is
reflected near the input whenever any qubit sits in "r", but traverses the
whole transparent chain, bounces off the terminating mirror, and returns when
every qubit is in "g".  With the mirror position calibrated, the returned
photon acquires a phase pattern equivalent to the unitary that flips the sign
of the all-"g" component only.

Evaluation enumerates all 2^n qubit configurations, computes the full-system
reflection amplitude for each, and reports

    fidelity F = |sum_q ideal_q * lambda_q|^2 / (2^n * sum_q |lambda_q|^2)
    photon loss P = 1 - mean_q |lambda_q|^2

i.e. the state-overlap fidelity conditioned on photon return for the uniform
superposition input, with the unconditioned loss reported separately.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AllAmplitudesZero,
    EngineSingularity,
    LengthMismatch,
    TooManyQubits,
)
from .model import MirrorTermination, ValidatedChain
from .transfer import TransferMatrix, cascade, terminated_reflection

# Default drive detuning from the common resonance (units of the first
# cavity's intrinsic rate): sits clear of the empty-chain interference peaks.
DEFAULT_CARRIER_DETUNING = -2.5

MAX_QUBITS = 10

# Mirror-phase search: coarse grid density and refinement tolerance (radians).
_PHASE_GRID_POINTS = 720
_PHASE_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class QubitConfiguration:
    """Qubit state per subsystem: 'g', 'r', or 'none' for a cavity without a qubit."""

    states: tuple[str, ...]

    def __post_init__(self) -> None:
        for s in self.states:
            if s not in ("g", "r", "none"):
                raise ValueError(f"qubit state must be 'g', 'r', or 'none', got {s!r}")

    @property
    def label(self) -> str:
        """Compact label over qubit-bearing subsystems only, e.g. 'gr'."""
        return "".join(s for s in self.states if s != "none")

    @property
    def all_ground_coupled(self) -> bool:
        return all(s != "r" for s in self.states)


@dataclass(frozen=True)
class DetuningScenario:
    """Detunings layered onto a base chain for robustness studies.

    ``cavity_offsets`` shift whole subsystems (cavity and its dot together),
    preserving each dot-cavity alignment; ``qd_offsets`` then set the
    dot-cavity detuning omega_c - omega_r per subsystem.  Either may be None
    for all-zero.  Offsets are in the chain's normalized units.
    """

    id: str
    cavity_offsets: tuple[float, ...] | None = None
    qd_offsets: tuple[float, ...] | None = None


ON_RESONANCE = DetuningScenario(id="onres")


@dataclass(frozen=True)
class GateResult:
    """Outcome of one gate evaluation at a fixed carrier and mirror phase."""

    amplitudes: dict[QubitConfiguration, complex]
    fidelity: float
    photon_loss: float
    mirror_phase: float
    carrier: float


@dataclass(frozen=True)
class GateSweepRow:
    """One (coupling, scenario) cell of a gate parameter sweep."""

    g_over_Gamma: float
    scenario_id: str
    theta_m_star: float
    fidelity: float
    photon_loss: float
    amplitudes: dict[str, complex]
    error: str | None = None


def qubit_sites(chain: ValidatedChain) -> tuple[int, ...]:
    """Indices of subsystems hosting a qubit (a declared dot transition)."""
    return tuple(j for j, p in enumerate(chain.subsystems) if p.has_qd)


def enumerate_configurations(
    chain: ValidatedChain, sites: Sequence[int] | None = None
) -> tuple[QubitConfiguration, ...]:
    """All 2^n qubit configurations in deterministic ('g' before 'r') order."""
    sites = qubit_sites(chain) if sites is None else tuple(sites)
    if not sites:
        raise LengthMismatch("gate evaluation needs at least one qubit-bearing subsystem")
    if len(sites) > MAX_QUBITS:
        raise TooManyQubits(f"{len(sites)} qubits exceed the {MAX_QUBITS}-qubit cap")
    configs = []
    for assignment in product("gr", repeat=len(sites)):
        states = ["none"] * chain.size
        for site, state in zip(sites, assignment):
            states[site] = state
        configs.append(QubitConfiguration(states=tuple(states)))
    return tuple(configs)


def configured_chain(base: ValidatedChain, q: QubitConfiguration) -> ValidatedChain:
    """Chain seen by the photon for one qubit configuration.

    A qubit in 'r' decouples its dot (g := 0), leaving an empty cavity; 'g'
    keeps the coupling; 'none' subsystems are untouched.
    """
    if len(q.states) != base.size:
        raise LengthMismatch(
            f"configuration has {len(q.states)} states for a chain of {base.size} subsystems"
        )
    subsystems = tuple(
        replace(p, g=0.0) if state == "r" else p
        for p, state in zip(base.subsystems, q.states)
    )
    return base.replace_subsystems(subsystems)


def _configured_matrices(
    base: ValidatedChain, carrier: float, configs: Iterable[QubitConfiguration]
) -> list[tuple[QubitConfiguration, TransferMatrix]]:
    out = []
    for q in configs:
        try:
            out.append((q, cascade(configured_chain(base, q), carrier)))
        except EngineSingularity as exc:
            raise type(exc)(f"configuration {q.label!r}: {exc}") from None
    return out


def gate_amplitudes(
    base: ValidatedChain,
    carrier: float,
    mirror: MirrorTermination,
    sites: Sequence[int] | None = None,
) -> dict[QubitConfiguration, complex]:
    """Full-system reflection amplitude for every qubit configuration."""
    rho = mirror.round_trip_factor
    amplitudes: dict[QubitConfiguration, complex] = {}
    for q, matrix in _configured_matrices(base, carrier, enumerate_configurations(base, sites)):
        try:
            amplitudes[q] = terminated_reflection(matrix, rho)
        except EngineSingularity as exc:
            raise type(exc)(f"configuration {q.label!r}: {exc}") from None
    return amplitudes


def ideal_sign(q: QubitConfiguration) -> float:
    """Target amplitude pattern: +1 for all qubits in 'g', -1 otherwise.

    Equals the conditional-phase-gate unitary up to one global sign.
    """
    return 1.0 if q.all_ground_coupled else -1.0


def fidelity_and_loss(amplitudes: Mapping[QubitConfiguration, complex]) -> tuple[float, float]:
    """Conditional fidelity and photon loss of a measured amplitude pattern."""
    n_conf = len(amplitudes)
    overlap = 0.0 + 0.0j
    total_power = 0.0
    for q, lam in amplitudes.items():
        overlap += ideal_sign(q) * lam
        total_power += abs(lam) ** 2
    if total_power == 0.0:
        raise AllAmplitudesZero("every configuration returned zero amplitude")
    fidelity = abs(overlap) ** 2 / (n_conf * total_power)
    photon_loss = 1.0 - total_power / n_conf
    return fidelity, photon_loss


def _fidelity_of_phase(
    signs: np.ndarray,
    m11: np.ndarray,
    m12: np.ndarray,
    m21: np.ndarray,
    m22: np.ndarray,
    amp: float,
    theta: np.ndarray,
) -> np.ndarray:
    """Vectorized F(theta_m) for cached per-configuration cascade matrices."""
    rho = amp * np.exp(2j * np.asarray(theta, dtype=float))
    lam = -(m11[:, None] - rho[None, :] * m21[:, None]) / (
        m12[:, None] - rho[None, :] * m22[:, None]
    )
    overlap = np.abs(np.sum(signs[:, None] * lam, axis=0)) ** 2
    total = np.sum(np.abs(lam) ** 2, axis=0)
    n_conf = signs.size
    with np.errstate(invalid="ignore", divide="ignore"):
        fid = np.where(total > 0.0, overlap / (n_conf * total), 0.0)
    return fid


def calibrate_mirror_phase(
    base: ValidatedChain,
    carrier: float,
    mirror: MirrorTermination,
    sites: Sequence[int] | None = None,
) -> float:
    """Mirror phase maximizing the gate fidelity at the given carrier.

    Scans a 720-point coarse grid over [0, 2*pi) and refines the best cell by
    golden-section search down to 1e-6 rad.  Deterministic: grid ties resolve
    to the smallest phase.
    """
    pairs = _configured_matrices(base, carrier, enumerate_configurations(base, sites))
    signs = np.array([ideal_sign(q) for q, _ in pairs])
    m11 = np.array([m.m11 for _, m in pairs])
    m12 = np.array([m.m12 for _, m in pairs])
    m21 = np.array([m.m21 for _, m in pairs])
    m22 = np.array([m.m22 for _, m in pairs])
    amp = math.sqrt(mirror.reflectivity) * (1.0 - mirror.power_loss)

    def fid(theta: float) -> float:
        return float(_fidelity_of_phase(signs, m11, m12, m21, m22, amp, np.array([theta]))[0])

    grid = np.arange(_PHASE_GRID_POINTS) * (2.0 * math.pi / _PHASE_GRID_POINTS)
    coarse = _fidelity_of_phase(signs, m11, m12, m21, m22, amp, grid)
    k = int(np.argmax(coarse))  # first maximum = smallest theta on ties
    half_step = 2.0 * math.pi / _PHASE_GRID_POINTS

    lo, hi = grid[k] - half_step, grid[k] + half_step
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fid(c), fid(d)
    while hi - lo > _PHASE_TOL:
        if fc >= fd:  # ties shrink toward the smaller phase
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fid(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fid(d)
    return float(0.5 * (lo + hi)) % (2.0 * math.pi)


def evaluate_gate(
    base: ValidatedChain,
    carrier: float,
    mirror: MirrorTermination,
    sites: Sequence[int] | None = None,
    calibrate: bool = True,
) -> GateResult:
    """Calibrate (optionally), evaluate all configurations, and score the gate."""
    theta = calibrate_mirror_phase(base, carrier, mirror, sites) if calibrate else mirror.phase
    tuned = replace(mirror, phase=theta)
    amplitudes = gate_amplitudes(base, carrier, tuned, sites)
    fidelity, loss = fidelity_and_loss(amplitudes)
    return GateResult(
        amplitudes=amplitudes,
        fidelity=fidelity,
        photon_loss=loss,
        mirror_phase=theta,
        carrier=carrier,
    )


def set_couplings(
    chain: ValidatedChain, g_over_Gamma: float, sites: Sequence[int] | None = None
) -> ValidatedChain:
    """Set every qubit-bearing subsystem's coupling to g_over_Gamma times its own Gamma."""
    sites = qubit_sites(chain) if sites is None else tuple(sites)
    subsystems = list(chain.subsystems)
    for j in sites:
        subsystems[j] = replace(subsystems[j], g=g_over_Gamma * chain.cavity_decays[j])
    return chain.replace_subsystems(tuple(subsystems))


def apply_scenario(chain: ValidatedChain, scenario: DetuningScenario) -> ValidatedChain:
    """Layer a detuning scenario onto a chain."""
    subsystems = list(chain.subsystems)
    if scenario.cavity_offsets is not None:
        if len(scenario.cavity_offsets) != chain.size:
            raise LengthMismatch(
                f"scenario {scenario.id!r}: {len(scenario.cavity_offsets)} cavity offsets "
                f"for {chain.size} subsystems"
            )
        for j, off in enumerate(scenario.cavity_offsets):
            p = subsystems[j]
            subsystems[j] = replace(
                p,
                omega_c=p.omega_c + off,
                omega_r=None if p.omega_r is None else p.omega_r + off,
            )
    if scenario.qd_offsets is not None:
        if len(scenario.qd_offsets) != chain.size:
            raise LengthMismatch(
                f"scenario {scenario.id!r}: {len(scenario.qd_offsets)} dot offsets "
                f"for {chain.size} subsystems"
            )
        for j, off in enumerate(scenario.qd_offsets):
            p = subsystems[j]
            if p.omega_r is not None:
                subsystems[j] = replace(p, omega_r=p.omega_c - off)
    return chain.replace_subsystems(tuple(subsystems))


def gate_sweep(
    base: ValidatedChain,
    g_values: Sequence[float],
    detuning_scenarios: Sequence[DetuningScenario] = (ON_RESONANCE,),
    carrier: float | None = None,
    mirror: MirrorTermination | None = None,
    sites: Sequence[int] | None = None,
) -> list[GateSweepRow]:
    """Fidelity/loss table over coupling strengths (in units of Gamma) and scenarios.

    Each cell re-applies its scenario detunings to the base chain, recalibrates
    the mirror phase, and evaluates the gate at the carrier.  Cell-level engine
    failures are recorded in the row rather than aborting the sweep.
    """
    if mirror is None:
        mirror = base.mirror
    if mirror is None:
        raise LengthMismatch("gate sweep needs a mirror termination (config or argument)")
    if carrier is None:
        carrier = DEFAULT_CARRIER_DETUNING * base.subsystems[0].kappa0
    sites = qubit_sites(base) if sites is None else tuple(sites)

    rows: list[GateSweepRow] = []
    for g_val in g_values:
        coupled = set_couplings(base, float(g_val), sites)
        for scenario in detuning_scenarios:
            cell = apply_scenario(coupled, scenario)
            try:
                result = evaluate_gate(cell, carrier, mirror, sites)
            except (EngineSingularity, AllAmplitudesZero) as exc:
                rows.append(
                    GateSweepRow(
                        g_over_Gamma=float(g_val),
                        scenario_id=scenario.id,
                        theta_m_star=math.nan,
                        fidelity=math.nan,
                        photon_loss=math.nan,
                        amplitudes={},
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
                continue
            rows.append(
                GateSweepRow(
                    g_over_Gamma=float(g_val),
                    scenario_id=scenario.id,
                    theta_m_star=result.mirror_phase,
                    fidelity=result.fidelity,
                    photon_loss=result.photon_loss,
                    amplitudes={q.label: lam for q, lam in result.amplitudes.items()},
                )
            )
    return rows


def amplitude_labels(chain: ValidatedChain, sites: Sequence[int] | None = None) -> tuple[str, ...]:
    """Stable configuration labels ('gg', 'gr', ...) for table headers."""
    return tuple(q.label for q in enumerate_configurations(chain, sites))
