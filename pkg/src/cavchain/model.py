"""Domain model for a waveguide-coupled chain of nanocavity/quantum-dot subsystems.

A chain is an ordered list of side-coupled cavities (each optionally hosting a
two-level quantum dot), the waveguide segments joining neighbours, and an
optional reflecting termination after the last cavity.  All records are frozen
dataclasses: once validated they are immutable and safe to share across
threads.

Internally every computation runs in "kappa0 units": rates and frequencies are
divided by the intrinsic decay rate of the first cavity, and frequencies are
quoted as detunings from the chain's reference frequency.  ``normalize_units``
performs that rescaling; ``validate_config`` checks structure and returns the
blessed :class:`ValidatedChain` used by the engines.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyChain,
    LinkCountMismatch,
    LossOutOfRange,
    MissingQdFrequency,
    NegativeRate,
    UnknownUnitTag,
    ZeroKappa0,
)

KAPPA0_UNITS = "kappa0-units"
ABSOLUTE_UNITS = "absolute"
FREQUENCY_UNITS = (KAPPA0_UNITS, ABSOLUTE_UNITS)


@dataclass(frozen=True)
class SubsystemParams:
    """One side-coupled cavity, optionally hosting a two-level quantum dot.

    omega_c   cavity resonance frequency
    omega_r   quantum-dot transition frequency; None when no dot is present
    kappa0    intrinsic cavity decay rate
    kappa1    external (per-port waveguide) cavity decay rate
    g         dot-cavity coupling strength; 0 means no dot or a decoupled dot
    gamma_s   dot spontaneous decay rate
    gamma_p   dot pure dephasing rate

    The cavity field amplitude decays at ``cavity_decay`` = (kappa0 + 2*kappa1)/2
    (two waveguide ports plus intrinsic loss) and the dot dipole at
    ``qd_decay`` = gamma_s/2 + gamma_p, the standard dipole decoherence
    composition (reduces to gamma_s/2 for pure radiative decay).
    """

    omega_c: float
    kappa0: float
    kappa1: float
    g: float = 0.0
    omega_r: float | None = None
    gamma_s: float = 0.0
    gamma_p: float = 0.0

    @property
    def cavity_decay(self) -> float:
        return 0.5 * (self.kappa0 + 2.0 * self.kappa1)

    @property
    def qd_decay(self) -> float:
        return 0.5 * self.gamma_s + self.gamma_p

    @property
    def has_qd(self) -> bool:
        return self.omega_r is not None


@dataclass(frozen=True)
class WaveguideLink:
    """Waveguide segment between two adjacent cavities.

    theta       accumulated propagation phase (radians)
    power_loss  single-pass scattering power loss fraction, in [0, 1)
    """

    theta: float
    power_loss: float = 0.0

    @property
    def amplitude_transmission(self) -> float:
        return math.sqrt(1.0 - self.power_loss)


@dataclass(frozen=True)
class MirrorTermination:
    """Reflecting element closing the waveguide after the last cavity.

    reflectivity  power reflectivity, in [0, 1]
    phase         one-way propagation phase of the final segment (applied twice);
                  the mirror's own phase is folded into the same knob since the
                  two are observationally equivalent
    power_loss    single-pass power loss of the final segment, in [0, 1)
    """

    reflectivity: float
    phase: float = 0.0
    power_loss: float = 0.0

    @property
    def round_trip_factor(self) -> complex:
        """Complex amplitude factor for one full mirror round trip."""
        amp = math.sqrt(self.reflectivity) * (1.0 - self.power_loss)
        return amp * complex(math.cos(2.0 * self.phase), math.sin(2.0 * self.phase))


@dataclass(frozen=True)
class ChainConfig:
    """Raw (possibly unvalidated, possibly absolute-unit) chain description."""

    subsystems: tuple[SubsystemParams, ...]
    links: tuple[WaveguideLink, ...] = ()
    mirror: MirrorTermination | None = None
    frequency_unit: str = KAPPA0_UNITS
    reference_frequency: float = 0.0


@dataclass(frozen=True)
class ValidatedChain:
    """A structurally checked, kappa0-normalized, reference-centered chain.

    Derived quantities are precomputed so downstream modules never repeat the
    composition rules: ``cavity_decays`` holds each subsystem's field decay
    rate, ``qd_decays`` each dot's total decoherence rate, ``link_transmissions``
    the per-link amplitude factor, and ``mirror_factor`` the complex round-trip
    mirror amplitude (None without a mirror).
    """

    subsystems: tuple[SubsystemParams, ...]
    links: tuple[WaveguideLink, ...]
    mirror: MirrorTermination | None
    frequency_unit: str
    reference_frequency: float
    cavity_decays: tuple[float, ...]
    qd_decays: tuple[float, ...]
    link_transmissions: tuple[float, ...]
    mirror_factor: complex | None

    @property
    def size(self) -> int:
        return len(self.subsystems)

    def replace_subsystems(self, subsystems: tuple[SubsystemParams, ...]) -> "ValidatedChain":
        """Rebuild with new subsystem parameters (re-deriving decay rates)."""
        return dataclasses.replace(
            self,
            subsystems=subsystems,
            cavity_decays=tuple(p.cavity_decay for p in subsystems),
            qd_decays=tuple(p.qd_decay for p in subsystems),
        )


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform, inclusive frequency grid (detunings from the chain reference)."""

    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid endpoints must be finite")
        if self.stop <= self.start:
            raise ValueError("grid must be strictly increasing (stop > start)")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


def _check_rate(value: float, field: str) -> None:
    if not math.isfinite(value) or value < 0.0:
        raise NegativeRate(f"{field} must be finite and non-negative, got {value!r}")


def _check_finite(value: float, field: str) -> None:
    if not math.isfinite(value):
        raise NegativeRate(f"{field} must be finite, got {value!r}")


def normalize_units(config: ChainConfig) -> ChainConfig:
    """Rescale a chain to kappa0 units centered on its reference frequency.

    Every rate and frequency is divided by the first subsystem's kappa0 and
    frequencies are additionally shifted so the reference frequency maps to 0.
    Dimensionless quantities (link phases, losses, mirror parameters) are
    untouched.  Applying this twice equals applying it once: after the first
    pass the scale factor is exactly 1.0 and the shift exactly 0.0.
    """
    if config.frequency_unit not in FREQUENCY_UNITS:
        raise UnknownUnitTag(
            f"frequency_unit must be one of {FREQUENCY_UNITS}, got {config.frequency_unit!r}"
        )
    if not config.subsystems:
        raise EmptyChain("chain has no subsystems")
    scale = config.subsystems[0].kappa0
    if not math.isfinite(scale) or scale < 0.0:
        raise NegativeRate(f"subsystems[0].kappa0 must be finite and non-negative, got {scale!r}")
    if scale == 0.0:
        raise ZeroKappa0("subsystems[0].kappa0 is zero; kappa0 units are undefined")
    ref = config.reference_frequency
    _check_finite(ref, "reference_frequency")

    subsystems = tuple(
        SubsystemParams(
            omega_c=(p.omega_c - ref) / scale,
            kappa0=p.kappa0 / scale,
            kappa1=p.kappa1 / scale,
            g=p.g / scale,
            omega_r=None if p.omega_r is None else (p.omega_r - ref) / scale,
            gamma_s=p.gamma_s / scale,
            gamma_p=p.gamma_p / scale,
        )
        for p in config.subsystems
    )
    return ChainConfig(
        subsystems=subsystems,
        links=config.links,
        mirror=config.mirror,
        frequency_unit=KAPPA0_UNITS,
        reference_frequency=0.0,
    )


def validate_config(raw: ChainConfig, *, normalize: bool = True) -> ValidatedChain:
    """Check a raw configuration and return the normalized, blessed chain.

    Raises a :class:`~cavchain.errors.ConfigError` subclass naming the
    offending field and index on the first structural problem found.  Accepted
    numeric values are never changed other than by unit scaling.
    """
    if raw.frequency_unit not in FREQUENCY_UNITS:
        raise UnknownUnitTag(
            f"frequency_unit must be one of {FREQUENCY_UNITS}, got {raw.frequency_unit!r}"
        )
    if not raw.subsystems:
        raise EmptyChain("chain has no subsystems")
    n = len(raw.subsystems)
    if len(raw.links) != n - 1:
        raise LinkCountMismatch(
            f"chain with {n} subsystem(s) needs {n - 1} link(s), got {len(raw.links)}"
        )
    _check_finite(raw.reference_frequency, "reference_frequency")

    for j, p in enumerate(raw.subsystems):
        tag = f"subsystems[{j}]"
        _check_finite(p.omega_c, f"{tag}.omega_c")
        _check_rate(p.kappa0, f"{tag}.kappa0")
        _check_rate(p.kappa1, f"{tag}.kappa1")
        _check_rate(p.g, f"{tag}.g")
        _check_rate(p.gamma_s, f"{tag}.gamma_s")
        _check_rate(p.gamma_p, f"{tag}.gamma_p")
        if p.omega_r is not None:
            _check_finite(p.omega_r, f"{tag}.omega_r")
        elif p.g > 0.0:
            raise MissingQdFrequency(f"{tag}: g > 0 requires omega_r")

    for j, link in enumerate(raw.links):
        tag = f"links[{j}]"
        _check_finite(link.theta, f"{tag}.theta")
        if not math.isfinite(link.power_loss) or not (0.0 <= link.power_loss < 1.0):
            raise LossOutOfRange(f"{tag}.power_loss must lie in [0, 1), got {link.power_loss!r}")

    if raw.mirror is not None:
        m = raw.mirror
        if not math.isfinite(m.reflectivity) or not (0.0 <= m.reflectivity <= 1.0):
            raise LossOutOfRange(f"mirror.reflectivity must lie in [0, 1], got {m.reflectivity!r}")
        _check_finite(m.phase, "mirror.phase")
        if not math.isfinite(m.power_loss) or not (0.0 <= m.power_loss < 1.0):
            raise LossOutOfRange(f"mirror.power_loss must lie in [0, 1), got {m.power_loss!r}")

    config = normalize_units(raw) if normalize else raw
    return ValidatedChain(
        subsystems=config.subsystems,
        links=config.links,
        mirror=config.mirror,
        frequency_unit=config.frequency_unit,
        reference_frequency=config.reference_frequency,
        cavity_decays=tuple(p.cavity_decay for p in config.subsystems),
        qd_decays=tuple(p.qd_decay for p in config.subsystems),
        link_transmissions=tuple(l.amplitude_transmission for l in config.links),
        mirror_factor=None if config.mirror is None else config.mirror.round_trip_factor,
    )
