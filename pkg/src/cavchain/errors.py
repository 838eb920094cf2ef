"""Exception taxonomy shared by every cavchain module.

Two families: configuration errors (bad input, caught before any physics
runs) and numerical singularities (valid input that lands on a pole of the
chosen representation).  The CLI maps the first family to exit code 2; the
second is either masked per sample (spectral sweeps) or surfaced with
context (single-shot evaluations).
"""

from __future__ import annotations


class CavchainError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CavchainError, ValueError):
    """A chain configuration failed validation."""


class EmptyChain(ConfigError):
    """The chain has no subsystems."""


class LinkCountMismatch(ConfigError):
    """len(links) != len(subsystems) - 1."""


class NegativeRate(ConfigError):
    """A decay/coupling rate is negative or non-finite."""


class LossOutOfRange(ConfigError):
    """A power loss or reflectivity lies outside its physical range."""


class ZeroKappa0(ConfigError):
    """Cannot normalize: the first subsystem has zero intrinsic decay."""


class MissingQdFrequency(ConfigError):
    """A subsystem has g > 0 but no quantum-dot transition frequency."""


class UnknownUnitTag(ConfigError):
    """The frequency unit tag is not one of the supported modes."""


class LengthMismatch(ConfigError):
    """A per-subsystem list (qubit states, scenario offsets) has wrong length."""


class TooManyQubits(ConfigError):
    """Gate evaluation is capped at 10 qubits (2^n engine calls per cell)."""


class EngineSingularity(CavchainError, ArithmeticError):
    """Base class for poles of the scattering computation."""


class DivisionSingularity(EngineSingularity):
    """Lossless quantum dot driven exactly on resonance (i*Delta_r - gamma = 0)."""


class DenominatorSingularity(EngineSingularity):
    """Transfer-matrix denominator alpha + kappa1 - Gamma vanished."""


class TransparencySingularity(EngineSingularity):
    """Scattering extraction undefined: |M12| ~ 0 (perfectly transparent chain)."""


class TerminationSingularity(EngineSingularity):
    """Mirror boundary condition has no solution: |M12 - rho*M22| ~ 0."""


class SingularSystem(EngineSingularity):
    """The steady-state linear system is singular or produced non-finite fields."""


class PhaseUnwrapFailure(CavchainError, RuntimeError):
    """Phase steps approached the +-pi ambiguity: the frequency grid is too coarse."""


class DressedModeNotApplicable(CavchainError, ValueError):
    """Dressed-mode peak prediction requires every quantum dot to sit on its cavity resonance."""


class AllAmplitudesZero(CavchainError, ValueError):
    """Every gate amplitude is zero: conditional fidelity is undefined."""
