"""2x2 transfer-matrix engine for waveguide-coupled cavity/dot chains.

Each subsystem maps the left-port field pair (a_in, a_out) to the right-port
pair (b_in, b_out) through

    T = [[-kappa1, alpha - Gamma], [alpha - Gamma + 2*kappa1, kappa1]] / (alpha + kappa1 - Gamma)

where ``alpha = i*Delta_c + g^2 / (i*Delta_r - gamma)`` collects the cavity
detuning and the adiabatically eliminated dot response in the weak-excitation
(linear) limit.  A waveguide segment contributes the port swap

    T0 = [[0, tau*e^{i*theta}], [e^{-i*theta}/tau, 0]]

with tau the single-pass amplitude transmission (the 1/tau backward entry
keeps the physical scattering sub-unitary while transfer entries may exceed 1).
Chains compose by left-multiplication: M = T_N T0 ... T0 T_1, and every factor
has determinant -1 exactly, so |det M| = 1 is a sharp numerical invariant.

Scattering amplitudes follow from boundary conditions on M: an open chain sets
b_in = 0 at the far port, a mirror sets b_in = rho * b_out with rho the complex
round-trip factor.  Forward propagation carries e^{+i*theta}; only relative
phases are observable, and the convention is fixed here once.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import (
    DenominatorSingularity,
    DivisionSingularity,
    TerminationSingularity,
    TransparencySingularity,
)
from .model import SubsystemParams, ValidatedChain, WaveguideLink

# Absolute pole-detection threshold, fixed in kappa0-normalized units; far
# below any physical rate scale of interest.
SINGULARITY_TOL = 1e-14


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex map from (a_in, a_out) at one port pair to (b_in, b_out)."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass(frozen=True)
class ScatteringPair:
    """Reflection and transmission amplitudes of the whole chain, per unit input."""

    r: complex
    t: complex


def subsystem_alpha(p: SubsystemParams, omega: float) -> complex:
    """Cavity-plus-dot response alpha = i*Delta_c + g^2 / (i*Delta_r - gamma).

    Delta_c = omega - omega_c and Delta_r = omega - omega_r are detunings of
    the drive from cavity and dot.  With g = 0 (no dot, decoupled dot, or dot
    parked in its uncoupled ground state) the second term vanishes identically
    and the dot rates drop out.
    """
    alpha = 1j * (omega - p.omega_c)
    if p.g != 0.0:
        denom = 1j * (omega - p.omega_r) - p.qd_decay
        if abs(denom) < SINGULARITY_TOL:
            raise DivisionSingularity(
                "lossless dot driven on resonance: i*Delta_r - gamma = 0 with g > 0"
            )
        alpha += (p.g * p.g) / denom
    return alpha


def subsystem_matrix(p: SubsystemParams, omega: float) -> TransferMatrix:
    """Transfer matrix of one side-coupled cavity/dot subsystem."""
    alpha = subsystem_alpha(p, omega)
    gamma_tot = p.cavity_decay
    kappa1 = p.kappa1
    denom = alpha + kappa1 - gamma_tot
    if abs(denom) < SINGULARITY_TOL:
        raise DenominatorSingularity(
            f"alpha + kappa1 - Gamma = {denom!r} is a pole of the transfer representation"
        )
    beta = alpha - gamma_tot
    return TransferMatrix(
        -kappa1 / denom,
        beta / denom,
        (beta + 2.0 * kappa1) / denom,
        kappa1 / denom,
    )


def waveguide_matrix(link: WaveguideLink) -> TransferMatrix:
    """Transfer matrix of a waveguide segment: phase, loss, and port swap."""
    tau = link.amplitude_transmission
    phase = cmath.exp(1j * link.theta)
    return TransferMatrix(0.0j, tau * phase, 1.0 / (tau * phase), 0.0j)


def cascade(chain: ValidatedChain, omega: float) -> TransferMatrix:
    """Whole-chain transfer matrix M = T_N T0^(N-1) ... T0^(1) T_1.

    The first subsystem's matrix is the rightmost factor (applied first).  A
    single-subsystem chain returns exactly ``subsystem_matrix`` of it.
    """
    try:
        matrix = subsystem_matrix(chain.subsystems[0], omega)
    except (DivisionSingularity, DenominatorSingularity) as exc:
        raise type(exc)(f"subsystem 0: {exc}") from None
    for j in range(1, chain.size):
        step = waveguide_matrix(chain.links[j - 1])
        try:
            matrix = subsystem_matrix(chain.subsystems[j], omega) @ (step @ matrix)
        except (DivisionSingularity, DenominatorSingularity) as exc:
            raise type(exc)(f"subsystem {j}: {exc}") from None
    return matrix


def scattering(matrix: TransferMatrix) -> ScatteringPair:
    """Open-chain reflection and transmission from a cascaded transfer matrix.

    Imposing no input at the far port (b_in = 0) gives r = -M11/M12 and
    t = M21 - M22*M11/M12 (equivalently -det(M)/M12).
    """
    if abs(matrix.m12) < SINGULARITY_TOL:
        raise TransparencySingularity("|M12| ~ 0: scattering extraction undefined")
    r = -matrix.m11 / matrix.m12
    t = matrix.m21 + matrix.m22 * r
    return ScatteringPair(r=r, t=t)


def terminated_reflection(matrix: TransferMatrix, rho: complex) -> complex:
    """Full-system reflection of a mirror-terminated chain.

    The mirror closes the far port with b_in = rho * b_out, which resolves to
    lambda = -(M11 - rho*M21) / (M12 - rho*M22); lambda is a_out/a_in at the
    input port and sums every mirror round trip.  rho = 0 reduces to the open
    chain's reflection.
    """
    denom = matrix.m12 - rho * matrix.m22
    if abs(denom) < SINGULARITY_TOL:
        raise TerminationSingularity("|M12 - rho*M22| ~ 0: terminated reflection undefined")
    return -(matrix.m11 - rho * matrix.m21) / denom


def chain_scattering(chain: ValidatedChain, omega: float) -> ScatteringPair:
    """Convenience: cascade then extract the open-chain scattering pair."""
    return scattering(cascade(chain, omega))
