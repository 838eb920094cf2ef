"""Independent steady-state scattering solver used to cross-check the transfer engine.

Instead of cascading 2x2 matrices, this module writes down the full linear
steady state of the driven chain and solves it densely.  For subsystem j the
weak-excitation equations of motion give

    0 = (i*Delta_c,j - Gamma_j) c_j - i g_j s_j + i sqrt(kappa1_j) (a_in_j + b_in_j)
    0 = (i*Delta_r,j - gamma_j) s_j - i g_j c_j

with port relations b_out_j = a_in_j + i sqrt(kappa1_j) c_j and
a_out_j = b_in_j + i sqrt(kappa1_j) c_j, link relations
a_in_{j+1} = tau e^{i theta} b_out_j and b_in_j = tau e^{i theta} a_out_{j+1},
and the far boundary either open (b_in_N = 0) or mirror-terminated
(b_in_N = rho * b_out_N).  The 6N unknowns (c, s, a_in, a_out, b_in, b_out per
subsystem) are assembled as one dense complex system and handed to
``numpy.linalg.solve`` — chains are short by construction, so clarity beats
sparsity here.  Nothing is shared with :mod:`cavchain.transfer` beyond the
parameter records, which is what makes the agreement test meaningful.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .model import ValidatedChain
from .transfer import ScatteringPair


@dataclass(frozen=True)
class SteadyStateSolution:
    """All steady-state amplitudes of a driven chain, per subsystem."""

    cavity_amplitudes: tuple[complex, ...]
    dipole_amplitudes: tuple[complex, ...]
    a_in: tuple[complex, ...]
    a_out: tuple[complex, ...]
    b_in: tuple[complex, ...]
    b_out: tuple[complex, ...]

    @property
    def reflection(self) -> complex:
        return self.a_out[0] / self.a_in[0]

    @property
    def transmission(self) -> complex:
        return self.b_out[-1] / self.a_in[0]


def steady_state_solve(
    chain: ValidatedChain,
    omega: float,
    a_in_1: complex = 1.0 + 0.0j,
    termination: complex | None = None,
) -> SteadyStateSolution:
    """Solve the driven steady state of the chain at drive frequency ``omega``.

    ``termination`` is None for an open far port or the complex mirror
    round-trip factor rho for a terminated chain.  With zero input the
    homogeneous system returns exactly zero everywhere.
    """
    n = chain.size
    size = 6 * n
    # Unknown layout per subsystem j: [c, s, a_in, a_out, b_in, b_out].
    c_, s_, ain_, aout_, bin_, bout_ = range(6)

    def idx(j: int, which: int) -> int:
        return 6 * j + which

    a = np.zeros((size, size), dtype=complex)
    b = np.zeros(size, dtype=complex)
    row = 0

    for j, p in enumerate(chain.subsystems):
        sqrt_k1 = math.sqrt(p.kappa1)
        delta_c = omega - p.omega_c
        # Cavity equation of motion (steady state).
        a[row, idx(j, c_)] = 1j * delta_c - chain.cavity_decays[j]
        a[row, idx(j, s_)] = -1j * p.g
        a[row, idx(j, ain_)] = 1j * sqrt_k1
        a[row, idx(j, bin_)] = 1j * sqrt_k1
        row += 1
        # Dipole equation; without a coupled dot the dipole is pinned to zero.
        if p.g != 0.0 and p.omega_r is not None:
            a[row, idx(j, s_)] = 1j * (omega - p.omega_r) - chain.qd_decays[j]
            a[row, idx(j, c_)] = -1j * p.g
        else:
            a[row, idx(j, s_)] = 1.0
        row += 1
        # Output-port relations.
        a[row, idx(j, bout_)] = 1.0
        a[row, idx(j, ain_)] = -1.0
        a[row, idx(j, c_)] = -1j * sqrt_k1
        row += 1
        a[row, idx(j, aout_)] = 1.0
        a[row, idx(j, bin_)] = -1.0
        a[row, idx(j, c_)] = -1j * sqrt_k1
        row += 1

    for j, link in enumerate(chain.links):
        hop = chain.link_transmissions[j] * cmath.exp(1j * link.theta)
        a[row, idx(j + 1, ain_)] = 1.0
        a[row, idx(j, bout_)] = -hop
        row += 1
        a[row, idx(j, bin_)] = 1.0
        a[row, idx(j + 1, aout_)] = -hop
        row += 1

    # Drive at the near port.
    a[row, idx(0, ain_)] = 1.0
    b[row] = a_in_1
    row += 1
    # Far boundary: open or mirror.
    a[row, idx(n - 1, bin_)] = 1.0
    if termination is not None:
        a[row, idx(n - 1, bout_)] = -termination
    row += 1
    assert row == size

    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"steady-state system is singular: {exc}") from None
    if not np.all(np.isfinite(x)):
        raise SingularSystem("steady-state solve produced non-finite amplitudes")

    def col(which: int) -> tuple[complex, ...]:
        return tuple(complex(x[idx(j, which)]) for j in range(n))

    return SteadyStateSolution(
        cavity_amplitudes=col(c_),
        dipole_amplitudes=col(s_),
        a_in=col(ain_),
        a_out=col(aout_),
        b_in=col(bin_),
        b_out=col(bout_),
    )


def oracle_scattering(chain: ValidatedChain, omega: float) -> ScatteringPair:
    """Open-chain (r, t) from the steady-state solver, for unit input."""
    sol = steady_state_solve(chain, omega, a_in_1=1.0 + 0.0j, termination=None)
    return ScatteringPair(r=sol.reflection, t=sol.transmission)


def oracle_terminated_reflection(chain: ValidatedChain, omega: float, rho: complex) -> complex:
    """Mirror-terminated full-system reflection from the steady-state solver."""
    sol = steady_state_solve(chain, omega, a_in_1=1.0 + 0.0j, termination=rho)
    return sol.reflection
