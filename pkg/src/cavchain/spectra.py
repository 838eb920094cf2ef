"""Frequency sweeps, lineshape features, group delay, and dressed-mode prediction.

The sweep applies the transfer engine point by point over a frequency grid and
records complex reflection/transmission together with derived powers, loss,
and the unwrapped transmission phase.  Post-processing stays deliberately
simple and testable: phase unwrapping is the standard +-pi jump correction,
group delay is a second-order central difference of the unwrapped phase, and
peak/dip extraction is a prominence-filtered local-extrema scan with parabolic
sub-grid refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .errors import DressedModeNotApplicable, EngineSingularity, PhaseUnwrapFailure
from .model import FrequencyGrid, ValidatedChain
from .transfer import cascade, scattering

# Unwrapped phase steps beyond this fraction of pi are treated as aliasing:
# the grid no longer resolves the steepest feature it contains.
PHASE_STEP_LIMIT = 0.9 * math.pi

# Exact-coincidence tolerance for dressed-mode bookkeeping (kappa0 units).
MODE_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Per-frequency scattering record of one chain.

    ``valid`` flags grid points where the engine hit a representation pole;
    such samples carry NaN and are skipped by the post-processing steps.
    ``phase`` is the unwrapped argument of t.  ``cavity_decay`` is the first
    subsystem's field decay rate, kept so delay can be quoted in cavity
    lifetimes without re-threading the chain.
    """

    omega: np.ndarray
    r: np.ndarray
    t: np.ndarray
    T_power: np.ndarray
    R_power: np.ndarray
    loss: np.ndarray
    phase: np.ndarray
    valid: np.ndarray
    cavity_decay: float

    @property
    def masked_count(self) -> int:
        return int(np.count_nonzero(~self.valid))


@dataclass(frozen=True)
class SpectralFeature:
    """One detected transmission peak or dip."""

    kind: str  # "peak" | "dip"
    omega_center: float
    height: float
    width_fwhm: float


@dataclass(frozen=True)
class DelayProfile:
    """Group delay along a spectrum's grid (valid samples only)."""

    omega: np.ndarray
    phase: np.ndarray
    tau: np.ndarray
    tau_over_taulife: np.ndarray


@dataclass(frozen=True)
class ModeWindow:
    """Interval between two non-resonant modes with the predicted peak at its midpoint."""

    lo: float
    hi: float
    predicted_peak: float
    subsystems: tuple[int, ...]


@dataclass(frozen=True)
class DressedModeReport:
    """Dressed frequencies per subsystem plus predicted transparency-peak windows."""

    modes: tuple[tuple[float, ...], ...]
    windows: tuple[ModeWindow, ...]


def sweep(chain: ValidatedChain, grid: FrequencyGrid) -> Spectrum:
    """Scattering spectrum of the open chain over a frequency grid.

    Points are independent and evaluated in grid order; the result is a pure
    function of (chain, grid).  Isolated engine singularities are masked per
    sample instead of failing the sweep.
    """
    omega = grid.values()
    n = omega.size
    r = np.full(n, np.nan + 0j, dtype=complex)
    t = np.full(n, np.nan + 0j, dtype=complex)
    valid = np.zeros(n, dtype=bool)
    for k in range(n):
        try:
            pair = scattering(cascade(chain, float(omega[k])))
        except EngineSingularity:
            continue
        r[k] = pair.r
        t[k] = pair.t
        valid[k] = True

    T_power = np.where(valid, np.abs(t) ** 2, np.nan)
    R_power = np.where(valid, np.abs(r) ** 2, np.nan)
    loss = np.where(valid, 1.0 - T_power - R_power, np.nan)
    phase = np.full(n, np.nan)
    if np.any(valid):
        phase[valid] = np.unwrap(np.angle(t[valid]))
    return Spectrum(
        omega=omega,
        r=r,
        t=t,
        T_power=T_power,
        R_power=R_power,
        loss=loss,
        phase=phase,
        valid=valid,
        cavity_decay=chain.cavity_decays[0],
    )


def group_delay(spectrum: Spectrum, port: str = "t") -> DelayProfile:
    """Group delay tau = d(phase)/d(omega) by central differences.

    ``port`` selects the transmission ("t") or reflection ("r") phase.  The
    interior stencil is second-order; endpoints use one-sided differences.
    Delay is returned both in native (1/kappa0) units and in cavity lifetimes
    tau_life = 1/(2*Gamma) of the first subsystem.  Raises
    :class:`PhaseUnwrapFailure` when consecutive unwrapped phase steps approach
    the +-pi ambiguity, i.e. the grid is too coarse for the steepest feature.
    """
    if port not in ("t", "r"):
        raise ValueError(f"port must be 't' or 'r', got {port!r}")
    omega = spectrum.omega[spectrum.valid]
    if omega.size < 2:
        raise PhaseUnwrapFailure("fewer than 2 valid samples; cannot differentiate")
    if port == "t":
        phase = spectrum.phase[spectrum.valid]
    else:
        phase = np.unwrap(np.angle(spectrum.r[spectrum.valid]))
    steps = np.abs(np.diff(phase))
    if np.any(steps > PHASE_STEP_LIMIT):
        worst = float(steps.max())
        raise PhaseUnwrapFailure(
            f"unwrapped phase step {worst:.3f} rad exceeds {PHASE_STEP_LIMIT:.3f}; refine the grid"
        )
    tau = np.gradient(phase, omega)
    tau_life = 1.0 / (2.0 * spectrum.cavity_decay)
    return DelayProfile(omega=omega, phase=phase, tau=tau, tau_over_taulife=tau / tau_life)


def _refine_parabolic(x: np.ndarray, y: np.ndarray, k: int) -> tuple[float, float]:
    """Vertex of the parabola through points k-1, k, k+1 (uniform spacing assumed)."""
    if k == 0 or k == x.size - 1:
        return float(x[k]), float(y[k])
    y0, y1, y2 = float(y[k - 1]), float(y[k]), float(y[k + 1])
    curv = y0 - 2.0 * y1 + y2
    if curv == 0.0:
        return float(x[k]), y1
    shift = float(np.clip(0.5 * (y0 - y2) / curv, -1.0, 1.0))
    center = float(x[k]) + shift * float(x[k + 1] - x[k])
    height = y1 - 0.25 * (y0 - y2) * shift
    return center, height


def find_features(spectrum: Spectrum, prominence: float = 0.05) -> list[SpectralFeature]:
    """Detect transmission peaks and dips above a prominence threshold.

    Extrema are located on the valid samples with scipy's prominence filter,
    centers are refined by a three-point parabolic fit, and the FWHM is the
    half-prominence width obtained by linear interpolation of the crossings.
    Returns an empty list when nothing clears the threshold.
    """
    omega = spectrum.omega[spectrum.valid]
    power = spectrum.T_power[spectrum.valid]
    if omega.size < 3:
        return []
    spacing = float(np.mean(np.diff(omega)))

    features: list[SpectralFeature] = []
    for kind, signal in (("peak", power), ("dip", -power)):
        indices, _ = find_peaks(signal, prominence=prominence)
        if indices.size == 0:
            continue
        widths = peak_widths(signal, indices, rel_height=0.5)[0]
        for k, w in zip(indices, widths):
            center, height = _refine_parabolic(omega, signal, int(k))
            features.append(
                SpectralFeature(
                    kind=kind,
                    omega_center=center,
                    height=height if kind == "peak" else -height,
                    width_fwhm=float(w) * spacing,
                )
            )
    features.sort(key=lambda f: f.omega_center)
    return features


def _subsystem_modes(chain: ValidatedChain) -> list[tuple[float, ...]]:
    modes: list[tuple[float, ...]] = []
    for j, p in enumerate(chain.subsystems):
        if p.g > 0.0:
            if abs(p.omega_c - p.omega_r) > MODE_MATCH_TOL:
                raise DressedModeNotApplicable(
                    f"subsystems[{j}]: dot detuned from its cavity; "
                    "the dressed-mode prediction assumes omega_c = omega_r"
                )
            modes.append((p.omega_c - p.g, p.omega_c + p.g))
        else:
            modes.append((p.omega_c,))
    return modes


def dressed_mode_positions(chain: ValidatedChain) -> DressedModeReport:
    """Predict transparency-peak windows from the dressed-mode picture.

    A resonantly coupled dot splits its cavity into two dressed modes at
    omega_c -+ g; an empty cavity keeps its bare mode.  Candidate peaks sit
    midway between non-resonant mode pairs: every cross pair of adjacent
    subsystems' modes (at least one side dressed), plus each dressed pair's
    own splitting interval.  A candidate is discarded when a mode of the chain
    falls exactly on its midpoint — that mode reflects the light which would
    otherwise interfere into a peak.  Chains with no dots yield no prediction.
    """
    modes = _subsystem_modes(chain)
    all_modes = [m for per_sub in modes for m in per_sub]

    def blocked(midpoint: float) -> bool:
        return any(abs(midpoint - m) <= MODE_MATCH_TOL for m in all_modes)

    windows: list[ModeWindow] = []

    def add(lo: float, hi: float, subsystems: tuple[int, ...]) -> None:
        if hi - lo <= MODE_MATCH_TOL:
            return
        mid = 0.5 * (lo + hi)
        if blocked(mid):
            return
        for w in windows:
            if (
                abs(w.lo - lo) <= MODE_MATCH_TOL
                and abs(w.hi - hi) <= MODE_MATCH_TOL
                and abs(w.predicted_peak - mid) <= MODE_MATCH_TOL
            ):
                return
        windows.append(ModeWindow(lo=lo, hi=hi, predicted_peak=mid, subsystems=subsystems))

    for j, per_sub in enumerate(modes):
        if len(per_sub) == 2:
            add(per_sub[0], per_sub[1], (j,))

    for j in range(chain.size - 1):
        left, right = modes[j], modes[j + 1]
        if len(left) == 1 and len(right) == 1:
            continue  # no dressed pair involved
        for m1 in left:
            for m2 in right:
                lo, hi = (m1, m2) if m1 <= m2 else (m2, m1)
                add(lo, hi, (j, j + 1))

    windows.sort(key=lambda w: w.predicted_peak)
    return DressedModeReport(modes=tuple(modes), windows=tuple(windows))


def integrated_phase_change(delay: DelayProfile) -> float:
    """Trapezoid integral of tau over the grid; equals the net phase change."""
    return float(np.trapezoid(delay.tau, delay.omega))


def spectrum_fields(spectrum: Spectrum) -> dict[str, np.ndarray]:
    """Column view of a spectrum in the stable serialization order."""
    return {
        "omega": spectrum.omega,
        "re_r": np.real(spectrum.r),
        "im_r": np.imag(spectrum.r),
        "re_t": np.real(spectrum.t),
        "im_t": np.imag(spectrum.t),
        "T_power": spectrum.T_power,
        "R_power": spectrum.R_power,
        "loss": spectrum.loss,
        "phase_unwrapped": spectrum.phase,
    }


def masked_fraction(spectrum: Spectrum) -> float:
    return spectrum.masked_count / spectrum.omega.size
