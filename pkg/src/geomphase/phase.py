"""Interference phase between the two arm states and its unwrapping.

The observable is the interference term 2<psi2|psi1>: its modulus c sets
the fringe contrast and its argument alpha is the relative (Pancharatnam)
phase.  alpha is only defined modulo 2*pi at a single parameter point, but
monitoring it continuously along a circuit and unwrapping with the
shortest-branch rule yields an unbounded phase whose total change over a
closed circuit is quantized in multiples of 2*pi.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonQuantizedWinding, OrthogonalStates

TWO_PI = 2.0 * np.pi

# |<psi2|psi1>| below this means the relative phase is undefined
ORTHOGONALITY_TOL = 1e-8

# |delta_alpha/2pi - round(...)| above this fails winding quantization
WINDING_RESIDUAL_TOL = 0.05


def wrap_angle(x):
    """Map an angle (or array of angles) to the interval (-pi, pi]."""
    w = np.asarray(x) % TWO_PI
    w = np.where(w > np.pi, w - TWO_PI, w)
    return float(w) if np.isscalar(x) or np.ndim(x) == 0 else w


@dataclass(frozen=True)
class PancharatnamReading:
    """Interference term at one parameter point: c and wrapped alpha."""

    modulus_c: float
    alpha_wrapped: float


@dataclass
class TraceSample:
    """One record of a phase trace."""

    index: int
    b1: float
    bz: float
    modulus_c: float
    alpha_wrapped: float
    alpha_unwrapped: float
    oracle_unwrapped: float = None


@dataclass
class PhaseTrace:
    """Ordered samples of the continuously monitored interference phase."""

    samples: list = field(default_factory=list)
    metadata: object = None

    def alphas_unwrapped(self):
        return np.array([s.alpha_unwrapped for s in self.samples])

    def delta_alpha(self):
        return self.samples[-1].alpha_unwrapped - self.samples[0].alpha_unwrapped


def pancharatnam(psi1, psi2):
    """Modulus and phase of the interference term 2<psi2|psi1>.

    Raises OrthogonalStates when the overlap is too small for the phase to
    be meaningful.
    """
    overlap = np.vdot(psi2, psi1)
    mag = abs(overlap)
    if mag < ORTHOGONALITY_TOL:
        raise OrthogonalStates(f"|<psi2|psi1>| = {mag:.3e}, phase undefined")
    return PancharatnamReading(2.0 * mag, float(np.angle(overlap)))


def intensity(psi1, psi2):
    """Recombined intensity ||psi1 + psi2||^2 = 2 + c*cos(alpha)."""
    s = psi1 + psi2
    return float(np.vdot(s, s).real)


def interference_scan(psi1, psi2, n_phases=64):
    """Locate alpha the way an interferometer would.

    A state-independent phase shift phi is stepped through n_phases values
    in [0, 2*pi); the recombined intensity ||exp(i*phi)*psi1 + psi2||^2 is
    maximal at phi = -alpha.  The grid maximum is refined by quadratic
    interpolation of the three surrounding points (cyclically).  Returns
    the refined phi in (-pi, pi].
    """
    if n_phases < 8:
        raise ValueError(f"n_phases must be >= 8, got {n_phases}")
    if abs(np.vdot(psi2, psi1)) < ORTHOGONALITY_TOL:
        raise OrthogonalStates("interference scan is flat: states orthogonal")
    phis = TWO_PI * np.arange(n_phases) / n_phases
    intensities = np.empty(n_phases)
    for k, phi in enumerate(phis):
        shifted = np.exp(1j * phi) * psi1 + psi2
        intensities[k] = np.vdot(shifted, shifted).real
    k = int(np.argmax(intensities))
    i_minus = intensities[(k - 1) % n_phases]
    i_zero = intensities[k]
    i_plus = intensities[(k + 1) % n_phases]
    denom = i_minus - 2.0 * i_zero + i_plus
    offset = 0.0 if denom == 0.0 else 0.5 * (i_minus - i_plus) / denom
    step = TWO_PI / n_phases
    return wrap_angle(phis[k] + offset * step)


def unwrap_append(trace, reading, b1=0.0, bz=0.0, oracle_unwrapped=None):
    """Append a reading to a trace, extending the unwrapped phase.

    The first sample starts the unwrapped series at its own wrapped value;
    every later sample adds the wrapped-to-(-pi, pi] difference from the
    previous wrapped phase (shortest-branch rule), so consecutive samples
    must be close enough in parameter space that the true step stays below
    pi in magnitude.
    """
    if trace.samples:
        prev = trace.samples[-1]
        step = wrap_angle(reading.alpha_wrapped - prev.alpha_wrapped)
        unwrapped = prev.alpha_unwrapped + step
        index = prev.index + 1
    else:
        unwrapped = reading.alpha_wrapped
        index = 0
    trace.samples.append(
        TraceSample(
            index=index,
            b1=b1,
            bz=bz,
            modulus_c=reading.modulus_c,
            alpha_wrapped=reading.alpha_wrapped,
            alpha_unwrapped=unwrapped,
            oracle_unwrapped=oracle_unwrapped,
        )
    )
    return trace


def winding(trace):
    """Integer winding number of a closed-circuit trace.

    The trace must start and end at the same parameter point.  Raises
    NonQuantizedWinding when the total unwrapped change is not close to an
    integer multiple of 2*pi (undersampling or insufficient adiabaticity).
    """
    first, last = trace.samples[0], trace.samples[-1]
    if abs(first.b1 - last.b1) > 1e-9 or abs(first.bz - last.bz) > 1e-9:
        raise ValueError("trace does not cover a closed circuit")
    return winding_of_delta(trace.delta_alpha())


def winding_of_delta(delta_alpha):
    """Winding number of an accumulated phase change over a closed circuit."""
    turns = delta_alpha / TWO_PI
    w = int(np.round(turns))
    residual = abs(turns - w)
    if residual >= WINDING_RESIDUAL_TOL:
        raise NonQuantizedWinding(
            f"delta_alpha = {delta_alpha:.6f} is {residual:.3f} turns away "
            "from the nearest integer winding",
            residual=residual,
        )
    return w
