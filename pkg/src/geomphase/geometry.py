"""Solid angles of the field cycle and the monopole flux analogue.

The field cycle of the interferometer is a unit circle of center
(b1, 0, bz); the solid angle it subtends at the origin (the degeneracy)
controls the adiabatic-limit phase.  The same circle doubles as a current
loop transported around a magnetic monopole at the origin, whose
Aharonov-Bohm phase is the monopole strength times that solid angle.

A solid angle is only defined modulo 4*pi.  solid_angle returns a canonical
representative in (-2*pi, 2*pi]; trace routines unwrap consecutive values
with a shortest-branch rule of period 4*pi, which keeps the series
continuous while the loop is dragged past the degeneracy.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLoop, StringOnBoundary

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi

# Global sign relating the simulated interference phase to the solid-angle
# variation, fixed once against the simulated gamma = 20 preset circuit and
# locked by a regression test.
ORACLE_SIGN = 1.0


@dataclass(frozen=True)
class LoopGeometry:
    """Unit circle of center (b1, 0, bz), discretized with n_samples points.

    orientation +1 traverses the circle counterclockwise as seen from +z;
    -1 reverses the traversal.
    """

    b1: float
    bz: float
    n_samples: int = 4096
    orientation: int = 1

    def __post_init__(self):
        if self.n_samples < 64:
            raise ValueError(f"n_samples must be >= 64, got {self.n_samples}")
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")

    @property
    def center(self):
        return np.array([self.b1, 0.0, self.bz])

    def origin_distance(self):
        """Distance of closest approach of the circle to the origin."""
        return float(np.hypot(abs(self.b1) - 1.0, self.bz))


@dataclass(frozen=True)
class MonopoleScene:
    """Monopole of strength g = n/2 at the origin with an attached string."""

    strength_g: float
    string_direction: tuple = (0.0, 0.0, -1.0)
    string_thickness: float = 0.0

    def __post_init__(self):
        doubled = 2.0 * self.strength_g
        if abs(doubled - round(doubled)) > 1e-9 or round(doubled) == 0:
            raise ValueError(
                f"strength_g must be a nonzero half-integer, got {self.strength_g}"
            )
        if self.string_thickness < 0:
            raise ValueError("string_thickness must be >= 0")
        d = np.asarray(self.string_direction, dtype=float)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("string_direction must be a unit vector")


def _fibonacci_directions(m=128):
    k = np.arange(m)
    z = 1.0 - (2.0 * k + 1.0) / m
    phi = k * np.pi * (3.0 - np.sqrt(5.0))
    rho = np.sqrt(1.0 - z * z)
    dirs = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    # poles first so symmetric loops resolve ties deterministically
    return np.vstack([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], dirs])


_APEX_CANDIDATES = _fibonacci_directions()

_TRIG_CACHE = {}


def _unit_circle(n):
    if n not in _TRIG_CACHE:
        theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
        _TRIG_CACHE[n] = (np.cos(theta), np.sin(theta))
    return _TRIG_CACHE[n]


def _fan_sum(u, apex):
    """Signed spherical area of the closed polygon u, fanned from apex.

    Uses the tetrahedron (van Oosterom-Strackee) formula per triangle.
    Exact for the polygon as long as no edge meets the apex antipode, which
    the apex selection in solid_angle guarantees.
    """
    r2 = u
    r3 = np.roll(u, -1, axis=0)
    cross = np.empty_like(r2)
    cross[:, 0] = r2[:, 1] * r3[:, 2] - r2[:, 2] * r3[:, 1]
    cross[:, 1] = r2[:, 2] * r3[:, 0] - r2[:, 0] * r3[:, 2]
    cross[:, 2] = r2[:, 0] * r3[:, 1] - r2[:, 1] * r3[:, 0]
    triple = cross @ apex
    denom = 1.0 + r2 @ apex + r3 @ apex + np.einsum("ki,ki->k", r2, r3)
    return float(np.sum(2.0 * np.arctan2(triple, denom)))


def _canonical_window(omega):
    """Shift by multiples of 4*pi into (-2*pi, 2*pi], preferring +2*pi."""
    while omega - TWO_PI > 1e-9:
        omega -= FOUR_PI
    while omega + TWO_PI <= 1e-9:
        omega += FOUR_PI
    return omega


def solid_angle(loop):
    """Signed solid angle subtended by the loop at the origin.

    The loop points are projected onto the unit sphere and fan-triangulated
    from an apex chosen (from a fixed direction grid) to stay far from both
    the projected curve and its antipodal image; this keeps every triangle
    well conditioned even when the curve passes through a pole, which
    happens whenever |b1| = 1.  Richardson extrapolation of the polygon
    area in the sample count removes the leading discretization error, so
    doubling n_samples beyond 4096 changes the result by far less than
    1e-6.  Returns the representative in (-2*pi, 2*pi]; the value is only
    defined modulo 4*pi.
    """
    if loop.origin_distance() < 1e-9:
        raise DegenerateLoop(
            f"loop at (b1={loop.b1}, bz={loop.bz}) passes through the origin"
        )
    n = loop.n_samples
    cos_t, sin_t = _unit_circle(n)
    pts = np.empty((n, 3))
    pts[:, 0] = loop.b1 + cos_t
    pts[:, 1] = sin_t
    pts[:, 2] = loop.bz
    r = np.sqrt(np.einsum("ki,ki->k", pts, pts))
    u = pts / r[:, None]
    # apex farthest from the curve and its antipode (largest |cos| margin);
    # a subsampled curve suffices to rank the candidates
    stride = max(1, n // 256)
    alignment = np.max(np.abs(_APEX_CANDIDATES @ u[::stride].T), axis=1)
    apex = _APEX_CANDIDATES[int(np.argmin(alignment))]
    area_full = _fan_sum(u, apex)
    area_half = _fan_sum(u[::2], apex)
    area = (4.0 * area_full - area_half) / 3.0
    # reversal negates the signed area before branch selection, so the
    # orientation antisymmetry is exact away from the +-2*pi branch edge
    return _canonical_window(loop.orientation * area)


def unwrap_solid_angles(omegas):
    """Continuous branch of a sequence of solid angles (period 4*pi)."""
    omegas = np.asarray(omegas, dtype=float)
    out = np.empty_like(omegas)
    out[0] = omegas[0]
    for k in range(1, len(omegas)):
        step = omegas[k] - omegas[k - 1]
        step -= FOUR_PI * np.floor(step / FOUR_PI + 0.5)
        out[k] = out[k - 1] + step
    return out


def oracle_phase_trace(circuit_samples, two_j=1, n_samples=4096):
    """Adiabatic-limit prediction of the unwrapped interference phase.

    For each (b1, bz) the field-cycle solid angle is computed, the sequence
    is unwrapped to a continuous branch, and the phase is
    ORACLE_SIGN * two_j * (Omega - Omega_0) / 2, which starts at zero.  A
    closed circuit looping a degeneracy once accumulates -+2*pi*two_j.
    """
    omegas = [
        solid_angle(LoopGeometry(b1, bz, n_samples=n_samples))
        for b1, bz in circuit_samples
    ]
    unwrapped = unwrap_solid_angles(omegas)
    return ORACLE_SIGN * two_j * (unwrapped - unwrapped[0]) / 2.0


def ab_phase(loop, scene):
    """Aharonov-Bohm phase of the loop in the monopole field: g * Omega."""
    return scene.strength_g * solid_angle(loop)


def _string_disk_distance(b1, bz, direction):
    """Distance from the string-ray/loop-plane intersection to the loop
    center, or None when the open ray misses the plane z = bz."""
    dz = direction[2]
    if dz == 0.0 or bz / dz <= 0.0:
        return None
    t = bz / dz
    hit = t * np.asarray(direction, dtype=float)
    return float(np.hypot(hit[0] - b1, hit[1]))


def string_pierces_loop(loop, scene):
    """Whether the monopole string threads the open disk of the loop.

    The string occupies the ray t * string_direction, t > 0.  Raises
    StringOnBoundary when the ray meets the loop circle itself (within
    1e-9), where the flux jump location is ambiguous.
    """
    d = _string_disk_distance(loop.b1, loop.bz, scene.string_direction)
    if d is None:
        return False
    if abs(d - 1.0) < 1e-9:
        raise StringOnBoundary(
            f"string ray meets the loop rim at (b1={loop.b1}, bz={loop.bz})"
        )
    return d < 1.0


def monopole_transport_trace(circuit_samples, scene, n_samples=4096):
    """Accumulated interference phase while the loop is carried along a
    circuit in the monopole field.

    The geometric part is g * Omega with Omega unwrapped continuously.  An
    infinitely thin string (string_thickness = 0) contributes nothing
    observable, so a circuit looping the monopole ends at +-4*pi*g.  A
    finite-thickness string adds an observable, linearly ramped jump of
    -4*pi*g per threading across the samples where it pierces the loop,
    which restores a net zero change over any closed circuit.
    """
    g = scene.strength_g
    omegas = [
        solid_angle(LoopGeometry(b1, bz, n_samples=n_samples))
        for b1, bz in circuit_samples
    ]
    unwrapped = unwrap_solid_angles(omegas)
    phases = g * (unwrapped - unwrapped[0])
    if scene.string_thickness == 0.0:
        return phases

    pierced = np.empty(len(circuit_samples), dtype=bool)
    for k, (b1, bz) in enumerate(circuit_samples):
        d = _string_disk_distance(b1, bz, scene.string_direction)
        # rim contact is unambiguous for a finite tube: partially threaded
        pierced[k] = d is not None and d <= 1.0 + 1e-9
    # one branch transition of Omega per threading of the string; ramp the
    # compensating jump across the piercing run adjacent to each transition
    branch = np.round((unwrapped - np.asarray(omegas)) / FOUR_PI).astype(int)
    correction = np.zeros(len(phases))
    for k in np.flatnonzero(np.diff(branch)):
        jump = -g * FOUR_PI * (branch[k + 1] - branch[k])
        run = _adjacent_run(pierced, k)
        ramp = np.linspace(0.0, jump, len(run) + 1)[1:]
        correction[run[0] : run[-1] + 1] += ramp
        correction[run[-1] + 1 :] += jump
    return phases + correction


def _adjacent_run(pierced, k):
    """Indices of the contiguous pierced run touching the step k -> k+1."""
    n = len(pierced)
    if pierced[k] or pierced[k + 1]:
        start = k + 1 if not pierced[k] else k
        while start > 0 and pierced[start - 1]:
            start -= 1
        end = k if not pierced[k + 1] else k + 1
        while end + 1 < n and pierced[end + 1]:
            end += 1
        return list(range(start, end + 1))
    # no adjacent piercing samples: apply the jump across the step itself
    return [k, k + 1]
