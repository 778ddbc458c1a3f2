"""Spin operators, field-cycle Hamiltonians and arm propagation.

Conventions
-----------
Everything is expressed in units hbar = 1, omega = 1, B0 = 1, so one field
cycle lasts T = pi and the coupling mu equals the adiabaticity parameter
beta.  The two interferometer arms see counter-rotating field cycles

    B_arm(t) = (b1 + cos t,  arm * omega_sign * sin t,  bz),

and a spin J = two_j/2 evolves under

    H(t) = 2 * beta * (B_arm(t) . S),

where S are the usual angular-momentum matrices.  The factor 2 makes
two_j = 1 reduce exactly to beta * (sigma . B).

Spin states are plain complex numpy vectors of length two_j + 1 with unit
Euclidean norm; no wrapper class is used.

Propagation multiplies n_steps short-time unitaries U_k = exp(-i H(t_k) dt)
in time order.  For two_j = 1 each U_k comes from the closed-form axis-angle
expression; for higher spins the default path exploits that H(t) is always
in the su(2) algebra spanned by (Sx, Sy, Sz): the ordered 2x2 product is
computed first and then lifted to dimension two_j + 1 through the spin-J
group homomorphism, which equals the dimension-N step product exactly.
Per-step eigendecomposition and a scaled Taylor series are available as
independent alternatives.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DegenerateStart, NonHermitianInput

T_TOTAL = np.pi

SAMPLING_RULES = ("left_endpoint", "midpoint")
EXP_METHODS = ("auto", "exact_2x2", "eigendecomposition", "scaled_series")


class ArmSense(IntEnum):
    """Sign of the rotating field's y-component for the two arms."""

    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class FieldParams:
    """Dimensionless field-cycle parameters.

    b1, bz are the static field offsets in units of the rotating amplitude,
    beta is the adiabaticity parameter, two_j = 2J selects the spin, and
    omega_sign picks the sign in omega * T = +-pi.
    """

    b1: float
    bz: float
    beta: float
    two_j: int = 1
    omega_sign: int = 1

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if int(self.two_j) != self.two_j or self.two_j < 1:
            raise ValueError(f"two_j must be a positive integer, got {self.two_j}")
        if self.omega_sign not in (1, -1):
            raise ValueError(f"omega_sign must be +1 or -1, got {self.omega_sign}")
        object.__setattr__(self, "two_j", int(self.two_j))
        object.__setattr__(self, "omega_sign", int(self.omega_sign))

    def gamma(self):
        """Adiabaticity of the z-offset, gamma = bz * beta."""
        return self.bz * self.beta

    @property
    def dim(self):
        return self.two_j + 1


@dataclass(frozen=True)
class PropagationSettings:
    """Discretization of the time-ordered propagator over [0, T]."""

    n_steps: int = 20000
    sampling_rule: str = "left_endpoint"
    exp_method: str = "auto"

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.sampling_rule not in SAMPLING_RULES:
            raise ValueError(f"unknown sampling_rule {self.sampling_rule!r}")
        if self.exp_method not in EXP_METHODS:
            raise ValueError(f"unknown exp_method {self.exp_method!r}")

    @property
    def dt(self):
        return T_TOTAL / self.n_steps


def spin_matrices(two_j):
    """Angular-momentum matrices (Sx, Sy, Sz) for spin J = two_j / 2.

    Basis ordering is m = J, J-1, ..., -J, so Sz is diagonal with a
    descending spectrum, Sx and Sz are real and Sy is purely imaginary.
    """
    if int(two_j) != two_j or two_j < 1:
        raise ValueError(f"two_j must be a positive integer, got {two_j}")
    two_j = int(two_j)
    j = two_j / 2.0
    m = j - np.arange(two_j + 1)
    ladder = np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0))
    n = two_j + 1
    sp = np.zeros((n, n), dtype=complex)
    sp[np.arange(n - 1), np.arange(1, n)] = ladder
    sx = 0.5 * (sp + sp.conj().T)
    sy = -0.5j * (sp - sp.conj().T)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def _field_coefficients(params, t, arm):
    """Cartesian components of 2*beta*B_arm(t); t may be an array."""
    c = 2.0 * params.beta
    cx = c * (params.b1 + np.cos(t))
    cy = c * int(arm) * params.omega_sign * np.sin(t)
    cz = c * params.bz * np.ones_like(np.asarray(t, dtype=float))
    return cx, cy, cz


def hamiltonian_at(params, t, arm):
    """Instantaneous Hamiltonian H(t) = 2*beta*(B_arm(t) . S)."""
    if not 0.0 <= t <= T_TOTAL:
        raise ValueError(f"t must lie in [0, pi], got {t}")
    sx, sy, sz = spin_matrices(params.two_j)
    cx, cy, cz = _field_coefficients(params, float(t), arm)
    return cx * sx + cy * sy + cz * sz


def initial_state(params, branch=0):
    """Eigenstate of H(0), shared by both arms.

    The eigenvector is selected by ascending eigenvalue (branch 0 is the
    lowest) and phase-fixed so its largest-magnitude component is real
    positive.  H(0) is real symmetric, so the result is a real vector.
    Raises DegenerateStart when the t=0 field vanishes.
    """
    if not 0 <= branch <= params.two_j:
        raise ValueError(f"branch must be in [0, {params.two_j}], got {branch}")
    field = np.array([params.b1 + 1.0, 0.0, params.bz])
    norm = np.linalg.norm(field)
    if norm < 1e-12:
        raise DegenerateStart(
            f"field at t=0 vanishes for b1={params.b1}, bz={params.bz}"
        )
    # Eigenvectors of H(0) = (2*beta*norm) * (nhat . S); using the unit
    # direction keeps the selection well defined even at beta = 0.  H(0) is
    # real symmetric, so work in real arithmetic and the state comes out
    # exactly real.
    nhat = field / norm
    sx, _, sz = spin_matrices(params.two_j)
    w, vecs = np.linalg.eigh((nhat[0] * sx + nhat[2] * sz).real)
    psi = vecs[:, branch]
    k = int(np.argmax(np.abs(psi)))
    if psi[k] < 0.0:
        psi = -psi
    return psi.astype(complex)


def _check_hermitian(H):
    scale = max(1.0, float(np.max(np.abs(H))))
    dev = float(np.max(np.abs(H - H.conj().T)))
    if dev > 1e-12 * scale:
        raise NonHermitianInput(f"matrix deviates from Hermiticity by {dev:.3e}")


def step_unitary(H, dt, method="auto"):
    """Short-time propagator U = exp(-i H dt) for a Hermitian H.

    method "auto" uses the closed-form axis-angle expression in dimension 2
    and an eigendecomposition otherwise; "scaled_series" runs a
    scaling-and-squaring Taylor sum (relative accuracy ~1e-12 or better).
    """
    H = np.asarray(H, dtype=complex)
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    _check_hermitian(H)
    n = H.shape[0]
    if method == "auto":
        method = "exact_2x2" if n == 2 else "eigendecomposition"
    if method == "exact_2x2":
        if n != 2:
            raise ValueError("exact_2x2 requires a 2x2 Hamiltonian")
        return _expi_2x2_batch(H[np.newaxis], dt)[0]
    if method == "eigendecomposition":
        w, v = np.linalg.eigh(H)
        return (v * np.exp(-1j * w * dt)) @ v.conj().T
    if method == "scaled_series":
        return _expi_taylor_batch(H[np.newaxis], dt)[0]
    raise ValueError(f"unknown exp method {method!r}")


def _expi_2x2_batch(H, dt):
    """exp(-i H dt) for a stack of 2x2 Hermitian matrices, closed form."""
    a0 = 0.5 * (H[:, 0, 0] + H[:, 1, 1]).real
    vz = 0.5 * (H[:, 0, 0] - H[:, 1, 1]).real
    vx = H[:, 1, 0].real
    vy = H[:, 1, 0].imag
    norm = np.sqrt(vx * vx + vy * vy + vz * vz)
    phi = norm * dt
    with np.errstate(invalid="ignore", divide="ignore"):
        nx = np.where(norm > 0.0, vx / norm, 0.0)
        ny = np.where(norm > 0.0, vy / norm, 0.0)
        nz = np.where(norm > 0.0, vz / norm, 0.0)
    c = np.cos(phi)
    s = np.sin(phi)
    U = np.empty(H.shape, dtype=complex)
    U[:, 0, 0] = c - 1j * s * nz
    U[:, 0, 1] = -1j * s * (nx - 1j * ny)
    U[:, 1, 0] = -1j * s * (nx + 1j * ny)
    U[:, 1, 1] = c + 1j * s * nz
    U *= np.exp(-1j * a0 * dt)[:, None, None]
    return U


def _expi_taylor_batch(H, dt):
    """exp(-i H dt) for a stack of matrices via scaling and squaring.

    The Taylor order is chosen from the scaled norm so the truncation error
    stays below ~1e-16 relative; squaring restores the full step.
    """
    A = (-1j * dt) * H
    n = A.shape[-1]
    nrm = float(np.max(np.sum(np.abs(A), axis=-1)))
    k = 0
    if nrm > 0.5:
        k = int(np.ceil(np.log2(nrm / 0.5)))
        A = A / (2.0 ** k)
        nrm = 0.5
    # smallest m with nrm^(m+1)/(m+1)! below double rounding
    m, bound = 1, nrm
    while bound > 1e-17 and m < 30:
        m += 1
        bound *= nrm / m
    eye = np.broadcast_to(np.eye(n, dtype=complex), A.shape)
    U = eye + A / m
    for i in range(m - 1, 0, -1):
        U = eye + np.matmul(A, U) / i
    for _ in range(k):
        U = np.matmul(U, U)
    return U


def _ordered_product(mats):
    """Time-ordered product mats[-1] @ ... @ mats[0] via pairwise reduction."""
    while mats.shape[0] > 1:
        m = mats.shape[0]
        half = m // 2
        paired = np.matmul(mats[1 : 2 * half : 2], mats[0 : 2 * half : 2])
        mats = np.concatenate([paired, mats[-1:]], axis=0) if m % 2 else paired
    return mats[0]


def _step_times(settings):
    dt = settings.dt
    k = np.arange(settings.n_steps, dtype=float)
    if settings.sampling_rule == "midpoint":
        return (k + 0.5) * dt
    return k * dt


def _total_unitary_2x2(params, arm, settings):
    ts = _step_times(settings)
    cx, cy, cz = _field_coefficients(params, ts, arm)
    H = np.empty((settings.n_steps, 2, 2), dtype=complex)
    H[:, 0, 0] = 0.5 * cz
    H[:, 1, 1] = -0.5 * cz
    H[:, 0, 1] = 0.5 * (cx - 1j * cy)
    H[:, 1, 0] = 0.5 * (cx + 1j * cy)
    return _ordered_product(_expi_2x2_batch(H, settings.dt))


def _su2_axis_angle(U):
    """Rotation angle and axis of a 2x2 special-unitary matrix."""
    c = 0.5 * (U[0, 0] + U[1, 1]).real
    vx = -0.5 * (U[0, 1] + U[1, 0]).imag
    vy = -0.5 * (U[0, 1] - U[1, 0]).real
    vz = -0.5 * (U[0, 0] - U[1, 1]).imag
    s = np.sqrt(vx * vx + vy * vy + vz * vz)
    phi = 2.0 * np.arctan2(s, c)
    if s == 0.0:
        return phi, np.array([0.0, 0.0, 1.0])
    return phi, np.array([vx, vy, vz]) / s


def _lift_su2(U2, two_j):
    """Spin-J image of a 2x2 special-unitary matrix.

    The map is the irreducible-representation homomorphism, so the lift of
    an ordered product equals the ordered product of the lifts.
    """
    phi, axis = _su2_axis_angle(U2)
    if phi == 0.0:
        return np.eye(two_j + 1, dtype=complex)
    sx, sy, sz = spin_matrices(two_j)
    w, v = np.linalg.eigh(axis[0] * sx + axis[1] * sy + axis[2] * sz)
    return (v * np.exp(-1j * phi * w)) @ v.conj().T


def _total_unitary_dense(params, arm, settings, method):
    ts = _step_times(settings)
    sx, sy, sz = spin_matrices(params.two_j)
    cx, cy, cz = _field_coefficients(params, ts, arm)
    H = (
        cx[:, None, None] * sx
        + cy[:, None, None] * sy
        + cz[:, None, None] * sz
    )
    if method == "eigendecomposition":
        w, v = np.linalg.eigh(H)
        phases = np.exp(-1j * w * settings.dt)
        steps = np.einsum("kij,kj,klj->kil", v, phases, v.conj())
    else:
        steps = _expi_taylor_batch(H, settings.dt)
    return _ordered_product(steps)


def total_unitary(params, arm, settings=PropagationSettings()):
    """Time-ordered propagator over one cycle for the given arm."""
    method = settings.exp_method
    if method == "exact_2x2" and params.two_j != 1:
        raise ValueError("exact_2x2 is only available for two_j = 1")
    if method in ("auto", "exact_2x2"):
        U2 = _total_unitary_2x2(
            FieldParams(params.b1, params.bz, params.beta, 1, params.omega_sign),
            arm,
            settings,
        )
        if params.two_j == 1:
            return U2
        return _lift_su2(U2, params.two_j)
    return _total_unitary_dense(params, arm, settings, method)


def evolve_arm(params, arm, settings=PropagationSettings(), branch=0):
    """Propagate the starting eigenstate through one full cycle of one arm.

    Returns (U_total, psi_f) where psi_f = U_total @ initial_state(params).
    """
    psi0 = initial_state(params, branch=branch)
    U = total_unitary(params, arm, settings)
    return U, U @ psi0
