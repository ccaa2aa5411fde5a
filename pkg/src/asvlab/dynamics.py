"""3-DOF surge-sway-yaw vessel dynamics.

State is the NED pose eta = [x_n, y_n, psi] and the body-frame velocity
nu = [u, v, r].  The equations of motion are

    eta_dot = R_z(psi) nu
    M nu_dot + C(nu) nu + D(nu) nu = B f

with M the rigid-body-plus-added mass matrix, C(nu) the Coriolis/centripetal
matrix built from M in the standard skew-symmetric form, D(nu) a linear
damping matrix with an optional diagonal quadratic term, B the 3x2 actuator
configuration matrix, and f = [T_u, T_r] the surge force / yaw moment pair.

Heave, pitch and roll are dropped (calm-sea surface vessel) and there are no
environmental disturbances.  All functions here are pure; ShipModel and
SimConfig are immutable after load.
"""

import json
from dataclasses import dataclass, field

import numpy as np


class ShipModelError(ValueError):
    """Raised when a ship model file is missing, malformed, or unphysical."""


def wrap_angle(a):
    """Wrap angle(s) to (-pi, pi]."""
    w = np.mod(np.asarray(a) + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return float(w) if np.isscalar(a) or np.ndim(a) == 0 else w


@dataclass
class VesselState:
    """Pose eta = [x_n, y_n, psi] (m, m, rad) and velocity nu = [u, v, r]."""

    eta: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float).copy()
        self.nu = np.asarray(self.nu, dtype=float).copy()
        if self.eta.shape != (3,) or self.nu.shape != (3,):
            raise ValueError("VesselState needs 3-vectors eta and nu")
        if not (np.all(np.isfinite(self.eta)) and np.all(np.isfinite(self.nu))):
            raise ValueError("non-finite vessel state")
        self.eta[2] = wrap_angle(self.eta[2])

    @property
    def position(self):
        return self.eta[:2]

    @property
    def psi(self):
        return float(self.eta[2])


@dataclass(frozen=True)
class ControlInput:
    """Surge force T_u (N) and yaw moment T_r (N*m)."""

    T_u: float
    T_r: float

    def as_array(self):
        return np.array([self.T_u, self.T_r])


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1
    integrator: str = "rk4"  # or "semi-implicit-euler"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.integrator not in ("rk4", "semi-implicit-euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


@dataclass(frozen=True)
class ShipModel:
    """Immutable coefficient set loaded from a JSON model file."""

    name: str
    M: np.ndarray
    D_lin: np.ndarray
    D_quad: np.ndarray  # diagonal quadratic damping coefficients, may be zeros
    B: np.ndarray
    T_u_max: float
    T_r_max: float
    hull_radius: float
    u_max: float
    M_inv: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "M_inv", np.linalg.inv(self.M))

    def coriolis(self, nu):
        """C(nu) from M; skew-symmetric, so nu' C(nu) nu = 0 identically."""
        u, v, r = nu
        m11 = self.M[0, 0]
        m22 = self.M[1, 1]
        m23 = 0.5 * (self.M[1, 2] + self.M[2, 1])
        c13 = -(m22 * v + m23 * r)
        c23 = m11 * u
        return np.array([[0.0, 0.0, c13], [0.0, 0.0, c23], [-c13, -c23, 0.0]])

    def damping(self, nu):
        """D(nu) = D_lin + diag(D_quad |nu|)."""
        return self.D_lin + np.diag(self.D_quad * np.abs(nu))

    def clamp_control(self, f):
        return ControlInput(
            float(np.clip(f.T_u, -self.T_u_max, self.T_u_max)),
            float(np.clip(f.T_r, -self.T_r_max, self.T_r_max)),
        )


def rotation_matrix(psi):
    """Rotation about the z-axis mapping body velocities into the NED frame."""
    c, s = np.cos(psi), np.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def derivatives(state, f, model):
    """Right-hand side of the equations of motion.

    Returns (eta_dot, nu_dot) with
    eta_dot = R_z(psi) nu and nu_dot = M^-1 (B f - C(nu) nu - D(nu) nu).
    """
    nu = state.nu
    eta_dot = rotation_matrix(state.eta[2]) @ nu
    tau = model.B @ f.as_array()
    nu_dot = model.M_inv @ (tau - model.coriolis(nu) @ nu - model.damping(nu) @ nu)
    return eta_dot, nu_dot


def _rhs(eta, nu, f, model):
    c, s = np.cos(eta[2]), np.sin(eta[2])
    eta_dot = np.array([c * nu[0] - s * nu[1], s * nu[0] + c * nu[1], nu[2]])
    tau = model.B @ f
    nu_dot = model.M_inv @ (tau - model.coriolis(nu) @ nu - model.damping(nu) @ nu)
    return eta_dot, nu_dot


def step(state, f, model, cfg):
    """Advance the state by one timestep; psi is re-wrapped afterwards.

    The control is clamped to the actuator limits before integration.
    Deterministic: identical inputs give bit-identical outputs.
    """
    f = model.clamp_control(f)
    fa = f.as_array()
    eta, nu = state.eta, state.nu
    h = cfg.dt

    if cfg.integrator == "rk4":
        k1e, k1n = _rhs(eta, nu, fa, model)
        k2e, k2n = _rhs(eta + 0.5 * h * k1e, nu + 0.5 * h * k1n, fa, model)
        k3e, k3n = _rhs(eta + 0.5 * h * k2e, nu + 0.5 * h * k2n, fa, model)
        k4e, k4n = _rhs(eta + h * k3e, nu + h * k3n, fa, model)
        eta_next = eta + (h / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
        nu_next = nu + (h / 6.0) * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
    else:  # semi-implicit Euler: update velocity first, then pose with new nu
        _, nu_dot = _rhs(eta, nu, fa, model)
        nu_next = nu + h * nu_dot
        c, s = np.cos(eta[2]), np.sin(eta[2])
        eta_dot = np.array([c * nu_next[0] - s * nu_next[1], s * nu_next[0] + c * nu_next[1], nu_next[2]])
        eta_next = eta + h * eta_dot

    if not (np.all(np.isfinite(eta_next)) and np.all(np.isfinite(nu_next))):
        raise FloatingPointError("dynamics produced a non-finite state")
    return VesselState(eta_next, nu_next)


def kinetic_energy(state, model):
    return 0.5 * state.nu @ model.M @ state.nu


def steady_surge_speed(model):
    """Steady-state surge speed under full forward thrust, v = r = 0.

    Solves d_lin u + d_quad u^2 = B[0,0] T_u_max for the positive root.
    """
    thrust = model.B[0, 0] * model.T_u_max
    d1 = model.D_lin[0, 0]
    d2 = model.D_quad[0]
    if d2 > 0:
        return (-d1 + np.sqrt(d1 * d1 + 4.0 * d2 * thrust)) / (2.0 * d2)
    if d1 <= 0:
        raise ShipModelError("surge damping must be positive to define u_max")
    return thrust / d1


def _as_matrix(obj, key, shape):
    try:
        m = np.asarray(obj[key], dtype=float)
    except KeyError:
        raise ShipModelError(f"ship model missing field {key!r}") from None
    if m.shape != shape:
        raise ShipModelError(f"field {key!r} must have shape {shape}, got {m.shape}")
    return m


def load_ship_model(path=None):
    """Load and validate a ship model JSON file; default is CyberShip-II-like.

    Validation failures (singular or asymmetric M, non-dissipative D_lin,
    bad shapes) raise ShipModelError here, never at simulation time.
    """
    if path is None:
        path = _default_model_path()
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ShipModelError(f"cannot read ship model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ShipModelError(f"ship model file {path} is not valid JSON: {exc}") from exc

    M = _as_matrix(raw, "M", (3, 3))
    D_lin = _as_matrix(raw, "D_lin", (3, 3))
    B = _as_matrix(raw, "B", (3, 2))
    D_quad = np.asarray(raw.get("D_quad", [0.0, 0.0, 0.0]), dtype=float)
    if D_quad.shape != (3,):
        raise ShipModelError("D_quad must be a 3-vector of diagonal coefficients")

    if not np.allclose(M, M.T, atol=1e-9):
        raise ShipModelError("mass matrix M must be symmetric")
    eigvals = np.linalg.eigvalsh(M)
    if np.any(eigvals <= 0):
        raise ShipModelError("mass matrix M must be positive definite")
    d_sym = 0.5 * (D_lin + D_lin.T)
    if np.any(np.linalg.eigvalsh(d_sym) < -1e-9):
        raise ShipModelError("linear damping must be dissipative (D_lin + D_lin' >= 0)")
    if np.any(D_quad < 0):
        raise ShipModelError("quadratic damping coefficients must be non-negative")

    model = ShipModel(
        name=str(raw.get("name", "unnamed")),
        M=M,
        D_lin=D_lin,
        D_quad=D_quad,
        B=B,
        T_u_max=float(raw["T_u_max"]),
        T_r_max=float(raw["T_r_max"]),
        hull_radius=float(raw.get("hull_radius", 5.0)),
        u_max=0.0,
    )
    if model.T_u_max <= 0 or model.T_r_max <= 0 or model.hull_radius <= 0:
        raise ShipModelError("actuator limits and hull radius must be positive")
    u_max = float(raw["u_max"]) if "u_max" in raw else steady_surge_speed(model)
    object.__setattr__(model, "u_max", u_max)
    return model


def _default_model_path():
    from importlib.resources import files

    return files("asvlab").joinpath("ship_models/cybership2_like.json")
