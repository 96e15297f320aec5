"""Stepping-stone model with frequency-dependent selection.

The state is kept in the spin coordinate x = 1 - 2p, in which the symmetric
case (mu = 2) is an odd equation: flipping the sign of x and of every noise
increment flips the trajectory exactly, in floating point as well.  The
proportion p is exposed as a derived view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MuUndefinedError, NumericalOverflowError, ParameterError, PreconditionError, StateCorruptionError
from .lattice import RadialKernel, Torus
from .rng import NoiseStream

__all__ = [
    "ModelTwoParams",
    "ModelTwoState",
    "SpinFieldX",
    "derive_params",
    "selection_regime",
    "selection_drift_x",
    "step_x_field",
    "step_x_field_boundary",
    "step_model_two",
    "simulate_model_two",
    "to_x",
    "from_x",
    "InteriorOccupation",
    "estimate_interior_occupation",
]


def selection_regime(s: float, mu: float) -> str:
    """Qualitative label of the selection term s p(1-p)(1-mu p)."""
    if s == 0:
        return "neutral"
    if mu > 1:
        return "heterozygote advantage" if s > 0 else "heterozygote disadvantage"
    return "directional, favours X" if s > 0 else "directional, favours Y"


@dataclass(frozen=True)
class ModelTwoParams:
    d: int
    torus_side: int
    m: RadialKernel
    s: float
    mu: float
    N: float

    def __post_init__(self):
        if not isinstance(self.m, RadialKernel):
            object.__setattr__(self, "m", RadialKernel(self.m))
        if not self.N > 0:
            raise ParameterError("population size N must be positive")
        if not (math.isfinite(self.s) and math.isfinite(self.mu)):
            raise ParameterError("s and mu must be finite")
        self.torus.check_kernel(self.m, "m")

    @property
    def torus(self) -> Torus:
        return Torus(self.d, self.torus_side)

    @property
    def regime(self) -> str:
        return selection_regime(self.s, self.mu)


def derive_params(model_one, N: float) -> ModelTwoParams:
    """Reduce Model I to Model II at a fixed local population size ``N``.

    Only the diagonal competition weights enter.  Raises MuUndefinedError
    (carrying ``s``) when the selection coefficient vanishes.
    """
    p = model_one
    if not N > 0:
        raise ParameterError("N must be positive")
    if p.m != p.m_p:
        raise PreconditionError("the reduction needs identical migration kernels for X and Y")
    a, ap = p.alpha, p.alpha_p
    cross = (ap * p.lam_p(0) - a * p.gamma(0)) * N
    s = a * p.M - ap * p.M_p + cross
    if s == 0:
        raise MuUndefinedError("s = 0, so mu is undefined", s)
    mu = (cross + (a * p.lam(0) - ap * p.gamma_p(0)) * N) / s
    return ModelTwoParams(p.d, p.torus_side, p.m, s, mu, N)


@dataclass
class SpinFieldX:
    x: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if np.any(np.abs(self.x) > 1):
            raise StateCorruptionError("x must lie in [-1, 1]")


@dataclass
class ModelTwoState:
    """Proportion field stored as x = 1 - 2p; leading axes are replicas."""

    x: np.ndarray
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if not np.all(np.abs(self.x) <= 1):
            raise StateCorruptionError("proportions must lie in [0, 1]")

    @classmethod
    def from_p(cls, p, t: float = 0.0) -> "ModelTwoState":
        p = np.asarray(p, dtype=float)
        if not np.all((p >= 0) & (p <= 1)):
            raise StateCorruptionError("proportions must lie in [0, 1]")
        return cls(1.0 - 2.0 * p, t)

    @property
    def p(self) -> np.ndarray:
        return (1.0 - self.x) / 2.0

    def copy(self) -> "ModelTwoState":
        return ModelTwoState(self.x.copy(), self.t, self.step)


def to_x(state) -> SpinFieldX:
    """x = 1 - 2p for a ModelTwoState or a raw proportion array."""
    if isinstance(state, ModelTwoState):
        return SpinFieldX(state.x.copy())
    p = np.asarray(state, dtype=float)
    return SpinFieldX(1.0 - 2.0 * p)


def from_x(field, t: float = 0.0) -> ModelTwoState:
    x = field.x if isinstance(field, SpinFieldX) else np.asarray(field, dtype=float)
    return ModelTwoState(x.copy(), t)


def selection_drift_x(x, s: float, mu: float):
    """Selection drift in x-coordinates: -(s/2)(1 - x^2)(1 - mu/2 + mu x/2).

    For mu = 2 this is (s/2)(x^3 - x) and is exactly odd in x.
    """
    return -(s / 2) * (1.0 - x * x) * ((1.0 - mu / 2) + (mu / 2) * x)


def step_x_field(x: np.ndarray, migration: np.ndarray, s: float, mu: float, N: float,
                 dt: float, dW: np.ndarray) -> np.ndarray:
    """Euler step given the migration drift; clamps into [-1, 1]."""
    xn = x + (migration + selection_drift_x(x, s, mu)) * dt - np.sqrt((1.0 - x * x) / N) * dW
    if not np.all(np.isfinite(xn)):
        raise NumericalOverflowError("non-finite proportion produced")
    return np.clip(xn, -1.0, 1.0)


def step_x_field_boundary(x: np.ndarray, neighbour_sum, m_total, s: float, mu: float, N: float,
                          dt: float, gen: np.random.Generator) -> np.ndarray:
    """One step that is exact at the boundaries.

    Each site is written as its distance u to the nearer boundary (1 - x or
    1 + x).  With the neighbours, the far-side factor of the variance and the
    selection slope frozen over the step, u is a square-root diffusion

        du = (a - kappa u) dt + sqrt(sigma2 u) dW,   a = sum_j m_ij (1 -+ x_j),

    whose transition is a scaled noncentral chi-square, drawn here as a
    Poisson mixture of gammas.  Euler steps with clipping converge very
    slowly when a boundary is reachable (small a); this step keeps the
    boundary behaviour exact and leaves an O(dt) error from the frozen
    coefficients.  ``neighbour_sum(f)`` returns sum_j m_ij f_j and
    ``m_total`` the row sums.
    """
    upper = x >= 0
    u = np.where(upper, 1.0 - x, 1.0 + x)
    inflow = np.where(upper, neighbour_sum(1.0 - x), neighbour_sum(1.0 + x))
    slope = (s / 2) * (2.0 - u) * ((1.0 - mu / 2) + (mu / 2) * x)
    kappa = m_total + np.where(upper, -slope, slope)
    sig2 = (2.0 - u) / N
    kdt = kappa * dt
    tiny = np.abs(kdt) < 1e-10
    safe = np.where(tiny, 1.0, kappa)
    scale = np.where(tiny, sig2 * dt / 4, sig2 * -np.expm1(-kdt) / (4 * safe))
    nonc = u * np.exp(-kdt) / scale
    k = gen.poisson(nonc / 2)
    un = 2 * scale * gen.gamma(2 * inflow / sig2 + k)
    xn = np.where(upper, 1.0 - un, un - 1.0)
    if not np.all(np.isfinite(xn)):
        raise NumericalOverflowError("non-finite proportion produced")
    return np.clip(xn, -1.0, 1.0)


def step_model_two(state: ModelTwoState, params: ModelTwoParams, dt: float, noise: NoiseStream,
                   mirror: bool = False, scheme: str = "euler") -> ModelTwoState:
    """One step.  ``scheme`` is 'euler' (clipped Euler-Maruyama) or 'boundary'
    (see :func:`step_x_field_boundary`); ``mirror`` negates every Euler
    noise increment."""
    if not dt > 0:
        raise ParameterError("dt must be positive")
    torus = params.torus
    x = state.x
    m_total = params.m.total(params.d)
    if scheme == "boundary":
        if mirror:
            raise ParameterError("mirrored noise is defined for the Euler scheme only")
        # the diagonal weight m(0) cancels in the drift, so drop it from both sums
        diag = params.m(0)

        def nsum(f):
            return torus.apply(params.m, f) - diag * f

        xn = step_x_field_boundary(x, nsum, m_total - diag, params.s, params.mu, params.N, dt,
                                   noise.generator(state.step))
        return ModelTwoState(xn, state.t + dt, state.step + 1)
    if scheme != "euler":
        raise ParameterError("scheme must be 'euler' or 'boundary'")
    mig = torus.apply(params.m, x) - m_total * x
    dW = math.sqrt(dt) * noise.normals(state.step, x.shape)
    if mirror:
        dW = -dW
    xn = step_x_field(x, mig, params.s, params.mu, params.N, dt, dW)
    return ModelTwoState(xn, state.t + dt, state.step + 1)


def simulate_model_two(state: ModelTwoState, params: ModelTwoParams, dt: float, steps: int,
                       noise: NoiseStream, callback=None, mirror: bool = False,
                       scheme: str = "euler") -> ModelTwoState:
    for _ in range(steps):
        state = step_model_two(state, params, dt, noise, mirror=mirror, scheme=scheme)
        if callback is not None:
            callback(state)
    return state


@dataclass(frozen=True)
class InteriorOccupation:
    somewhere: float
    somewhere_se: float
    origin: float
    origin_se: float
    replicas: int


def estimate_interior_occupation(params: ModelTwoParams, p0, epsilon: float, horizon: float,
                                 replicas: int, seed: int, dt: float = 1e-3) -> InteriorOccupation:
    """P[for all grid t <= T some site has eps < p < 1-eps] and P[eps < p_0(T) < 1-eps].

    All parameter values share the noise stream of ``seed`` (common random numbers).
    """
    if not 0 < epsilon <= 0.25:
        raise ParameterError("epsilon must lie in (0, 1/4]")
    if replicas < 1:
        raise PreconditionError("need at least one replica")
    torus = params.torus
    p0 = np.broadcast_to(np.asarray(p0, dtype=float), torus.shape)
    state = ModelTwoState.from_p(np.broadcast_to(p0, (replicas,) + torus.shape).copy())
    # interior in x-coordinates: |x| < 1 - 2 eps
    bound = 1.0 - 2.0 * epsilon
    axes = tuple(range(1, params.d + 1))

    def interior(x):
        return np.abs(x) < bound

    alive = np.any(interior(state.x), axis=axes)
    noise = NoiseStream(seed, 2)
    steps = max(1, int(round(horizon / dt)))
    for _ in range(steps):
        state = step_model_two(state, params, dt, noise)
        alive &= np.any(interior(state.x), axis=axes)
    at_origin = interior(state.x[(slice(None),) + (0,) * params.d])
    a = float(alive.mean())
    o = float(at_origin.mean())
    return InteriorOccupation(a, math.sqrt(a * (1 - a) / replicas), o,
                              math.sqrt(o * (1 - o) / replicas), replicas)
