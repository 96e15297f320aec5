"""One-dimensional comparison diffusions, Wright-Fisher steps and the
deterministic Lotka-Volterra baseline.

All square-root diffusions use full-truncation Euler-Maruyama: the diffusion
coefficient is evaluated at the clamped state and the result is clamped
again, so nonnegativity holds deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import CensoredError, DomainError, ParameterError, StateCorruptionError
from .rng import NoiseStream

__all__ = [
    "FellerSpec",
    "LotkaVolterraParams",
    "TimeGrid",
    "HittingEstimate",
    "LVTrajectory",
    "step_feller",
    "feller_drift",
    "exit_probability_supercritical",
    "exit_probability",
    "scale_function",
    "estimate_hitting_probability",
    "step_wright_fisher",
    "integrate_lotka_volterra",
]

FELLER_MODES = ("logistic", "supercritical", "immigration", "subcritical")


@dataclass(frozen=True)
class FellerSpec:
    """Parameters of the four comparison diffusions.

    ``mode`` selects the drift:

    * ``logistic``      alpha * (cap - lam * z) * z
    * ``supercritical`` D1 * z
    * ``immigration``   D2 + D1 * z
    * ``subcritical``   alpha * (cap - lam * level) * z, requires lam * level > 2 * cap
    """

    mode: str
    linear_drift: float = 0.0
    immigration: float = 0.0
    logistic_alpha: float = 0.0
    logistic_cap: float = 0.0
    logistic_lambda: float = 0.0
    subcritical_level: float | None = None

    def __post_init__(self):
        if self.mode not in FELLER_MODES:
            raise ParameterError(f"unknown Feller mode {self.mode!r}; expected one of {FELLER_MODES}")
        if self.immigration < 0 or self.logistic_alpha < 0 or self.logistic_lambda < 0:
            raise ParameterError("immigration, logistic_alpha and logistic_lambda must be nonnegative")
        if self.mode == "immigration" and not self.immigration > 0:
            raise ParameterError("immigration mode requires immigration > 0")
        if self.mode == "subcritical":
            if self.subcritical_level is None:
                raise ParameterError("subcritical mode requires subcritical_level")
            if not self.logistic_lambda * self.subcritical_level > 2 * self.logistic_cap:
                raise ParameterError("subcritical mode requires lambda * level > 2 * cap")

    @classmethod
    def supercritical(cls, d1: float) -> "FellerSpec":
        return cls("supercritical", linear_drift=d1)

    @classmethod
    def with_immigration(cls, d2: float, d1: float = 0.0) -> "FellerSpec":
        return cls("immigration", linear_drift=d1, immigration=d2)

    @classmethod
    def logistic(cls, alpha: float, cap: float, lam: float) -> "FellerSpec":
        return cls("logistic", logistic_alpha=alpha, logistic_cap=cap, logistic_lambda=lam)

    @classmethod
    def subcritical(cls, alpha: float, cap: float, lam: float, level: float) -> "FellerSpec":
        return cls("subcritical", logistic_alpha=alpha, logistic_cap=cap,
                   logistic_lambda=lam, subcritical_level=level)

    @property
    def linear_rate(self) -> float | None:
        """Growth rate when the drift is linear in z, else None."""
        if self.mode == "supercritical":
            return self.linear_drift
        if self.mode == "subcritical":
            return self.logistic_alpha * (self.logistic_cap - self.logistic_lambda * self.subcritical_level)
        return None

    def drift(self, z):
        return feller_drift(z, self)


def feller_drift(z, spec: FellerSpec):
    if spec.mode == "logistic":
        return spec.logistic_alpha * (spec.logistic_cap - spec.logistic_lambda * z) * z
    if spec.mode == "supercritical":
        return spec.linear_drift * z
    if spec.mode == "immigration":
        return spec.immigration + spec.linear_drift * z
    return spec.linear_rate * z


@dataclass(frozen=True)
class TimeGrid:
    t0: float = 0.0
    dt: float = 1e-3
    steps: int = 1000

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ParameterError("steps must be a positive integer")

    @classmethod
    def from_horizon(cls, horizon: float, dt: float = 1e-3, t0: float = 0.0) -> "TimeGrid":
        if not dt > 0:
            raise ParameterError("dt must be positive")
        return cls(t0, dt, max(1, int(round(horizon / dt))))

    @property
    def horizon(self) -> float:
        return self.dt * self.steps

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)


def step_feller(z, spec: FellerSpec, dt: float, dW):
    """One full-truncation Euler-Maruyama step of a comparison diffusion.

    Works elementwise on arrays; ``dW`` is the Brownian increment (variance
    ``dt``), not a standard normal.
    """
    if not dt > 0:
        raise ParameterError("dt must be positive")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ParameterError("Feller state must be nonnegative")
    znew = z + feller_drift(z, spec) * dt + np.sqrt(z) * dW
    znew = np.maximum(znew, 0.0)
    return float(znew) if znew.ndim == 0 else znew


def exit_probability_supercritical(d1: float, a: float, b: float, z0: float) -> float:
    """P[hit a before b] for dZ = d1 Z dt + sqrt(Z) dW started at z0.

    The scale function is (1 - exp(-2 d1 x)) / (2 d1), or x when d1 == 0.
    ``b`` may be ``inf``.  The ratio is evaluated through ``expm1`` so large
    |d1| neither overflows nor cancels.
    """
    if not (0 <= a < z0 < b):
        raise DomainError(f"need 0 <= a < z0 < b, got a={a}, z0={z0}, b={b}")
    k = 2.0 * d1
    if k == 0.0:
        return 1.0 if math.isinf(b) else (b - z0) / (b - a)
    if k > 0:
        head = math.exp(-k * (z0 - a))
        if math.isinf(b):
            return head
        return head * math.expm1(-k * (b - z0)) / math.expm1(-k * (b - a))
    if math.isinf(b):
        return 1.0
    return math.expm1(k * (b - z0)) / math.expm1(k * (b - a))


def scale_density(spec: FellerSpec) -> Callable[[float], float]:
    """Derivative of the scale function, normalised to 1 at x = 1.

    With unit diffusion coefficient z, s'(x) = exp(-2 * int_1^x drift(y)/y dy).
    """
    if spec.mode == "logistic":
        al, cap, lam = spec.logistic_alpha, spec.logistic_cap, spec.logistic_lambda
        return lambda x: math.exp(-2 * al * cap * (x - 1) + al * lam * (x * x - 1))
    if spec.mode == "immigration":
        d1, d2 = spec.linear_drift, spec.immigration
        return lambda x: x ** (-2 * d2) * math.exp(-2 * d1 * (x - 1))
    rate = spec.linear_rate
    return lambda x: math.exp(-2 * rate * (x - 1))


def scale_function(spec: FellerSpec, x: float, ref: float = 1.0) -> float:
    """Scale function s(x) - s(ref), by quadrature of the scale density."""
    dens = scale_density(spec)
    val, _ = integrate.quad(dens, ref, x, limit=200)
    return val


def exit_probability(spec: FellerSpec, a: float, b: float, z0: float) -> float:
    """P[hit a before b] for any comparison diffusion, via its scale function."""
    if not (0 <= a < z0 < b) or math.isinf(b):
        raise DomainError(f"need 0 <= a < z0 < b < inf, got a={a}, z0={z0}, b={b}")
    rate = spec.linear_rate
    if rate is not None:
        return exit_probability_supercritical(rate, a, b, z0)
    dens = scale_density(spec)
    upper, _ = integrate.quad(dens, z0, b, limit=200)
    total, _ = integrate.quad(dens, a, b, limit=200, points=[z0])
    return upper / total


@dataclass(frozen=True)
class HittingEstimate:
    estimate: float
    stderr: float
    exited: int
    replicas: int
    censored_fraction: float


def estimate_hitting_probability(spec: FellerSpec, z0: float, a: float, b: float,
                                 replicas: int, grid: TimeGrid, seed: int,
                                 chunk: int = 8192, max_censored: float = 0.01,
                                 bridge: bool = True) -> HittingEstimate:
    """Monte Carlo estimate of P[hit a before b] with a binomial standard error.

    A level counts as hit when a grid value crosses it or, with ``bridge``,
    when the Brownian bridge between two grid values (volatility frozen at
    the left end) crosses it; the bridge test removes the O(sqrt(dt)) bias of
    monitoring only at grid times.  Replicas are processed in chunks; chunk
    ``c`` draws from stream ``c`` so a given replica sees the same increments
    whatever the parameters.
    """
    if not a < z0 < b:
        raise DomainError(f"need a < z0 < b, got a={a}, z0={z0}, b={b}")
    if replicas < 100:
        raise ParameterError("at least 100 replicas are required")
    dt = grid.dt
    sq = math.sqrt(dt)
    hits_a = 0
    exited = 0
    for c, start in enumerate(range(0, replicas, chunk)):
        n = min(chunk, replicas - start)
        noise = NoiseStream(seed, c)
        z = np.full(n, float(z0))
        alive = np.ones(n, dtype=bool)
        for k in range(grid.steps):
            gen = noise.generator(k)
            dW = sq * gen.standard_normal(n)
            u = gen.random(n) if bridge else None
            idx = np.flatnonzero(alive)
            zi = z[idx]
            zn = zi + feller_drift(zi, spec) * dt + np.sqrt(zi) * dW[idx]
            np.maximum(zn, 0.0, out=zn)
            low = zn <= a
            high = zn >= b
            if bridge:
                inside = ~(low | high)
                var = zi * dt
                pa = np.where(inside, np.exp(-2.0 * (zi - a) * (zn - a) / var), 0.0)
                pb = np.where(inside, np.exp(-2.0 * (b - zi) * (b - zn) / var), 0.0)
                ui = u[idx]
                low = low | (ui < pa)
                high = high | (~low & (ui < pa + pb))
            z[idx] = zn
            hits_a += int(low.sum())
            done = low | high
            exited += int(done.sum())
            alive[idx[done]] = False
            if not alive.any():
                break
    censored = (replicas - exited) / replicas
    if censored > max_censored:
        raise CensoredError(
            f"{censored:.2%} of paths had not exited by t={grid.horizon}", censored)
    p = hits_a / exited
    return HittingEstimate(p, math.sqrt(p * (1 - p) / exited), exited, replicas, censored)


def step_wright_fisher(p, s: float, mu: float, N: float, dt: float, dW):
    """One Euler step of the single-site Wright-Fisher diffusion with selection.

    dp = s p (1-p)(1 - mu p) dt + sqrt(p (1-p) / N) dW, clamped into [0, 1].
    """
    if not N > 0:
        raise ParameterError("N must be positive")
    if not dt > 0:
        raise ParameterError("dt must be positive")
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(~np.isfinite(p)):
        raise StateCorruptionError("Wright-Fisher proportion outside [0, 1]")
    het = p * (1.0 - p)
    pnew = p + s * het * (1.0 - mu * p) * dt + np.sqrt(het / N) * dW
    pnew = np.clip(pnew, 0.0, 1.0)
    return float(pnew) if pnew.ndim == 0 else pnew


@dataclass(frozen=True)
class LotkaVolterraParams:
    r1: float
    r2: float
    K1: float
    K2: float
    alpha12: float = 0.0
    alpha21: float = 0.0

    def __post_init__(self):
        if not (self.K1 > 0 and self.K2 > 0):
            raise ParameterError("carrying capacities must be positive")
        if self.alpha12 < 0 or self.alpha21 < 0:
            raise ParameterError("competition coefficients must be nonnegative")

    def rhs(self, n):
        n1, n2 = n
        return np.array([
            self.r1 * n1 * (1 - n1 / self.K1 - self.alpha12 * n2 / self.K1),
            self.r2 * n2 * (1 - n2 / self.K2 - self.alpha21 * n1 / self.K2),
        ])

    @property
    def equilibrium(self):
        det = 1 - self.alpha12 * self.alpha21
        if det == 0:
            return None
        return ((self.K1 - self.alpha12 * self.K2) / det,
                (self.K2 - self.alpha21 * self.K1) / det)

    @property
    def coexistence(self) -> bool:
        return self.K1 > self.alpha12 * self.K2 and self.K2 > self.alpha21 * self.K1


@dataclass(frozen=True)
class LVTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (steps + 1, 2)
    equilibrium: tuple | None
    coexistence: bool


def integrate_lotka_volterra(params: LotkaVolterraParams, N0, grid: TimeGrid) -> LVTrajectory:
    """Classical fixed-step RK4 solution of the competitive Lotka-Volterra ODE."""
    y = np.asarray(N0, dtype=float)
    if y.shape != (2,) or np.any(y < 0):
        raise ParameterError("N0 must be a pair of nonnegative numbers")
    h = grid.dt
    out = np.empty((grid.steps + 1, 2))
    out[0] = y
    f = params.rhs
    for k in range(grid.steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y
    return LVTrajectory(grid.times(), out, params.equilibrium, params.coexistence)
