"""Two competing populations with local regulation on a torus.

Each site carries masses X_i, Y_i driven by independent Feller noises and
coupled through migration, intraspecific competition (lambda kernels) and
interspecific competition (gamma kernels).  The infinite lattice is replaced
by an even-sided torus whose side exceeds twice the largest kernel range.

The Euler scheme selects one solution of the system; uniqueness for the
continuum system is not known, so every statement here is about the scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, NumericalOverflowError, ParameterError, PreconditionError
from .lattice import RadialKernel, Torus
from .rng import NoiseStream

__all__ = [
    "ModelOneParams",
    "ModelOneState",
    "InitialBox",
    "ValidationReport",
    "validate_params",
    "model_one_drift",
    "step_model_one",
    "step_model_one_increments",
    "simulate_model_one",
    "sample_initial_condition",
    "proportion_drift_eq8",
    "proportion_drift_terms",
    "SurvivalEstimates",
    "estimate_survival",
]


@dataclass(frozen=True)
class ModelOneParams:
    d: int
    torus_side: int
    alpha: float
    M: float
    m: RadialKernel
    lam: RadialKernel
    gamma: RadialKernel
    alpha_p: float
    M_p: float
    m_p: RadialKernel
    lam_p: RadialKernel
    gamma_p: RadialKernel
    c: float = 1.0
    b: int = 2

    def __post_init__(self):
        for name in ("m", "lam", "gamma", "m_p", "lam_p", "gamma_p"):
            val = getattr(self, name)
            if not isinstance(val, RadialKernel):
                object.__setattr__(self, name, RadialKernel(val))
        if self.alpha < 0 or self.alpha_p < 0:
            raise ParameterError("alpha and alpha' must be nonnegative")
        if not self.c > 0:
            raise ParameterError("comparison constant c must be positive")
        if self.torus_side != 1 and self.torus_side % 2:
            raise ParameterError("torus side must be even (or 1 for a single site)")
        torus = self.torus
        for name in ("m", "lam", "gamma", "m_p", "lam_p", "gamma_p"):
            torus.check_kernel(getattr(self, name), name)

    @property
    def torus(self) -> Torus:
        return Torus(self.d, self.torus_side)

    @property
    def R(self) -> int:
        return max(k.range for k in (self.m, self.lam, self.gamma, self.m_p, self.lam_p, self.gamma_p))

    @property
    def L(self) -> int:
        return max(self.m.offdiag_range, self.m_p.offdiag_range)

    @property
    def K(self) -> float:
        return 2 * self.alpha * self.M * self.c + 1

    @property
    def K_p(self) -> float:
        return 2 * self.alpha_p * self.M_p * self.c + 1

    def swapped(self) -> "ModelOneParams":
        """Parameters with the roles of X and Y exchanged."""
        return replace(self, alpha=self.alpha_p, M=self.M_p, m=self.m_p, lam=self.lam_p,
                       gamma=self.gamma_p, alpha_p=self.alpha, M_p=self.M, m_p=self.m,
                       lam_p=self.lam, gamma_p=self.gamma)


@dataclass
class ModelOneState:
    """Fields X, Y with optional leading replica axes; spatial axes last."""

    X: np.ndarray
    Y: np.ndarray
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if self.X.shape != self.Y.shape:
            raise ParameterError("X and Y must have the same shape")
        if np.any(self.X < 0) or np.any(self.Y < 0):
            raise ParameterError("population fields must be nonnegative")

    def copy(self) -> "ModelOneState":
        return ModelOneState(self.X.copy(), self.Y.copy(), self.t, self.step)


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)
    K: float = math.nan
    K_p: float = math.nan
    N: int = 0
    L: int = 0

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())

    def failures(self) -> list:
        return [name for name, (passed, _) in self.checks.items() if not passed]

    def __str__(self):
        lines = [f"{'PASS' if ok else 'FAIL'} {name}: {msg}" for name, (ok, msg) in self.checks.items()]
        lines.append(f"K={self.K:g} K'={self.K_p:g} N={self.N} L={self.L}")
        return "\n".join(lines)


def _band_ok(m: RadialKernel, lam: RadialKernel, c: float):
    bad = []
    R = max(len(m.weights), len(lam.weights))
    for r in range(1, R):
        if m(r) != 0 and not (lam(r) / c < m(r) < c * lam(r)):
            bad.append(r)
    return bad


def _zero_coupling_ok(m: RadialKernel, lam: RadialKernel):
    R = max(len(m.weights), len(lam.weights))
    return [r for r in range(1, R) if m(r) == 0 and lam(r) != 0]


def validate_params(params: ModelOneParams) -> ValidationReport:
    """Check the standing assumptions of the coexistence theorem.

    Never raises; every assumption is reported as (passed, message).  The
    comparison band and the zero-coupling rule are applied off the diagonal
    (r >= 1), since the diagonal migration weight cancels.
    """
    p = params
    rep = ValidationReport()
    d = p.d
    checks = rep.checks

    bad = _band_ok(p.m, p.lam, p.c)
    bad_p = _band_ok(p.m_p, p.lam_p, p.c)
    checks["comparison_band"] = (
        not bad and not bad_p,
        "lambda/c < m < c*lambda wherever m != 0" if not (bad or bad_p)
        else f"violated at distances X:{bad} Y:{bad_p}",
    )

    zc = _zero_coupling_ok(p.m, p.lam)
    zc_p = _zero_coupling_ok(p.m_p, p.lam_p)
    checks["zero_coupling"] = (
        not zc and not zc_p,
        "lambda vanishes where m does" if not (zc or zc_p) else f"lambda != 0 with m == 0 at X:{zc} Y:{zc_p}",
    )

    Lm, Lmp = p.m.offdiag_range, p.m_p.offdiag_range
    L = max(Lm, Lmp)
    checks["common_range"] = (
        Lm == Lmp and Lm > 0 and L <= p.R,
        f"range(m)={Lm}, range(m')={Lmp}, R={p.R}",
    )

    sm, smp = p.m.total(d, include_diagonal=False), p.m_p.total(d, include_diagonal=False)
    checks["growth"] = (
        p.alpha * p.M > sm and p.alpha_p * p.M_p > smp,
        f"alpha*M={p.alpha * p.M:g} vs sum m={sm:g}; alpha'*M'={p.alpha_p * p.M_p:g} vs sum m'={smp:g}",
    )

    rg = max(p.gamma.range, p.gamma_p.range)
    checks["gamma_range"] = (
        rg < (p.b - 1) * L,
        f"range(gamma)={rg} must be < (b-1)L = {(p.b - 1) * L}",
    )

    checks["self_regulation"] = (
        p.lam(0) > 0 and p.lam_p(0) > 0,
        f"lambda(0)={p.lam(0):g}, lambda'(0)={p.lam_p(0):g}",
    )
    rep.K = p.K
    rep.K_p = p.K_p
    rep.N = p.b + 2
    rep.L = L
    return rep


def model_one_drift(X: np.ndarray, Y: np.ndarray, params: ModelOneParams):
    """Drift fields (migration + competition) of both populations."""
    torus = params.torus
    d = params.d
    migX = torus.apply(params.m, X) - params.m.total(d) * X
    migY = torus.apply(params.m_p, Y) - params.m_p.total(d) * Y
    compX = params.alpha * (params.M - torus.apply(params.lam, X) - torus.apply(params.gamma, Y)) * X
    compY = params.alpha_p * (params.M_p - torus.apply(params.lam_p, Y) - torus.apply(params.gamma_p, X)) * Y
    return migX + compX, migY + compY


def _check_finite(arr: np.ndarray, name: str, step: int):
    if not np.all(np.isfinite(arr)):
        site = np.unravel_index(np.flatnonzero(~np.isfinite(arr))[0], arr.shape)
        raise NumericalOverflowError(f"non-finite {name} at index {tuple(int(s) for s in site)} on step {step}")


def step_model_one_increments(state: ModelOneState, params: ModelOneParams, dt: float,
                              dB: np.ndarray, dB_p: np.ndarray) -> ModelOneState:
    """Jacobi Euler-Maruyama update with caller-supplied Brownian increments."""
    if not dt > 0:
        raise ParameterError("dt must be positive")
    X, Y = state.X, state.Y
    with np.errstate(over="ignore", invalid="ignore"):
        driftX, driftY = model_one_drift(X, Y, params)
        Xn = X + driftX * dt + np.sqrt(X) * dB
        Yn = Y + driftY * dt + np.sqrt(Y) * dB_p
    _check_finite(Xn, "X", state.step)
    _check_finite(Yn, "Y", state.step)
    np.maximum(Xn, 0.0, out=Xn)
    np.maximum(Yn, 0.0, out=Yn)
    return ModelOneState(Xn, Yn, state.t + dt, state.step + 1)


def step_model_one(state: ModelOneState, params: ModelOneParams, dt: float,
                   noise: NoiseStream) -> ModelOneState:
    """One step driven by ``noise``; block ``state.step`` of shape (2, *X.shape)."""
    z = noise.normals(state.step, (2,) + state.X.shape)
    sq = math.sqrt(dt)
    return step_model_one_increments(state, params, dt, sq * z[0], sq * z[1])


def simulate_model_one(state: ModelOneState, params: ModelOneParams, dt: float, steps: int,
                       noise: NoiseStream, callback=None, freeze_y: bool = False) -> ModelOneState:
    """Advance ``steps`` steps.  ``callback(state)`` runs after every step.

    ``freeze_y`` pins Y at its current value (used for decoupling checks).
    """
    for _ in range(steps):
        new = step_model_one(state, params, dt, noise)
        if freeze_y:
            new.Y = state.Y
        state = new
        if callback is not None:
            callback(state)
    return state


@dataclass(frozen=True)
class InitialBox:
    """Bands [k1, k2) for X and [k1', k2') for Y inside the box [-m, m]^d."""

    kappa1: float
    kappa2: float
    kappa1_p: float
    kappa2_p: float
    halfwidth: float = math.inf

    def __post_init__(self):
        for lo, hi, name in ((self.kappa1, self.kappa2, "X"), (self.kappa1_p, self.kappa2_p, "Y")):
            if not (0 <= lo < hi):
                raise ParameterError(f"{name} band [{lo}, {hi}) is empty or negative")
        if not self.halfwidth >= 0:
            raise ParameterError("box half-width must be nonnegative")


def _band_sample(rng, lo, hi, shape):
    # an unbounded band is sampled on [lo, 2*lo) (or [0, 1) when lo == 0)
    if math.isinf(hi):
        hi = 2 * lo if lo > 0 else 1.0
    return rng.uniform(lo, hi, size=shape)


def sample_initial_condition(box: InitialBox, params: ModelOneParams, seed: int,
                             replicas: int | None = None) -> ModelOneState:
    """Uniform band values inside J = [-m, m]^d, zero outside."""
    torus = params.torus
    if not math.isinf(box.halfwidth):
        width = 2 * math.floor(box.halfwidth) + 1
        if width > torus.side:
            raise DomainError(f"box of width {width} does not fit in torus side {torus.side}")
        inside = torus.norm_from_origin() <= math.floor(box.halfwidth)
    else:
        inside = np.ones(torus.shape, dtype=bool)
    shape = torus.shape if replicas is None else (replicas,) + torus.shape
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x1B0C]))
    X = _band_sample(rng, box.kappa1, box.kappa2, shape)
    Y = _band_sample(rng, box.kappa1_p, box.kappa2_p, shape)
    X = np.where(inside, X, 0.0)
    Y = np.where(inside, Y, 0.0)
    return ModelOneState(X, Y)


def proportion_drift_terms(state: ModelOneState, params: ModelOneParams, site) -> dict:
    """The drift of p_i = X_i / (X_i + Y_i), split into its groups.

    Keys: ``migration`` (N-weighted stepping-stone term), ``migration_mismatch``
    and ``migration_cross`` (the two (m - m') groups) and ``selection``
    (bracket times p_i(1 - p_i)).
    """
    X, Y = state.X, state.Y
    torus = params.torus
    idx = torus.index(site)
    N = X + Y
    Ni = N[idx]
    if not Ni > 0:
        raise DomainError(f"total population is zero at site {site}; proportion undefined")
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(N > 0, X / np.where(N > 0, N, 1.0), 0.0)
    pi = p[idx]
    het = pi * (1 - pi)
    d = params.d

    def ksum(kernel, f):
        return torus.apply(kernel, f)[idx]

    dtotal = params.m.total(d) - params.m_p.total(d)
    migration = (ksum(params.m, N * p) - pi * ksum(params.m, N)) / Ni
    mismatch = -dtotal * het
    # (m - m') may change sign with distance, so apply the two kernels separately
    cross = pi * (ksum(params.m, N * (1 - p)) - ksum(params.m_p, N * (1 - p))) / Ni
    a, ap = params.alpha, params.alpha_p
    bracket = (a * params.M - ap * params.M_p
               + ap * ksum(params.lam_p, N) - a * ksum(params.gamma, N)
               + a * ksum(params.gamma, N * p) + ap * ksum(params.gamma_p, N * p)
               - ap * ksum(params.lam_p, N * p) - a * ksum(params.lam, N * p))
    return {
        "migration": float(migration),
        "migration_mismatch": float(mismatch),
        "migration_cross": float(cross),
        "selection": float(bracket * het),
        "bracket": float(bracket),
    }


def proportion_drift_eq8(state: ModelOneState, params: ModelOneParams, site) -> float:
    """Total Ito drift of the X-proportion at ``site``."""
    t = proportion_drift_terms(state, params, site)
    return t["migration"] + t["migration_mismatch"] + t["migration_cross"] + t["selection"]


@dataclass(frozen=True)
class SurvivalEstimates:
    survival: float
    survival_se: float
    persistence: float
    persistence_se: float
    coexistence: float
    coexistence_se: float
    replicas: int


def _prop(hits: np.ndarray):
    n = hits.size
    p = float(hits.mean())
    return p, math.sqrt(p * (1 - p) / n)


def estimate_survival(params: ModelOneParams, box: InitialBox, kappa: float, horizon: float,
                      dt: float, replicas: int, seed: int,
                      initial: ModelOneState | None = None) -> SurvivalEstimates:
    """Finite-horizon proxies for survival, persistence and coexistence.

    * survival:    P[X_0(T) > kappa]
    * persistence: P[for all grid t <= T there are i, j with X_i(t), Y_j(t) > kappa]
    * coexistence: P[X_0(T) > kappa and Y_0(T) > kappa]
    """
    if replicas < 30:
        raise PreconditionError("at least 30 replicas are needed for a standard error")
    if not kappa > 0:
        raise ParameterError("kappa must be positive")
    if initial is None:
        state = sample_initial_condition(box, params, seed, replicas=replicas)
    else:
        state = initial.copy()
    d = params.d
    axes = tuple(range(1, d + 1))
    origin = (slice(None),) + (0,) * d

    def both_present(s):
        return np.any(s.X > kappa, axis=axes) & np.any(s.Y > kappa, axis=axes)

    persist = both_present(state)
    noise = NoiseStream(seed, 1)
    steps = max(1, int(round(horizon / dt)))
    for _ in range(steps):
        state = step_model_one(state, params, dt, noise)
        persist &= both_present(state)
    surv = state.X[origin] > kappa
    coex = surv & (state.Y[origin] > kappa)
    s, sse = _prop(surv)
    p, pse = _prop(persist)
    c, cse = _prop(coex)
    return SurvivalEstimates(s, sse, p, pse, c, cse, replicas)
