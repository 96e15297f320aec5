"""Block spin fields built from the two-population lattice model and the
estimators that go with them.

One spin epoch n is read off the populations at time 2n:

    zeta_i(n) = 1  iff  X_i > M/K  and  Y_j < a'M'  for all j within bL of i
    eta_i(n)  = 1  iff  Y_i > M'/K' and X_j < aM    for all j within bL of i

with K = 2 alpha M c + 1.  The proof-level "good events" are sets of noise
paths and cannot be evaluated; the estimators here measure the outcomes those
events imply (a site stays or becomes occupied, the environment stays below a
level), which is what a simulation can check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .diffusion import FellerSpec, step_feller
from .errors import ParameterError, PreconditionError, WindowError
from .lattice import RadialKernel
from .model_one import ModelOneParams, ModelOneState, step_model_one, step_model_one_increments
from .percolation import OrientedSiteField, frontier_batch, lattice_mask
from .rng import NoiseStream

__all__ = [
    "SpinParams",
    "SpinField",
    "compute_spin",
    "h_box_membership",
    "h_box_row",
    "spin_to_percolation",
    "FlipScenario",
    "FlipEstimates",
    "standard_scenarios",
    "estimate_flip_probabilities",
    "EnvironmentEstimates",
    "estimate_environment_control",
    "GoodEventBudget",
    "good_event_budget",
    "gamma_threshold",
    "DominationReport",
    "coupled_domination_check",
    "domination_refinement",
    "standard_pairings",
    "model_one_pairing_check",
    "PipelineResult",
    "spin_pipeline",
]

EPOCH_LENGTH = 2.0


@dataclass(frozen=True)
class SpinParams:
    K: float
    K_p: float
    a: float
    a_p: float
    b: int
    L: int
    N: int

    def __post_init__(self):
        if not (self.K > 0 and self.K_p > 0 and self.a > 0 and self.a_p > 0):
            raise ParameterError("K, K', a and a' must be positive")
        if self.b < 1 or self.L < 1:
            raise ParameterError("b and L must be positive integers")
        if self.N != self.b + 2:
            raise ParameterError("N must equal b + 2")

    @classmethod
    def from_model_one(cls, params: ModelOneParams, a: float, a_p: float) -> "SpinParams":
        return cls(params.K, params.K_p, a, a_p, params.b, max(params.L, 1), params.b + 2)

    def check_a_p(self) -> bool:
        """a' > 1 / K', needed for the good-event construction."""
        return self.a_p > 1.0 / self.K_p


@dataclass
class SpinField:
    zeta: np.ndarray
    eta: np.ndarray
    epoch: int


def _epoch_of(t: float) -> int:
    n = round(t / EPOCH_LENGTH)
    if not math.isclose(n * EPOCH_LENGTH, t, rel_tol=0, abs_tol=1e-9):
        raise ParameterError(f"spins are read at even times only; got t = {t}")
    return int(n)


def compute_spin(state: ModelOneState, params: ModelOneParams, spin: SpinParams,
                 check_time: bool = True) -> SpinField:
    """zeta and eta of a state taken at time 2n (leading replica axes allowed)."""
    torus = params.torus
    radius = spin.b * spin.L
    epoch = _epoch_of(state.t) if check_time else 0
    maxY = torus.box_max(state.Y, radius)
    maxX = torus.box_max(state.X, radius)
    zeta = (state.X > params.M / spin.K) & (maxY < spin.a_p * params.M_p)
    eta = (state.Y > params.M_p / spin.K_p) & (maxX < spin.a * params.M)
    return SpinField(zeta.astype(np.uint8), eta.astype(np.uint8), epoch)


def h_box_membership(spin, m: int, L: int) -> bool:
    """True iff zeta = 1 on m L e_1 + [-L/2, L/2]^d (torus wrap)."""
    zeta = spin.zeta if isinstance(spin, SpinField) else np.asarray(spin)
    return bool(h_box_row(zeta, L, [m])[..., 0])


def h_box_row(zeta: np.ndarray, L: int, ms, d: int | None = None) -> np.ndarray:
    """Membership flags for every m in ``ms``; the trailing ``d`` axes of zeta are spatial."""
    z = np.asarray(zeta).astype(bool)
    d = z.ndim if d is None else d
    # e_1 is the first spatial axis; move it last so the others are transverse
    z = np.moveaxis(z, z.ndim - d, -1)
    side = z.shape[-1]
    r = L // 2
    if 2 * r + 1 > side:
        raise WindowError("block does not fit in the torus")
    rows = np.arange(-r, r + 1) % side
    # transverse coordinates must be all ones on [-r, r]; strip those axes first
    first = z.ndim - d
    for ax in range(z.ndim - 2, first - 1, -1):
        z = z.take(rows, axis=ax).all(axis=ax)
    cols = (np.asarray(ms)[:, None] * L + np.arange(-r, r + 1)[None, :]) % side
    return z[..., cols].all(axis=-1)


def spin_to_percolation(trajectory, L: int, width: int, N: int, theta: float | None = None,
                        d: int | None = None) -> OrientedSiteField:
    """omega(m, n) = 1 iff zeta(epoch n) lies in m * H, for |m| <= width, x + n even.

    ``trajectory`` is a sequence of SpinField (epochs 0, 1, ...) of one replica.
    """
    fields = list(trajectory)
    if not fields:
        raise ParameterError("empty spin trajectory")
    for k, f in enumerate(fields):
        if f.epoch != k:
            raise ParameterError("spin trajectory must list epochs 0, 1, 2, ... in order")
    side = fields[0].zeta.shape[-1]
    if (2 * width + 1) * L > side:
        raise WindowError("percolation window wraps around the torus")
    ms = np.arange(-width, width + 1)
    bits = np.stack([h_box_row(f.zeta, L, ms, d) for f in fields]).astype(np.uint8)
    bits = bits * lattice_mask(len(fields) - 1, width)
    return OrientedSiteField(bits, width, ("dependent", int(N), theta))


# ------------------------------------------------------------ flip probabilities


@dataclass(frozen=True)
class FlipScenario:
    """Initial X and Y fields, the focal site, and the kind of flip examined."""

    X: np.ndarray
    Y: np.ndarray
    kind: str
    site: tuple

    def check(self, params: ModelOneParams, spin: SpinParams):
        idx = params.torus.index(self.site)
        thr = params.M / spin.K
        if self.kind == "nonrec":
            if not self.X[idx] > thr:
                raise PreconditionError("nonrecovery needs X above M/K at the focal site")
        elif self.kind == "infec":
            if self.X[idx] > thr:
                raise PreconditionError("infection needs X at most M/K at the focal site")
            neigh = _neighbours(params, self.site)
            if not any(self.X[j] > thr for j in neigh):
                raise PreconditionError("infection needs an occupied neighbour")
        else:
            raise ParameterError("scenario kind must be 'nonrec' or 'infec'")
        box = _box_mask(params, self.site, spin.b * spin.L)
        if np.any(self.Y[box] >= spin.a_p * params.M_p):
            raise PreconditionError("Y must start below a'M' in the bL-box")


def _neighbours(params: ModelOneParams, site):
    torus = params.torus
    out = []
    for off in torus.offsets(params.m.offdiag_range):
        r = max(map(abs, off))
        if r > 0 and params.m(r) > 0:
            out.append(torus.index(np.asarray(site) + np.asarray(off)))
    return out


def _box_mask(params: ModelOneParams, site, radius: int) -> np.ndarray:
    torus = params.torus
    mask = np.zeros(torus.shape, dtype=bool)
    for off in torus.offsets(radius):
        mask[torus.index(np.asarray(site) + np.asarray(off))] = True
    return mask


def standard_scenarios(params: ModelOneParams, spin: SpinParams, y_level: float = 0.5):
    """Default (nonrecovery, infection) scenarios at the origin.

    Nonrecovery: X = 1.5 M/K on the L/2-box.  Infection: X = 0 at the origin
    and 1.5 M/K at +e_1.  Y = y_level * a'M' everywhere.
    """
    torus = params.torus
    level = 1.5 * params.M / spin.K
    origin = (0,) * params.d
    Y = np.full(torus.shape, y_level * spin.a_p * params.M_p)
    X_non = np.where(_box_mask(params, origin, spin.L // 2), level, 0.0)
    X_inf = np.zeros(torus.shape)
    e1 = (1,) + (0,) * (params.d - 1)
    X_inf[torus.index(e1)] = level
    return (FlipScenario(X_non, Y.copy(), "nonrec", origin),
            FlipScenario(X_inf, Y.copy(), "infec", origin))


@dataclass(frozen=True)
class FlipEstimates:
    p_nonrec: float
    se_nonrec: float
    p_infec: float
    se_infec: float
    replicas: int


def _run_flip(scenario: FlipScenario, params: ModelOneParams, spin: SpinParams, replicas: int,
              seed: int, dt: float, horizon: float, stream: int) -> np.ndarray:
    scenario.check(params, spin)
    torus = params.torus
    shape = (replicas,) + torus.shape
    state = ModelOneState(np.broadcast_to(scenario.X, shape).copy(),
                          np.broadcast_to(scenario.Y, shape).copy())
    box = _box_mask(params, scenario.site, spin.b * spin.L)
    cap = np.nextafter(spin.a_p * params.M_p, 0.0)
    noise = NoiseStream(seed, stream)
    for _ in range(int(round(horizon / dt))):
        state = step_model_one(state, params, dt, noise)
        # safe environment enforced by clamping Y strictly below a'M' in the box
        Yb = state.Y[:, box]
        state.Y[:, box] = np.minimum(Yb, cap)
    idx = (slice(None),) + torus.index(scenario.site)
    return state.X[idx] > params.M / spin.K


def estimate_flip_probabilities(params: ModelOneParams, spin: SpinParams, replicas: int, seed: int,
                                scenarios=None, dt: float = 1e-3, horizon: float = 1.0) -> FlipEstimates:
    """Fractions of replicas whose focal X ends above M/K after one time unit.

    The same seed drives both scenarios and every parameter value (common
    random numbers).
    """
    if replicas < 1:
        raise PreconditionError("need at least one replica")
    non, inf = standard_scenarios(params, spin) if scenarios is None else scenarios
    hits_n = _run_flip(non, params, spin, replicas, seed, dt, horizon, 30)
    hits_i = _run_flip(inf, params, spin, replicas, seed, dt, horizon, 31)
    pn, pi = float(hits_n.mean()), float(hits_i.mean())
    return FlipEstimates(pn, math.sqrt(pn * (1 - pn) / replicas), pi,
                         math.sqrt(pi * (1 - pi) / replicas), replicas)


# ------------------------------------------------------------ environment control


@dataclass(frozen=True)
class EnvironmentEstimates:
    p_late: float
    se_late: float
    p_conditional: float
    se_conditional: float
    conditioned: int
    replicas: int


def estimate_environment_control(params: ModelOneParams, v_p: float, n: int, replicas: int, seed: int,
                                 dt: float = 1e-3, X0=None, Y0=None, site=None) -> EnvironmentEstimates:
    """Estimate P[sup_{s<=1} Y_i(n+1+s) < 2v'M'] and
    P[sup_{s<=2} Y_i(n+s) < 2v'M' | Y_i(n) <= v'M'].

    X defaults to 0 everywhere; Y defaults to M' everywhere.  Both maxima are
    taken over the time grid.
    """
    if not params.alpha_p * params.M_p > params.m_p.total(params.d, include_diagonal=False):
        raise PreconditionError("need alpha' M' > sum of m'")
    if not v_p > 0:
        raise ParameterError("v' must be positive")
    torus = params.torus
    shape = (replicas,) + torus.shape
    X = np.zeros(shape) if X0 is None else np.broadcast_to(np.asarray(X0, float), shape).copy()
    Y = np.full(shape, float(params.M_p)) if Y0 is None else np.broadcast_to(np.asarray(Y0, float), shape).copy()
    state = ModelOneState(X, Y)
    idx = (slice(None),) + torus.index((0,) * params.d if site is None else site)
    level = 2 * v_p * params.M_p
    per_unit = int(round(1.0 / dt))
    noise = NoiseStream(seed, 40)
    start_ok = None
    sup_late = np.zeros(replicas)
    sup_window = np.zeros(replicas)
    for k in range((n + 2) * per_unit + 1):
        if k > 0:
            state = step_model_one(state, params, dt, noise)
        y = state.Y[idx]
        if k == n * per_unit:
            start_ok = y <= v_p * params.M_p
        if k >= n * per_unit:
            np.maximum(sup_window, y, out=sup_window)
        if k >= (n + 1) * per_unit:
            np.maximum(sup_late, y, out=sup_late)
    late = sup_late < level
    p_late = float(late.mean())
    cond = int(start_ok.sum())
    if cond:
        pc = float((sup_window[start_ok] < level).mean())
        sc = math.sqrt(pc * (1 - pc) / cond)
    else:
        pc, sc = math.nan, math.nan
    return EnvironmentEstimates(p_late, math.sqrt(p_late * (1 - p_late) / replicas), pc, sc, cond, replicas)


# ------------------------------------------------------------ good-event budget


def gamma_threshold(a_p: float, M_p: float) -> float:
    """Total interspecific competition below which a'M'-bounded Y cannot stop X: 1/(2a'M')."""
    return 1.0 / (2.0 * a_p * M_p)


@dataclass(frozen=True)
class GoodEventBudget:
    theta: Fraction
    epsilon: Fraction
    terms: tuple
    total: Fraction
    cap: Fraction
    N: int

    def as_floats(self):
        return {"theta": float(self.theta), "epsilon": float(self.epsilon),
                "terms": tuple(float(t) for t in self.terms), "total": float(self.total),
                "cap": float(self.cap)}


def good_event_budget(theta, b: int, L: int, d: int) -> GoodEventBudget:
    """Per-event deficit epsilon = theta / (2 (4(b+2)L)^d) and the four union-bound terms.

    All arithmetic is exact (Fractions); floats are converted exactly.
    Asserts total <= 4 (2NL)^d epsilon = 2^{1-d} theta <= theta.
    """
    th = Fraction(theta)
    if not 0 < th < 1:
        raise ParameterError("theta must lie in (0, 1)")
    if b < 1 or L < 1 or d < 1:
        raise ParameterError("b, L and d must be positive integers")
    N = b + 2
    eps = th / (2 * (4 * N * L) ** d)
    terms = (
        ((2 * b + 1) * L) ** d * eps,
        L ** d * eps,
        (2 * N * L) ** d * eps,
        2 * L ** d * eps,
    )
    total = sum(terms)
    cap = 4 * (2 * N * L) ** d * eps
    assert total <= cap <= th, "good-event budget exceeds theta"
    return GoodEventBudget(th, eps, terms, total, cap, N)


# ------------------------------------------------------------ coupled domination


@dataclass(frozen=True)
class DominationReport:
    worst_violation: float
    violations_above_tol: int
    tol: float
    replicas: int
    steps: int
    stopped_fraction: float


def _drift_fn(spec):
    if isinstance(spec, FellerSpec):
        return spec.drift
    if callable(spec):
        return spec
    raise ParameterError("spec must be a FellerSpec or a drift function")


def _step(spec, z, dt, dW):
    if isinstance(spec, FellerSpec):
        return step_feller(z, spec, dt, dW)
    zn = z + spec(z) * dt + np.sqrt(z) * dW
    return np.maximum(zn, 0.0)


def _check_ordering(spec1, spec2, region, delta, zmax):
    if region == "full":
        grid = np.linspace(0.0, zmax, 4001)
    elif region == "a":
        grid = np.linspace(delta, max(zmax, 2 * delta), 4001)
    else:
        grid = np.linspace(0.0, delta, 4001)
    b1, b2 = _drift_fn(spec1)(grid), _drift_fn(spec2)(grid)
    bad = b1 > b2 + 1e-12 * (1 + np.abs(b2))
    if np.any(bad):
        z = float(grid[np.argmax(bad)])
        raise PreconditionError(f"drift ordering fails at z = {z:g}")


def _fine_normals(seed, k, replicas):
    return NoiseStream(seed, 50).normals(k, replicas)


def coupled_domination_check(spec1, spec2, z0_pair, horizon: float, dt: float, seed: int,
                             region: str = "full", delta: float | None = None, replicas: int = 1000,
                             tol_factor: float = 10.0) -> DominationReport:
    """Drive both diffusions with one Brownian path and measure max(z1 - z2, 0).

    region 'full': ordering on [0, inf), checked over the whole horizon.
    region 'a':    ordering on [delta, inf), checked until z2 first falls to delta or below.
    region 'b':    ordering on [0, delta], checked until z1 first reaches delta.
    Increments at step dt are sums of two half-step increments of a fixed
    fine stream, so runs at dt and dt/2 share one Brownian path.
    """
    if region not in ("full", "a", "b"):
        raise ParameterError("region must be 'full', 'a' or 'b'")
    if region != "full" and not (delta is not None and delta > 0):
        raise ParameterError("regions 'a' and 'b' need delta > 0")
    z1_0, z2_0 = map(float, z0_pair)
    if z1_0 > z2_0:
        raise PreconditionError("need z1(0) <= z2(0)")
    _check_ordering(spec1, spec2, region, delta, zmax=10 * max(z2_0, 1.0) + 10)
    steps = int(round(horizon / dt))
    half = math.sqrt(dt / 2)
    z1 = np.full(replicas, z1_0)
    z2 = np.full(replicas, z2_0)
    active = np.ones(replicas, dtype=bool)
    tol = tol_factor * dt
    worst = 0.0
    above = 0
    for k in range(steps):
        if region == "a":
            active &= z2 > delta
        elif region == "b":
            active &= z1 < delta
        if not active.any():
            break
        dW = half * (_fine_normals(seed, 2 * k, replicas) + _fine_normals(seed, 2 * k + 1, replicas))
        z1 = np.where(active, _step(spec1, z1, dt, dW), z1)
        z2 = np.where(active, _step(spec2, z2, dt, dW), z2)
        viol = np.where(active, z1 - z2, 0.0)
        worst = max(worst, float(viol.max()))
        above += int((viol > tol).sum())
    return DominationReport(worst, above, tol, replicas, steps, float(1 - active.mean()))


def domination_refinement(spec1, spec2, z0_pair, horizon, dt, seed, **kw):
    """Worst violations at dt and dt/2 on the same Brownian path."""
    coarse = coupled_domination_check(spec1, spec2, z0_pair, horizon, dt, seed, **kw)
    fine = _refined(spec1, spec2, z0_pair, horizon, dt / 2, seed, **kw)
    return coarse, fine


def _refined(spec1, spec2, z0_pair, horizon, dt, seed, region="full", delta=None, replicas=1000,
             tol_factor=10.0):
    # dt here is the fine step: increments are the fine stream itself
    z1_0, z2_0 = map(float, z0_pair)
    steps = int(round(horizon / dt))
    sq = math.sqrt(dt)
    z1 = np.full(replicas, z1_0)
    z2 = np.full(replicas, z2_0)
    active = np.ones(replicas, dtype=bool)
    tol = tol_factor * dt
    worst, above = 0.0, 0
    for k in range(steps):
        if region == "a":
            active &= z2 > delta
        elif region == "b":
            active &= z1 < delta
        if not active.any():
            break
        dW = sq * _fine_normals(seed, k, replicas)
        z1 = np.where(active, _step(spec1, z1, dt, dW), z1)
        z2 = np.where(active, _step(spec2, z2, dt, dW), z2)
        viol = np.where(active, z1 - z2, 0.0)
        worst = max(worst, float(viol.max()))
        above += int((viol > tol).sum())
    return DominationReport(worst, above, tol, replicas, steps, float(1 - active.mean()))


def standard_pairings():
    """(name, spec1, spec2, z0_pair, region, delta) for the comparison suite."""
    return [
        ("identical", FellerSpec.supercritical(1.0), FellerSpec.supercritical(1.0), (1.0, 1.0), "full", None),
        ("linear 1 vs 2", FellerSpec.supercritical(1.0), FellerSpec.supercritical(2.0), (1.0, 1.0), "full", None),
        ("subcritical vs supercritical", FellerSpec.subcritical(1.0, 1.0, 1.0, 3.0),
         FellerSpec.supercritical(0.5), (1.0, 1.0), "full", None),
        ("logistic vs supercritical", FellerSpec.logistic(1.0, 2.0, 1.0),
         FellerSpec.supercritical(2.0), (1.0, 1.0), "full", None),
        ("supercritical vs immigration", FellerSpec.supercritical(1.0),
         FellerSpec.with_immigration(1.0, 1.0), (0.5, 0.5), "full", None),
        ("below delta: linear vs logistic", FellerSpec.supercritical(1.0),
         FellerSpec.logistic(1.0, 3.0, 1.0), (0.5, 0.5), "b", 2.0),
        ("above delta: immigration vs linear", FellerSpec.with_immigration(1.0, 0.0),
         FellerSpec.supercritical(2.0), (1.0, 2.0), "a", 0.5),
    ]


def model_one_pairing_check(params: ModelOneParams, horizon: float, dt: float, seed: int,
                            replicas: int = 200, y0: float | None = None, site=None,
                            tol_factor: float = 10.0) -> DominationReport:
    """Y_i of the lattice model against the logistic comparison diffusion.

    Z solves dZ = alpha'(M' - sum_{j != i} m'_ij / alpha' - lambda'_ii Z) Z dt
    + sqrt(Z) dB'_i with the Brownian increments of Y_i.  The check stops on a
    replica once Y_i or Z falls to delta = max_j m'_ij / (alpha' lambda'_ij)
    (j != i, m'_ij > 0), the level above which the drift bound holds.
    """
    torus = params.torus
    d = params.d
    ap = params.alpha_p
    ratios = [params.m_p(r) / (ap * params.lam_p(r)) for r in range(1, len(params.m_p.weights))
              if params.m_p(r) > 0]
    if any(not math.isfinite(x) for x in ratios):
        raise PreconditionError("lambda' must be positive wherever m' is")
    delta = max(ratios) if ratios else 0.0
    cap = params.M_p - params.m_p.total(d, include_diagonal=False) / ap
    spec = FellerSpec.logistic(ap, cap, params.lam_p(0))
    y0 = 2 * delta + 1.0 if y0 is None else y0
    shape = (replicas,) + torus.shape
    state = ModelOneState(np.full(shape, 1.0), np.full(shape, y0))
    idx = (slice(None),) + torus.index((0,) * d if site is None else site)
    z = state.Y[idx].copy()
    active = np.ones(replicas, dtype=bool)
    noise = NoiseStream(seed, 60)
    sq = math.sqrt(dt)
    tol = tol_factor * dt
    worst, above = 0.0, 0
    steps = int(round(horizon / dt))
    for k in range(steps):
        active &= (state.Y[idx] > delta) & (z > delta)
        if not active.any():
            break
        g = noise.normals(k, (2,) + shape)
        dB, dBp = sq * g[0], sq * g[1]
        state = step_model_one_increments(state, params, dt, dB, dBp)
        z = np.where(active, step_feller(z, spec, dt, dBp[idx]), z)
        viol = np.where(active, state.Y[idx] - z, 0.0)
        worst = max(worst, float(viol.max()))
        above += int((viol > tol).sum())
    return DominationReport(worst, above, tol, replicas, steps, float(1 - active.mean()))


# ------------------------------------------------------------ end-to-end pipeline


@dataclass
class PipelineResult:
    open_origin: np.ndarray
    open_origin_se: np.ndarray
    reach_origin: np.ndarray
    reach_origin_se: np.ndarray
    fields: list = field(default_factory=list)


def spin_pipeline(params: ModelOneParams, spin: SpinParams, X0, Y0, epochs: int, width: int,
                  replicas: int, seed: int, dt: float = 1e-3) -> PipelineResult:
    """Lattice model -> spins at t = 0, 2, 4, ... -> oriented site fields.

    Reports, per epoch n, P[omega(0, n) = 1] (even n) and P[origin reachable
    at level n from W_0 = {0}].
    """
    torus = params.torus
    shape = (replicas,) + torus.shape
    state = ModelOneState(np.broadcast_to(np.asarray(X0, float), shape).copy(),
                          np.broadcast_to(np.asarray(Y0, float), shape).copy())
    if (2 * width + 1) * spin.L > torus.side:
        raise WindowError("percolation window wraps around the torus")
    per_epoch = int(round(EPOCH_LENGTH / dt))
    if not math.isclose(per_epoch * dt, EPOCH_LENGTH, rel_tol=1e-9):
        raise ParameterError("dt must divide the epoch length")
    noise = NoiseStream(seed, 70)
    ms = np.arange(-width, width + 1)
    rows = []
    for n in range(epochs + 1):
        if n > 0:
            for _ in range(per_epoch):
                state = step_model_one(state, params, dt, noise)
            state.t = n * EPOCH_LENGTH  # drop accumulated rounding; the step count is exact
        sp = compute_spin(state, params, spin)
        assert sp.epoch == n
        rows.append(h_box_row(sp.zeta, spin.L, ms, params.d))
    bits = np.stack(rows, axis=1).astype(np.uint8) * lattice_mask(epochs, width)
    fields = [OrientedSiteField(b, width, ("dependent", spin.N, None)) for b in bits]
    x = np.arange(-width, width + 1)
    open_origin = bits[:, :, width].astype(float)
    # sites beyond the window count as closed
    reach = frontier_batch(bits, width, x == 0, guard=False)
    ro = reach[:, :, width].astype(float)
    mean_o = open_origin.mean(axis=0)
    mean_r = ro.mean(axis=0)
    return PipelineResult(mean_o, np.sqrt(mean_o * (1 - mean_o) / replicas),
                          mean_r, np.sqrt(mean_r * (1 - mean_r) / replicas), fields)
