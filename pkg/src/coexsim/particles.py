"""Exact event-driven simulation of two lattice particle systems.

* Branching annihilating random walk (BARW): particles jump i -> j at rate
  m_ij, split into three at rate s, and pairs at one site annihilate at rate
  ``annihilation_scale`` (1 in the standard model).  Total parity is invariant.
* Neuhauser-Pacala competition model: a two-type spin system whose flip rates
  depend on the local type fractions f_1, f_2.

Both have a pure Python reference step (``barw_step``, ``np_step``) and a
compiled Gillespie engine for replica batches.  The compiled engines keep all
rate bookkeeping in integers (particle counts, pair counts, class sizes), so
the total rate at each event is recomputed exactly rather than accumulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import ndimage

from .errors import DomainError, ParameterError, PreconditionError
from .lattice import RadialKernel, Torus
from .rng import replica_seeds

__all__ = [
    "BarwMigration",
    "BarwParams",
    "BarwState",
    "BarwEvent",
    "BarwRun",
    "barw_rates",
    "barw_step",
    "barw_simulate",
    "barw_survival",
    "parity",
    "NPParams",
    "NPState",
    "NPEvent",
    "np_neighborhood_size",
    "np_rate_table",
    "np_rates",
    "np_step",
    "np_simulate",
    "np_exclusion_boundaries",
    "np_coexistence_sweep",
    "KIND_MIGRATION",
    "KIND_BRANCHING",
    "KIND_ANNIHILATION",
]

KIND_MIGRATION = 0
KIND_BRANCHING = 1
KIND_ANNIHILATION = 2
_KIND_NAMES = {KIND_MIGRATION: "migration", KIND_BRANCHING: "branching", KIND_ANNIHILATION: "annihilation"}


# --------------------------------------------------------------------------- BARW


@dataclass(frozen=True)
class BarwMigration:
    """Sparse migration rows: particle at site i jumps to targets[i, k] at rate weights[i, k].

    Every row must have the same total rate; the diagonal is ignored.
    """

    targets: np.ndarray
    weights: np.ndarray
    shape: tuple

    def __post_init__(self):
        t = np.ascontiguousarray(self.targets, dtype=np.int64)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if t.shape != w.shape or t.ndim != 2:
            raise ParameterError("targets and weights must be matching 2-d arrays")
        if np.any(w < 0):
            raise ParameterError("migration rates must be nonnegative")
        rows = w.sum(axis=1)
        if rows.size and not np.allclose(rows, rows[0], rtol=1e-12, atol=0):
            raise ParameterError("every site must have the same total migration rate")
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "shape", tuple(self.shape))

    @property
    def n_sites(self) -> int:
        return self.targets.shape[0]

    @property
    def rowsum(self) -> float:
        return float(self.weights[0].sum()) if self.weights.size else 0.0

    @classmethod
    def from_kernel(cls, torus: Torus, kernel: RadialKernel) -> "BarwMigration":
        if torus.side > 1 and 2 * kernel.range + 1 > torus.side:
            raise DomainError("kernel wraps onto itself on this torus")
        if kernel.offdiag_range == 0:
            return cls(np.zeros((torus.n_sites, 0), np.int64), np.zeros((torus.n_sites, 0)), torus.shape)
        targets, w = torus.neighbor_table(kernel)
        return cls(targets, np.broadcast_to(w, targets.shape), torus.shape)

    @classmethod
    def from_matrix(cls, mat) -> "BarwMigration":
        mat = np.array(mat, dtype=float)
        n = mat.shape[0]
        if mat.shape != (n, n):
            raise ParameterError("migration matrix must be square")
        np.fill_diagonal(mat, 0.0)
        width = max(1, int((mat > 0).sum(axis=1).max())) if n else 1
        targets = np.zeros((n, width), np.int64)
        weights = np.zeros((n, width))
        for i in range(n):
            nz = np.flatnonzero(mat[i] > 0)
            targets[i, :nz.size] = nz
            weights[i, :nz.size] = mat[i, nz]
            targets[i, nz.size:] = i
        return cls(targets, weights, (n,))

    def matrix(self) -> np.ndarray:
        n = self.n_sites
        mat = np.zeros((n, n))
        for k in range(self.targets.shape[1]):
            np.add.at(mat, (np.arange(n), self.targets[:, k]), self.weights[:, k])
        np.fill_diagonal(mat, 0.0)
        return mat


@dataclass(frozen=True)
class BarwParams:
    s: float
    migration: BarwMigration
    annihilation_scale: float = 1.0

    def __post_init__(self):
        if not self.s >= 0:
            raise ParameterError("branching rate must be nonnegative")
        if not self.annihilation_scale > 0:
            raise ParameterError("annihilation scale must be positive")

    @classmethod
    def on_torus(cls, s: float, torus: Torus, kernel: RadialKernel, annihilation_scale: float = 1.0):
        return cls(s, BarwMigration.from_kernel(torus, kernel), annihilation_scale)


@dataclass
class BarwState:
    counts: np.ndarray
    params: BarwParams
    t: float = 0.0

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        if self.counts.size != self.params.migration.n_sites:
            raise ParameterError("counts do not match the number of sites")
        if np.any(self.counts < 0):
            raise ParameterError("particle counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class BarwEvent:
    kind: str
    site: int
    target: int = -1


def parity(state) -> str:
    """'even' or 'odd' parity of the total particle count."""
    counts = state.counts if isinstance(state, BarwState) else np.asarray(state)
    return "odd" if int(np.sum(counts)) % 2 else "even"


def barw_rates(state: BarwState) -> dict:
    """Per-event rate arrays of the current configuration."""
    n = state.counts.astype(float)
    mig = state.params.migration
    return {
        "migration": n[:, None] * mig.weights,
        "branching": state.params.s * n,
        "annihilation": state.params.annihilation_scale * 0.5 * n * (n - 1),
    }


def barw_step(state: BarwState, rng: np.random.Generator):
    """Sample the next event; returns (new_state, event or 'extinct', waiting time)."""
    if state.total == 0:
        return state, "extinct", math.inf
    rates = barw_rates(state)
    flat = np.concatenate([rates["migration"].ravel(), rates["branching"], rates["annihilation"]])
    total = flat.sum()
    n = state.counts
    expected = (n.sum() * state.params.migration.rowsum + state.params.s * n.sum()
                + state.params.annihilation_scale * 0.5 * float((n * (n - 1)).sum()))
    assert math.isclose(total, expected, rel_tol=1e-12), "rate bookkeeping mismatch"
    wait = rng.exponential(1.0 / total)
    k = int(np.searchsorted(np.cumsum(flat), rng.random() * total, side="right"))
    k = min(k, flat.size - 1)
    counts = n.copy()
    mig = state.params.migration
    n_mig = rates["migration"].size
    S = counts.size
    if k < n_mig:
        i, col = divmod(k, mig.targets.shape[1])
        j = int(mig.targets[i, col])
        counts[i] -= 1
        counts[j] += 1
        event = BarwEvent("migration", i, j)
    elif k < n_mig + S:
        i = k - n_mig
        counts[i] += 2
        event = BarwEvent("branching", i)
    else:
        i = k - n_mig - S
        counts[i] -= 2
        event = BarwEvent("annihilation", i)
    return BarwState(counts, state.params, state.t + wait), event, wait


@numba.njit(cache=True)
def _fen_add(tree, i, delta):
    i += 1
    n = tree.shape[0] - 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@numba.njit(cache=True)
def _fen_build(tree, values):
    tree[:] = 0
    for i in range(values.shape[0]):
        _fen_add(tree, i, values[i])


@numba.njit(cache=True)
def _fen_find(tree, k):
    """Smallest index i with prefix sum (through i) > k."""
    n = tree.shape[0] - 1
    pos = 0
    step = 1
    while step * 2 <= n:
        step *= 2
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] <= k:
            pos = nxt
            k -= tree[nxt]
        step //= 2
    return pos


@numba.njit(cache=True)
def _barw_one(counts, targets, weights, rowsum, s, scale, horizon, seed,
              log_t, log_site, log_kind, log_total, check):
    np.random.seed(seed)
    S = counts.shape[0]
    K = targets.shape[1]
    fen_n = np.zeros(S + 1, np.int64)
    fen_p = np.zeros(S + 1, np.int64)
    pairs = np.empty(S, np.int64)
    for i in range(S):
        pairs[i] = counts[i] * (counts[i] - 1) // 2
    _fen_build(fen_n, counts)
    _fen_build(fen_p, pairs)
    ntot = counts.sum()
    ptot = pairs.sum()
    t = 0.0
    events = 0
    mismatches = 0
    cap = log_t.shape[0]
    while True:
        rm = ntot * rowsum
        rb = s * ntot
        ra = scale * ptot
        rate = rm + rb + ra
        if rate <= 0.0:
            break
        t += -math.log(1.0 - np.random.random()) / rate
        if t > horizon:
            break
        u = np.random.random() * rate
        if u < rm + rb:
            k = min(np.int64(np.random.random() * ntot), ntot - 1)
            i = _fen_find(fen_n, k)
            if u < rm:
                v = np.random.random() * rowsum
                acc = 0.0
                j = -1
                for c in range(K):
                    if weights[i, c] > 0:
                        j = targets[i, c]
                        acc += weights[i, c]
                        if v < acc:
                            break
                ni = counts[i]
                nj = counts[j]
                counts[i] = ni - 1
                counts[j] = nj + 1
                _fen_add(fen_n, i, -1)
                _fen_add(fen_n, j, 1)
                _fen_add(fen_p, i, -(ni - 1))
                _fen_add(fen_p, j, nj)
                ptot += nj - (ni - 1)
                kind = 0
            else:
                ni = counts[i]
                counts[i] = ni + 2
                _fen_add(fen_n, i, 2)
                _fen_add(fen_p, i, 2 * ni + 1)
                ntot += 2
                ptot += 2 * ni + 1
                kind = 1
        else:
            k = min(np.int64(np.random.random() * ptot), ptot - 1)
            i = _fen_find(fen_p, k)
            ni = counts[i]
            counts[i] = ni - 2
            _fen_add(fen_n, i, -2)
            _fen_add(fen_p, i, -(2 * ni - 3))
            ntot -= 2
            ptot -= 2 * ni - 3
            kind = 2
        if check:
            sn = 0
            sp = 0
            for q in range(S):
                sn += counts[q]
                sp += counts[q] * (counts[q] - 1) // 2
            if sn != ntot or sp != ptot:
                mismatches += 1
        if events < cap:
            log_t[events] = t
            log_site[events] = i
            log_kind[events] = kind
            log_total[events] = ntot
        events += 1
    return events, mismatches


@numba.njit(cache=True)
def _barw_batch(counts, targets, weights, rowsum, s, scale, horizon, seeds,
                log_t, log_site, log_kind, log_total, check):
    R = counts.shape[0]
    events = np.zeros(R, np.int64)
    mism = 0
    empty_t = np.zeros(0)
    empty_i = np.zeros(0, np.int64)
    empty_k = np.zeros(0, np.int8)
    for r in range(R):
        if r == 0:
            e, m = _barw_one(counts[r], targets, weights, rowsum, s, scale, horizon, seeds[r],
                             log_t, log_site, log_kind, log_total, check)
        else:
            e, m = _barw_one(counts[r], targets, weights, rowsum, s, scale, horizon, seeds[r],
                             empty_t, empty_i, empty_k, empty_i, check)
        events[r] = e
        mism += m
    return events, mism


@dataclass
class BarwRun:
    """Final counts per replica and the event log of replica 0."""

    counts: np.ndarray
    events: np.ndarray
    rate_mismatches: int
    log_time: np.ndarray = field(default_factory=lambda: np.zeros(0))
    log_site: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    log_kind: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int8))
    log_total: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def event_log(self):
        """Rows (time, site, kind name, total after event) of replica 0."""
        return [(float(t), int(i), _KIND_NAMES[int(k)], int(n))
                for t, i, k, n in zip(self.log_time, self.log_site, self.log_kind, self.log_total)]


def barw_simulate(params: BarwParams, counts0, horizon: float, replicas: int, seed: int,
                  log_capacity: int = 0, check: bool = False, stream_id: int = 0) -> BarwRun:
    """Run ``replicas`` independent copies up to ``horizon``.

    Replica r uses seed ``replica_seeds(seed, ...)[r]``, so its path does not
    depend on the batch size.  ``check`` recomputes the integer rate totals
    from scratch after every event and counts disagreements.
    """
    if replicas < 1:
        raise PreconditionError("need at least one replica")
    if not horizon >= 0:
        raise ParameterError("horizon must be nonnegative")
    c0 = np.asarray(counts0, dtype=np.int64).reshape(-1)
    mig = params.migration
    if c0.size != mig.n_sites:
        raise ParameterError("initial counts do not match the number of sites")
    if np.any(c0 < 0):
        raise ParameterError("particle counts must be nonnegative")
    counts = np.tile(c0, (replicas, 1))
    seeds = replica_seeds(seed, replicas, stream_id)
    log_t = np.zeros(log_capacity)
    log_site = np.zeros(log_capacity, np.int64)
    log_kind = np.zeros(log_capacity, np.int8)
    log_total = np.zeros(log_capacity, np.int64)
    targets = mig.targets if mig.targets.shape[1] else np.zeros((mig.n_sites, 1), np.int64)
    weights = mig.weights if mig.weights.shape[1] else np.zeros((mig.n_sites, 1))
    events, mism = _barw_batch(counts, targets, weights, mig.rowsum, float(params.s),
                               float(params.annihilation_scale), float(horizon), seeds.astype(np.int64),
                               log_t, log_site, log_kind, log_total, check)
    n_log = min(int(events[0]), log_capacity)
    return BarwRun(counts, events, int(mism), log_t[:n_log], log_site[:n_log],
                   log_kind[:n_log], log_total[:n_log])


def barw_survival(params: BarwParams, counts0, horizon: float, replicas: int, seed: int,
                  require_even: bool = True):
    """Fraction of replicas with particles left at ``horizon`` and its standard error."""
    c0 = np.asarray(counts0, dtype=np.int64)
    if require_even and int(c0.sum()) % 2:
        raise PreconditionError("initial total must be even for the survival experiment")
    if int(c0.sum()) == 0:
        return 0.0, 0.0
    run = barw_simulate(params, c0, horizon, replicas, seed)
    alive = run.totals > 0
    p = float(alive.mean())
    return p, math.sqrt(p * (1 - p) / replicas)


# ---------------------------------------------------------------- Neuhauser-Pacala


def np_neighborhood_size(d: int, radius: int) -> int:
    return (2 * radius + 1) ** d - 1


@dataclass(frozen=True)
class NPParams:
    d: int
    side: int
    lam: float = 1.0
    alpha12: float = 0.0
    alpha21: float = 0.0
    radius: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("fecundity ratio lambda must be positive")
        if self.alpha12 < 0 or self.alpha21 < 0:
            raise ParameterError("competition coefficients must be nonnegative")
        if self.radius < 1:
            raise ParameterError("neighborhood radius must be >= 1")
        if self.side < 2 * self.radius + 1:
            raise DomainError("torus too small: neighborhoods would overlap themselves")

    @property
    def torus(self) -> Torus:
        return Torus(self.d, self.side)

    @property
    def n(self) -> int:
        return np_neighborhood_size(self.d, self.radius)


@dataclass
class NPState:
    types: np.ndarray
    params: NPParams
    t: float = 0.0

    def __post_init__(self):
        self.types = np.asarray(self.types, dtype=np.int8)
        if self.types.shape != self.params.torus.shape:
            raise ParameterError("type field does not match the torus")
        if not np.all((self.types == 1) | (self.types == 2)):
            raise ParameterError("every site must have type 1 or 2")

    @property
    def density(self) -> float:
        """Fraction of sites of type 1."""
        return float(np.mean(self.types == 1))


@dataclass(frozen=True)
class NPEvent:
    site: tuple
    new_type: int


def np_rate_table(params: NPParams) -> np.ndarray:
    """rates[type - 1, k] with k the number of type-1 neighbours."""
    n = params.n
    k = np.arange(n + 1)
    f1 = k / n
    f2 = 1.0 - f1
    lam = params.lam
    denom = lam * f2 + f1  # never zero: f1 + f2 = 1 and lam > 0
    r12 = lam * f2 / denom * (f1 + params.alpha12 * f2)
    r21 = f1 / denom * (f2 + params.alpha21 * f1)
    return np.vstack([r12, r21])


def _type1_neighbours(types: np.ndarray, params: NPParams) -> np.ndarray:
    box = np.ones((2 * params.radius + 1,) * params.d)
    box[(params.radius,) * params.d] = 0.0
    ind = (types == 1).astype(float)
    return np.rint(ndimage.correlate(ind, box, mode="wrap")).astype(np.int64)


def np_rates(state: NPState) -> np.ndarray:
    """Flip rate of every site."""
    table = np_rate_table(state.params)
    k1 = _type1_neighbours(state.types, state.params)
    return table[state.types - 1, k1]


def np_step(state: NPState, rng: np.random.Generator):
    """Sample the next flip; returns (new_state, event or 'absorbed', waiting time)."""
    rates = np_rates(state)
    total = float(rates.sum())
    if total <= 0:
        return state, "absorbed", math.inf
    wait = rng.exponential(1.0 / total)
    flat = rates.ravel()
    k = min(int(np.searchsorted(np.cumsum(flat), rng.random() * total, side="right")), flat.size - 1)
    site = np.unravel_index(k, rates.shape)
    types = state.types.copy()
    types[site] = 3 - types[site]
    return NPState(types, state.params, state.t + wait), NPEvent(tuple(int(v) for v in site), int(types[site])), wait


@numba.njit(cache=True)
def _np_one(types, nbrs, table, horizon, checkpoints, dens_out, seed):
    np.random.seed(seed)
    S = types.shape[0]
    n = nbrs.shape[1]
    ncls = 2 * (n + 1)
    k1 = np.zeros(S, np.int64)
    for i in range(S):
        c = 0
        for q in range(n):
            if types[nbrs[i, q]] == 1:
                c += 1
        k1[i] = c
    members = np.empty((ncls, S), np.int64)
    size = np.zeros(ncls, np.int64)
    pos = np.empty(S, np.int64)
    cls = np.empty(S, np.int64)
    ones = 0
    for i in range(S):
        c = (types[i] - 1) * (n + 1) + k1[i]
        cls[i] = c
        pos[i] = size[c]
        members[c, size[c]] = i
        size[c] += 1
        if types[i] == 1:
            ones += 1
    rates = np.empty(ncls)
    for c in range(ncls):
        rates[c] = table[c // (n + 1), c % (n + 1)]
    t = 0.0
    nxt = 0
    nchk = checkpoints.shape[0]
    events = 0
    while True:
        total = 0.0
        for c in range(ncls):
            total += size[c] * rates[c]
        if total <= 0.0:
            t = math.inf
        else:
            t += -math.log(1.0 - np.random.random()) / total
        while nxt < nchk and checkpoints[nxt] < t:
            dens_out[nxt] = ones / S
            nxt += 1
        if t > horizon:
            break
        u = np.random.random() * total
        acc = 0.0
        pick = -1
        for c in range(ncls):
            w = size[c] * rates[c]
            if w > 0.0:
                pick = c
                acc += w
                if u < acc:
                    break
        idx = min(np.int64(np.random.random() * size[pick]), size[pick] - 1)
        i = members[pick, idx]
        # flip site i and move it and its neighbours between classes
        old = types[i]
        types[i] = 3 - old
        if old == 1:
            ones -= 1
            dk = -1
        else:
            ones += 1
            dk = 1
        for q in range(n + 1):
            j = i if q == n else nbrs[i, q]
            if q < n:
                k1[j] += dk
            c_old = cls[j]
            c_new = (types[j] - 1) * (n + 1) + k1[j]
            if c_new != c_old:
                last = members[c_old, size[c_old] - 1]
                members[c_old, pos[j]] = last
                pos[last] = pos[j]
                size[c_old] -= 1
                pos[j] = size[c_new]
                members[c_new, size[c_new]] = j
                size[c_new] += 1
                cls[j] = c_new
        events += 1
    return events


@numba.njit(cache=True)
def _np_batch(types, nbrs, table, horizon, checkpoints, dens_out, seeds):
    R = types.shape[0]
    events = np.zeros(R, np.int64)
    for r in range(R):
        events[r] = _np_one(types[r], nbrs, table, horizon, checkpoints, dens_out[r], seeds[r])
    return events


def np_simulate(params: NPParams, types0, horizon: float, replicas: int, seed: int,
                checkpoints=None, stream_id: int = 1):
    """Run replicas of the competition model.

    Returns (final types of shape (replicas, *torus.shape), densities at
    ``checkpoints`` of shape (replicas, len(checkpoints)), event counts).
    ``types0`` may be a field or a callable ``rng -> field`` drawn per replica.
    """
    torus = params.torus
    if checkpoints is None:
        checkpoints = [horizon]
    chk = np.asarray(checkpoints, dtype=float)
    if np.any(np.diff(chk) < 0) or (chk.size and chk[-1] > horizon):
        raise ParameterError("checkpoints must be sorted and not exceed the horizon")
    if callable(types0):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(stream_id), 7]))
        init = np.stack([np.asarray(types0(rng), np.int8).reshape(-1) for _ in range(replicas)])
    else:
        init = np.tile(np.asarray(types0, np.int8).reshape(-1), (replicas, 1))
    if init.shape[1] != torus.n_sites or not np.all((init == 1) | (init == 2)):
        raise ParameterError("initial types must be 1 or 2 on every site")
    box = RadialKernel([0.0] + [1.0] * params.radius)
    nbrs, _ = torus.neighbor_table(box)
    table = np_rate_table(params)
    dens = np.zeros((replicas, chk.size))
    seeds = replica_seeds(seed, replicas, stream_id).astype(np.int64)
    events = _np_batch(init, nbrs, table, float(horizon), chk, dens, seeds)
    return init.reshape((replicas,) + torus.shape), dens, events


def np_exclusion_boundaries(n: int, alpha21):
    """Competitive-exclusion thresholds on alpha12 for fecundity ratio 1.

    Returns (lower, upper): species 1 excludes species 2 when
    alpha12 < lower(alpha21), species 2 excludes species 1 when
    alpha12 > upper(alpha21).  ``lower`` is NaN for alpha21 <= 1 - 1/n.
    """
    a = np.asarray(alpha21, dtype=float)
    steep = n * a - n + 1
    shallow = a / n + 1 - 1 / n
    lower = np.where(a > 1, shallow, np.where(a > 1 - 1 / n, steep, np.nan))
    upper = np.where(a > 1, steep, np.where(a > 0, shallow, np.nan))
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def np_coexistence_sweep(alpha12_grid, alpha21_grid, horizon: float, replicas: int, seed: int,
                         d: int = 2, side: int = 16, radius: int = 1, density: float = 0.5):
    """Fraction of replicas with both types present at ``horizon`` on a grid.

    Returns a list of dicts (alpha12, alpha21, coexistence, stderr) plus the
    exclusion boundary lines evaluated on ``alpha21_grid``.
    """
    rows = []
    n = np_neighborhood_size(d, radius)
    for a21 in alpha21_grid:
        for a12 in alpha12_grid:
            params = NPParams(d, side, 1.0, float(a12), float(a21), radius)

            def draw(rng, _shape=params.torus.shape):
                return np.where(rng.random(_shape) < density, 1, 2)

            final, _, _ = np_simulate(params, draw, horizon, replicas, seed)
            axes = tuple(range(1, d + 1))
            both = np.any(final == 1, axis=axes) & np.any(final == 2, axis=axes)
            f = float(both.mean())
            rows.append({"alpha12": float(a12), "alpha21": float(a21), "coexistence": f,
                         "stderr": math.sqrt(f * (1 - f) / replicas)})
    lower, upper = np_exclusion_boundaries(n, np.asarray(alpha21_grid, dtype=float))
    boundaries = {"alpha21": np.asarray(alpha21_grid, dtype=float), "lower": lower, "upper": upper, "n": n}
    return rows, boundaries
