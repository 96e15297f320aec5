"""Oriented site percolation on {(x, n): x + n even, n >= 0}.

Edges run from (x, n) to (x - 1, n + 1) and (x + 1, n + 1).  A field stores
open (1) / closed (0) bits on a finite window of x values at levels
0..n_max.  The reachable sets W_n start from a given W_0; bits at level 0 are
not consulted, so W_0 itself is always reachable.

Fields are dense arrays of shape (n_max + 1, 2 * width + 1), column ``x + width``;
entries with x + n odd are kept at 0 and never read.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .errors import ParameterError, PreconditionError, WindowError

__all__ = [
    "OrientedSiteField",
    "PercolationFrontier",
    "lattice_mask",
    "sample_iid_field",
    "sample_iid_bits",
    "advance_frontier",
    "frontiers",
    "frontier_batch",
    "survival_curve",
    "exact_survival",
    "theorem32_bound",
    "DependenceReport",
    "dependence_estimator",
    "write_field",
    "read_field",
    "FILE_HEADER",
]

FILE_HEADER = "# oriented-site-field v1"


def lattice_mask(n_max: int, width: int) -> np.ndarray:
    x = np.arange(-width, width + 1)
    n = np.arange(n_max + 1)[:, None]
    return (x + n) % 2 == 0


@dataclass
class OrientedSiteField:
    """Open/closed bits with a dependence tag.

    ``dependence`` is ``("iid", theta)`` or ``("dependent", N, theta)``;
    theta may be None when unknown.
    """

    bits: np.ndarray
    width: int
    dependence: tuple = ("iid", None)

    def __post_init__(self):
        b = np.asarray(self.bits).astype(np.uint8)
        if b.ndim != 2 or b.shape[1] != 2 * self.width + 1:
            raise ParameterError("bits must have shape (levels, 2*width + 1)")
        if np.any(b > 1):
            raise ParameterError("bits must be 0 or 1")
        self.bits = b * lattice_mask(b.shape[0] - 1, self.width)

    @property
    def n_max(self) -> int:
        return self.bits.shape[0] - 1

    def is_open(self, x: int, n: int) -> bool:
        if (x + n) % 2:
            raise ParameterError(f"({x}, {n}) is not a lattice site")
        if abs(x) > self.width or not 0 <= n <= self.n_max:
            raise WindowError(f"({x}, {n}) lies outside the field window")
        return bool(self.bits[n, x + self.width])

    @classmethod
    def all_open(cls, n_max: int, width: int) -> "OrientedSiteField":
        return cls(np.ones((n_max + 1, 2 * width + 1), np.uint8), width, ("iid", 0.0))

    @classmethod
    def all_closed(cls, n_max: int, width: int) -> "OrientedSiteField":
        return cls(np.zeros((n_max + 1, 2 * width + 1), np.uint8), width, ("iid", 1.0))


@dataclass(frozen=True)
class PercolationFrontier:
    n: int
    sites: frozenset = field(default_factory=frozenset)

    def __bool__(self):
        return bool(self.sites)


def sample_iid_bits(theta: float, n_max: int, width: int, replicas: int, seed: int) -> np.ndarray:
    """Batch of i.i.d. fields, shape (replicas, n_max + 1, 2 width + 1), uint8.

    A site is open iff its uniform is >= theta, so one seed couples all theta
    values monotonically (common random numbers).
    """
    if not 0 <= theta <= 1:
        raise ParameterError("theta must lie in [0, 1]")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x0B]))
    u = rng.random((replicas, n_max + 1, 2 * width + 1))
    return (u >= theta).astype(np.uint8) * lattice_mask(n_max, width)


def sample_iid_field(theta: float, n_max: int, width: int, seed: int) -> OrientedSiteField:
    """Each lattice site closed independently with probability theta."""
    bits = sample_iid_bits(theta, n_max, width, 1, seed)[0]
    return OrientedSiteField(bits, width, ("iid", float(theta)))


def advance_frontier(W_n, fld: OrientedSiteField, n: int) -> PercolationFrontier:
    """W_{n+1} = {y : y open at level n+1 and y - 1 or y + 1 in W_n}."""
    sites = W_n.sites if isinstance(W_n, PercolationFrontier) else frozenset(W_n)
    if n + 1 > fld.n_max:
        raise WindowError(f"level {n + 1} is not present in the field")
    nxt = set()
    for x in sites:
        if (x + n) % 2:
            raise ParameterError(f"({x}, {n}) is not a lattice site")
        for y in (x - 1, x + 1):
            if abs(y) > fld.width:
                raise WindowError(f"reachable site ({y}, {n + 1}) leaves the window")
            if fld.bits[n + 1, y + fld.width]:
                nxt.add(y)
    return PercolationFrontier(n + 1, frozenset(nxt))


def frontiers(fld: OrientedSiteField, W0=(0,)) -> list:
    """[W_0, W_1, ..., W_{n_max}] for one field."""
    out = [PercolationFrontier(0, frozenset(W0))]
    for n in range(fld.n_max):
        out.append(advance_frontier(out[-1], fld, n))
    return out


def frontier_batch(bits: np.ndarray, width: int, W0: np.ndarray, guard: bool = True) -> np.ndarray:
    """Vectorised reachability.

    ``bits`` has shape (R, levels, 2 width + 1), ``W0`` is a boolean row of
    length 2 width + 1.  Returns reachable indicators of the same shape as
    ``bits``.  With ``guard`` a WindowError is raised if a reachable site
    touches the window edge before the last level; without it, sites outside
    the window are treated as closed.
    """
    R, levels, _ = bits.shape
    reach = np.zeros(bits.shape, dtype=bool)
    cur = np.broadcast_to(np.asarray(W0, dtype=bool), (R, 2 * width + 1)).copy()
    reach[:, 0] = cur
    for n in range(levels - 1):
        if guard and (np.any(cur[:, 0]) or np.any(cur[:, -1])):
            raise WindowError(f"reachable set touches the window edge at level {n}")
        nb = np.zeros_like(cur)
        nb[:, 1:] |= cur[:, :-1]
        nb[:, :-1] |= cur[:, 1:]
        cur = nb & bits[:, n + 1].astype(bool)
        reach[:, n + 1] = cur
    return reach


def survival_curve(thetas, n_max: int, width: int, replicas: int, seed: int, mode: str = "origin"):
    """Monte Carlo reachability statistics per closed-site probability theta.

    ``mode='origin'`` starts from W_0 = {0} and reports P[W_n nonempty] and
    P[0 in W_n] (even n).  ``mode='full'`` starts from every even site of the
    window and reports P[0 in W_n]; the window must then hold the backward
    light cone of the origin.  Rows are dicts keyed by theta, n, nonempty,
    nonempty_se, origin, origin_se.
    """
    if mode not in ("origin", "full"):
        raise ParameterError("mode must be 'origin' or 'full'")
    if mode == "origin" and width < n_max + 1:
        raise WindowError("window must exceed the light cone |x| <= n_max")
    if mode == "full" and width < n_max:
        raise WindowError("window must contain the backward light cone of the origin")
    x = np.arange(-width, width + 1)
    W0 = (x == 0) if mode == "origin" else (x % 2 == 0)
    rows = []
    for theta in thetas:
        bits = sample_iid_bits(float(theta), n_max, width, replicas, seed)
        if mode == "origin":
            reach = frontier_batch(bits, width, W0)
        else:
            # the window edge lies outside the backward light cone of the origin
            reach = frontier_batch(bits, width, W0, guard=False)
        for n in range(n_max + 1):
            ne = reach[:, n].any(axis=1) if mode == "origin" else np.ones(replicas, bool)
            org = reach[:, n, width] if n % 2 == 0 else np.zeros(replicas, bool)
            pn, po = float(ne.mean()), float(org.mean())
            rows.append({"theta": float(theta), "n": n, "nonempty": pn,
                         "nonempty_se": math.sqrt(pn * (1 - pn) / replicas),
                         "origin": po, "origin_se": math.sqrt(po * (1 - po) / replicas)})
    return rows


def exact_survival(p_open, n_max: int, W0=(0,)):
    """Exact P[W_n nonempty] and P[0 in W_n] for n = 0..n_max by recursion over frontier sets.

    ``p_open`` may be a float or a Fraction (exact arithmetic).  Returns two
    lists indexed by n.
    """
    one = Fraction(1) if isinstance(p_open, Fraction) else 1.0
    q = one - p_open
    dist = {frozenset(W0): one}
    nonempty, origin = [], []
    for n in range(n_max + 1):
        nonempty.append(sum((w for s, w in dist.items() if s), 0 * one))
        origin.append(sum((w for s, w in dist.items() if 0 in s), 0 * one))
        if n == n_max:
            break
        nxt = {}
        for s, w in dist.items():
            cand = sorted({y for x in s for y in (x - 1, x + 1)})
            for pattern in itertools.product((0, 1), repeat=len(cand)):
                k = sum(pattern)
                prob = w * p_open ** k * q ** (len(cand) - k)
                key = frozenset(c for c, o in zip(cand, pattern) if o)
                nxt[key] = nxt.get(key, 0 * one) + prob
        dist = nxt
    return nonempty, origin


def theorem32_bound(theta: float | None, N: int, log_theta: float | None = None):
    """(admissible, bound) for the 2N-dependent survival bound.

    admissible: theta <= 6^{-4(4N+1)^2}; bound: 55 theta^{1/(4N+1)^2}.  All
    arithmetic is in log space; pass ``log_theta`` directly for values that
    underflow a double.  The threshold comparison carries a relative slack of
    1e-12 so that a theta computed as the threshold itself is admissible.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    k = (4 * N + 1) ** 2
    log_thr = -4 * k * math.log(6.0)
    if log_theta is None:
        if theta is None or theta < 0:
            raise ParameterError("theta must be nonnegative")
        if theta == 0:
            return True, 0.0
        log_theta = math.log(theta)
    admissible = log_theta <= log_thr + 1e-12 * abs(log_thr)
    bound = 55.0 * math.exp(log_theta / k)
    return admissible, bound


@dataclass(frozen=True)
class DependenceReport:
    ratios: np.ndarray
    stderrs: np.ndarray
    upper: np.ndarray
    max_ratio: float
    max_upper: float
    confidence: float
    samples: int


def _sep(a, b):
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def dependence_estimator(samples, N: int, tuples, theta: float | None = None,
                         confidence: float = 0.95) -> DependenceReport:
    """Empirical P[all sites of a tuple closed] / theta^{|I|} per tuple.

    ``samples`` is a list of OrientedSiteField with a common window, or an
    array (R, levels, 2 width + 1) together with ``theta``.  Every tuple must
    have pairwise max-norm separation > 2N.  ``upper`` is the one-sided
    Clopper-Pearson bound at ``confidence`` divided by theta^{|I|}.
    """
    if isinstance(samples, np.ndarray):
        bits = samples
        width = (bits.shape[2] - 1) // 2
    else:
        samples = list(samples)
        if not samples:
            raise PreconditionError("no field samples given")
        width = samples[0].width
        bits = np.stack([s.bits for s in samples])
        if theta is None:
            theta = samples[0].dependence[-1]
    if theta is None or not 0 < theta <= 1:
        raise ParameterError("theta in (0, 1] is required")
    R = bits.shape[0]
    ratios, ses, ups = [], [], []
    for tup in tuples:
        tup = [tuple(int(v) for v in site) for site in tup]
        for a, b in itertools.combinations(tup, 2):
            if _sep(a, b) <= 2 * N:
                raise PreconditionError(f"sites {a} and {b} are not more than 2N = {2 * N} apart")
        closed = np.ones(R, dtype=bool)
        for x, n in tup:
            if (x + n) % 2:
                raise ParameterError(f"({x}, {n}) is not a lattice site")
            if abs(x) > width or not 0 <= n < bits.shape[1]:
                raise WindowError(f"({x}, {n}) lies outside the field window")
            closed &= bits[:, n, x + width] == 0
        k = int(closed.sum())
        scale = theta ** len(tup)
        phat = k / R
        up = 1.0 if k == R else float(stats.beta.ppf(confidence, k + 1, R - k))
        ratios.append(phat / scale)
        ses.append(math.sqrt(phat * (1 - phat) / R) / scale)
        ups.append(up / scale)
    ratios, ses, ups = np.array(ratios), np.array(ses), np.array(ups)
    return DependenceReport(ratios, ses, ups, float(ratios.max()), float(ups.max()), confidence, R)


def write_field(path_or_buffer, fld: OrientedSiteField):
    """Text layout: header, a key=value line, then one line per level n listing
    the bits at x = x_start(n), x_start(n) + 2, ..., where x_start(n) is the
    smallest x >= -width with x + n even."""
    out = io.StringIO()
    out.write(FILE_HEADER + "\n")
    dep = fld.dependence
    tag = "iid" if dep[0] == "iid" else f"dependent N={dep[1]}"
    theta = dep[-1]
    out.write(f"# levels={fld.n_max + 1} width={fld.width} dependence={tag} theta={theta}\n")
    for n in range(fld.n_max + 1):
        start = -fld.width + ((fld.width + n) % 2)
        row = fld.bits[n, start + fld.width::2]
        out.write("".join(str(int(v)) for v in row) + "\n")
    text = out.getvalue()
    if hasattr(path_or_buffer, "write"):
        path_or_buffer.write(text)
    else:
        with open(path_or_buffer, "w") as fh:
            fh.write(text)


def read_field(path_or_buffer) -> OrientedSiteField:
    if hasattr(path_or_buffer, "read"):
        lines = path_or_buffer.read().splitlines()
    else:
        with open(path_or_buffer) as fh:
            lines = fh.read().splitlines()
    if not lines or lines[0].strip() != FILE_HEADER:
        raise ParameterError("missing oriented-site-field header")
    meta = dict(tok.split("=", 1) for tok in lines[1].lstrip("# ").split() if "=" in tok)
    levels, width = int(meta["levels"]), int(meta["width"])
    theta = None if meta.get("theta") in (None, "None") else float(meta["theta"])
    if meta.get("dependence") == "dependent":
        dep = ("dependent", int(meta["N"]), theta)
    else:
        dep = ("iid", theta)
    rows = lines[2:2 + levels]
    if len(rows) != levels:
        raise ParameterError("truncated field file")
    bits = np.zeros((levels, 2 * width + 1), np.uint8)
    for n, row in enumerate(rows):
        start = -width + ((width + n) % 2)
        vals = np.array([int(c) for c in row.strip()], np.uint8)
        if vals.size != len(range(start, width + 1, 2)):
            raise ParameterError(f"level {n} has the wrong number of sites")
        bits[n, start + width::2] = vals
    return OrientedSiteField(bits, width, dep)
