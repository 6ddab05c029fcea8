"""Rate-distortion frontiers by multistart local search over input distributions.

For every distortion budget ``b`` on a grid, :func:`optimize_frontier`
maximizes a strategy's effective total rate over ``P_X`` (blind, full) or
``P_UX`` (partial, outer, degraded) subject to ``distortion <= b``.

The search is deterministic given ``SearchConfig.seed``:

1. A candidate pool is formed from the simplex vertices, the uniform pmf,
   ``samples`` draws from the uniform distribution on the simplex and any
   caller-supplied seed distributions. Distortion is concave (or linear) in
   the input distribution, so its minimum sits at a vertex and the pool
   always contains a minimum-distortion point.
2. For each budget the ``keep`` best feasible candidates are refined by
   mass-transfer moves (move ``h`` of mass from one cell to another, or two
   such moves balanced to keep the distortion on budget; accept the best
   feasible improvement) with ``h`` halved from ``step_start`` to
   ``step_min``.
3. The best refined point per budget is carried forward to larger budgets,
   so the reported rates are nondecreasing.

Budgets below the minimum achievable distortion produce points whose rates
are ``None``.
"""

from __future__ import annotations

import csv
import io
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel, check_degraded
from .errors import DomainError, EmptyGrid, NotDegraded, ParseError
from .regions import STRATEGIES, batch_evaluate, evaluate

FEAS_TOL = 1e-12
PARETO_EPS = 1e-9
_CHUNK = 8192
_COMBOS = 4

CSV_HEADER = ("strategy", "d_budget", "d_achieved", "r0", "r1", "r_sum", "r_effective", "witness")


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the frontier search.

    Parameters
    ----------
    seed : int
        Seed of the Philox stream that draws the candidate pool.
    samples : int
        Number of random simplex draws in the pool.
    keep : int
        Number of feasible candidates refined per budget.
    step_start, step_min : float
        First and last mass-transfer step sizes.
    nu : int or None
        Auxiliary alphabet size; ``None`` means ``|X| + 1``.
    threads : int
        Worker threads for pool evaluation. Results do not depend on it.
    """

    seed: int = 0
    samples: int = 20000
    keep: int = 50
    step_start: float = 0.05
    step_min: float = 1e-4
    nu: int | None = None
    threads: int = 1
    max_sweeps: int = 400

    def __post_init__(self):
        if self.samples < 0 or self.keep < 1:
            raise DomainError("samples must be >= 0 and keep >= 1")
        if not 0.0 < self.step_min <= self.step_start <= 1.0:
            raise DomainError("need 0 < step_min <= step_start <= 1")
        if self.nu is not None and self.nu < 1:
            raise DomainError("nu must be positive")
        if self.threads < 1:
            raise DomainError("threads must be positive")


@dataclass(frozen=True)
class FrontierPoint:
    d_budget: float
    d_achieved: float | None
    r0: float | None
    r1: float | None
    r_sum: float | None
    r_effective: float | None
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.r_effective is not None


@dataclass(frozen=True)
class Frontier:
    """Per-budget optimum of one strategy.

    ``points`` are ordered by strictly increasing ``d_budget``; the feasible
    ones have nondecreasing ``r_effective``.
    """

    strategy: str
    points: tuple
    search_metadata: dict

    def budgets(self) -> np.ndarray:
        return np.array([p.d_budget for p in self.points])

    def rates(self) -> np.ndarray:
        """Effective rates with ``nan`` at infeasible budgets."""
        return np.array([np.nan if p.r_effective is None else p.r_effective for p in self.points])

    def curve(self) -> list[tuple[float, float]]:
        """Pareto-extracted ``(d_achieved, rate)`` pairs."""
        return pareto_extract([(p.d_achieved, p.r_effective) for p in self.points if p.feasible])


# ---------------------------------------------------------------------------
# grid and Pareto helpers


def parse_grid(text: str) -> np.ndarray:
    """Parse ``start:stop:step`` into an ascending grid that includes ``stop``.

    ``stop`` is included when it lies within 1e-12 of a grid point. Values are
    rounded to 12 decimals so that, e.g., ``0:0.3:0.1`` ends at exactly 0.3.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"grid {text!r} is not of the form start:stop:step")
    try:
        start, stop, step = (float(v) for v in parts)
    except ValueError:
        raise ParseError(f"grid {text!r} has a non-numeric field") from None
    if not step > 0 or stop < start:
        raise ParseError(f"grid {text!r} needs step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-12 / step))
    grid = np.round(start + step * np.arange(n + 1), 12)
    return grid


def pareto_extract(points) -> list[tuple[float, float]]:
    """Keep the ``(d, r)`` pairs not dominated by a pair of smaller ``d``.

    A pair survives when its rate exceeds every rate at smaller distortion by
    more than 1e-9. Of several pairs with equal ``d`` the largest rate is
    kept. The result is sorted by ``d``.
    """
    best: dict[float, float] = {}
    for d, r in points:
        if d is None or r is None:
            continue
        best[d] = max(r, best.get(d, -np.inf))
    out: list[tuple[float, float]] = []
    top = -np.inf
    for d in sorted(best):
        if best[d] > top + PARETO_EPS:
            out.append((d, best[d]))
            top = best[d]
    return out


# ---------------------------------------------------------------------------
# search


def _shape(c: ChannelModel, strategy: str, cfg: SearchConfig) -> tuple[int, int]:
    if strategy in ("blind", "full"):
        return 1, c.nx
    return (cfg.nu or c.nx + 1), c.nx


def _pool(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    pts = [np.eye(k), np.full((1, k), 1.0 / k)]
    if n:
        e = rng.exponential(size=(n, k))
        pts.append(e / e.sum(axis=1, keepdims=True))
    return np.concatenate(pts)


def _evaluator(c: ChannelModel, strategy: str, shape: tuple[int, int], threads: int):
    nu, nx = shape

    def run(flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        P = flat.reshape(-1, nu, nx)
        chunks = [P[i : i + _CHUNK] for i in range(0, P.shape[0], _CHUNK)] or [P]
        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(threads) as ex:
                res = list(ex.map(lambda b: batch_evaluate(c, strategy, b), chunks))
        else:
            res = [batch_evaluate(c, strategy, b) for b in chunks]
        return np.concatenate([r for r, _ in res]), np.concatenate([d for _, d in res])

    return run


def _refine(run, X: np.ndarray, rate: np.ndarray, budget: np.ndarray, cfg: SearchConfig) -> tuple[np.ndarray, np.ndarray, int]:
    """Mass-transfer ascent, vectorized over all starts.

    Each sweep tries every single move ``h`` from cell ``i`` to cell ``j``.
    When the distortion constraint is tight, single moves either lose rate or
    leave the feasible set, so the sweep also tries pairs of moves: a
    rate-raising move combined with a scaled distortion-lowering move whose
    size is chosen, from the finite differences already at hand, to keep the
    distortion on budget. The ``_COMBOS`` most promising pairs per start are
    evaluated exactly, and the best feasible improvement overall is taken.
    """
    X, rate = X.copy(), rate.copy()
    m, k = X.shape
    if k == 1 or m == 0:
        return X, rate, 0
    _, dist = run(X)
    src, dst = map(np.array, zip(*itertools.permutations(range(k), 2)))
    n_moves = src.size
    lanes = np.arange(n_moves)
    sweeps = 0
    h = cfg.step_start
    while h >= cfg.step_min * (1 - 1e-9):
        active = np.ones(m, dtype=bool)
        for _ in range(cfg.max_sweeps):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            sweeps += 1
            a = idx.size
            Xa, ra, da, ba = X[idx], rate[idx], dist[idx], budget[idx]
            t = np.minimum(h, Xa[:, src])  # [a, move]
            steps = np.zeros((a, n_moves, k))
            steps[:, lanes, src] -= t
            steps[:, lanes, dst] += t
            Y = Xa[:, None, :] + steps
            r, d = (v.reshape(a, n_moves) for v in run(Y.reshape(-1, k)))
            dr, dd = r - ra[:, None], d - da[:, None]

            # pairs (first, second): second move scaled by lam >= 0 so that
            # the linear prediction da + dd1 + lam * dd2 stays within budget
            over = da[:, None] + dd - ba[:, None]  # [a, first]
            down = np.where((dd < 0) & (t > 0), -dd, np.nan)  # [a, second]
            lam = np.maximum(over[:, :, None], 0.0) / down[:, None, :]
            pred = dr[:, :, None] + lam * dr[:, None, :]
            pred = np.where((lam <= 1.0) & (t[:, :, None] > 0), pred, -np.inf)
            pred[:, lanes, lanes] = -np.inf
            flat = np.nan_to_num(pred, nan=-np.inf).reshape(a, -1)
            n_c = min(_COMBOS, flat.shape[1])
            top = np.argpartition(-flat, n_c - 1, axis=1)[:, :n_c]
            first, second = np.divmod(top, n_moves)
            rows = np.arange(a)[:, None]
            lam_top = np.nan_to_num(lam[rows, first, second], nan=0.0)
            Z = Xa[:, None, :] + steps[rows, first] + lam_top[:, :, None] * steps[rows, second]
            valid = np.isfinite(flat[rows, top]) & (Z.min(axis=2) >= -1e-15)
            rz, dz = (v.reshape(a, n_c) for v in run(np.maximum(Z, 0.0).reshape(-1, k)))

            cand_r = np.concatenate([r, rz], axis=1)
            cand_d = np.concatenate([d, dz], axis=1)
            cand_ok = np.concatenate([t > 0, valid], axis=1) & (cand_d <= ba[:, None] + FEAS_TOL)
            gain = np.where(cand_ok, cand_r - ra[:, None], -np.inf)
            j = np.argmax(gain, axis=1)
            up = gain[np.arange(a), j] > 1e-15
            single = j < n_moves
            for sel, pts in ((up & single, Y), (up & ~single, Z)):
                if not sel.any():
                    continue
                jj = j[sel] - (0 if pts is Y else n_moves)
                newx = np.maximum(pts[sel, jj], 0.0)
                X[idx[sel]] = newx / newx.sum(axis=1, keepdims=True)
            rate[idx[up]] = cand_r[up, j[up]]
            dist[idx[up]] = cand_d[up, j[up]]
            active[idx[~up]] = False
        h /= 2.0
    return X, rate, sweeps


def _lex_best(rates: np.ndarray, W: np.ndarray) -> int:
    """Index of the max rate; exact ties go to the lexicographically smallest row."""
    top = np.flatnonzero(rates == rates.max())
    if top.size == 1:
        return int(top[0])
    order = np.lexsort(W[top].T[::-1])
    return int(top[order[0]])


def _embed(w: np.ndarray, shape: tuple[int, int]) -> np.ndarray | None:
    """Place a ``[u', x]`` witness into a ``[nu, x]`` array by padding zero rows."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    nu, nx = shape
    if w.shape[1] != nx:
        return None
    rows = w[w.sum(axis=1) > 0]
    if rows.shape[0] > nu:
        return None
    out = np.zeros(shape)
    out[: rows.shape[0]] = rows
    return out


def _strategy_seeds(c: ChannelModel, strategy: str, grid: np.ndarray, cfg: SearchConfig, shape) -> list[np.ndarray]:
    """Witnesses of the special cases a strategy contains.

    Partial, outer and degraded all contain blind (``U`` constant) and full
    (``U = X``) operation, so their searches start from those optima.
    """
    if strategy in ("blind", "full"):
        return []
    seeds = []
    nx = c.nx
    for sub in ("blind", "full"):
        f = optimize_frontier(c, sub, grid, cfg)
        for p in f.points:
            if p.witness is None:
                continue
            px = np.asarray(p.witness).ravel()
            w = px[None, :] if sub == "blind" else np.diag(px)
            if sub == "full" and shape[0] < nx:
                continue
            e = _embed(w, shape)
            if e is not None:
                seeds.append(e)
    return seeds


def optimize_frontier(c: ChannelModel, strategy: str, d_grid, cfg: SearchConfig | None = None, seeds=None) -> Frontier:
    """Maximize the effective total rate of ``strategy`` at every budget in ``d_grid``.

    Parameters
    ----------
    c : ChannelModel
    strategy : str
        One of ``blind``, ``partial``, ``full``, ``outer``, ``degraded``.
    d_grid : sequence of float
        Ascending distortion budgets.
    cfg : SearchConfig, optional
    seeds : iterable, optional
        Extra candidate distributions (arrays ``[u, x]`` or 1-D ``P_X``) or
        :class:`Frontier` objects whose witnesses are added to the pool.

    Returns
    -------
    Frontier
    """
    cfg = cfg or SearchConfig()
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    grid = np.asarray(d_grid, dtype=float).ravel()
    if grid.size == 0:
        raise EmptyGrid("distortion grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("distortion grid must be strictly ascending")
    if strategy == "degraded":
        verdict = check_degraded(c)
        if not verdict.is_degraded:
            raise NotDegraded(f"Z is not a degraded version of Y (residual {verdict.residual:.3g})")

    shape = _shape(c, strategy, cfg)
    k = shape[0] * shape[1]
    run = _evaluator(c, strategy, shape, cfg.threads)

    extra = _strategy_seeds(c, strategy, grid, cfg, shape)
    for s in seeds or ():
        ws = [p.witness for p in s.points if p.witness is not None] if isinstance(s, Frontier) else [s]
        for w in ws:
            w = np.asarray(w, dtype=float)
            if shape[0] == 1:
                w = w.sum(axis=0) if w.ndim == 2 else w
            e = _embed(w, shape)
            if e is not None:
                extra.append(e)

    rng = np.random.Generator(np.random.Philox(cfg.seed))
    pool = _pool(rng, cfg.samples, k)
    if extra:
        pool = np.concatenate([pool, np.array(extra).reshape(-1, k)])
    pool_r, pool_d = run(pool)

    # starts: the best `keep` feasible candidates per budget
    order = np.lexsort((np.arange(pool.shape[0]), -pool_r))
    starts, owner = [], []
    for b, budget in enumerate(grid):
        feas = order[pool_d[order] <= budget + FEAS_TOL]
        sel = feas[: cfg.keep]
        starts.append(sel)
        owner.append(np.full(sel.size, b))
    start_idx = np.concatenate(starts)
    owner_idx = np.concatenate(owner)
    X, rate, sweeps = _refine(run, pool[start_idx], pool_r[start_idx], grid[owner_idx], cfg)

    points = []
    for b, budget in enumerate(grid):
        mine = np.flatnonzero(owner_idx == b)
        if mine.size == 0:
            points.append(FrontierPoint(float(budget), None, None, None, None, None, None))
            continue
        best = mine[_lex_best(rate[mine], X[mine])]
        w = X[best].reshape(shape)
        points.append(_scalar_point(c, strategy, w, budget))

    meta = {
        "seed": cfg.seed,
        "samples": cfg.samples,
        "pool_size": int(pool.shape[0]),
        "seed_candidates": len(extra),
        "keep": cfg.keep,
        "refine_sweeps": sweeps,
        "nu": shape[0],
        "step_start": cfg.step_start,
        "step_min": cfg.step_min,
    }
    return Frontier(strategy, _carry_forward(points), meta)


def _carry_forward(points) -> tuple:
    """Replace any point beaten by a smaller budget's point with that point."""
    out, prev = [], None
    for pt in points:
        if pt.feasible and prev is not None and prev.r_effective > pt.r_effective:
            pt = FrontierPoint(pt.d_budget, prev.d_achieved, prev.r0, prev.r1, prev.r_sum, prev.r_effective, prev.witness)
        if pt.feasible:
            prev = pt
        out.append(pt)
    return tuple(out)


def _scalar_point(c: ChannelModel, strategy: str, w: np.ndarray, budget: float) -> FrontierPoint:
    dist = w.ravel() if strategy in ("blind", "full") else w
    rp = evaluate(c, strategy, dist)
    wit = np.array(rp.witness, dtype=float)
    wit.setflags(write=False)
    return FrontierPoint(float(budget), rp.d, rp.r0, rp.r1, rp.r_sum, rp.r_effective, wit)


def frontier_family(channels, strategy: str, d_grid, cfg: SearchConfig | None = None) -> list[Frontier]:
    """Frontiers for a sequence of channels on one grid, searched in order.

    Each search also starts from the witnesses of the frontier before it.
    When the channels are ordered so that each is at least as good for the
    estimator and the common message as its predecessor (e.g. Example 1 with
    decreasing ``e``), every witness stays feasible with no less rate, and the
    resulting frontiers are nondecreasing along the sequence.
    """
    out: list[Frontier] = []
    for c in channels:
        out.append(optimize_frontier(c, strategy, d_grid, cfg, seeds=out[-1:]))
    return out


# ---------------------------------------------------------------------------
# cardinality sweep


@dataclass(frozen=True)
class CardinalityReport:
    """Frontiers for several auxiliary sizes against the ``|X| + 1`` baseline."""

    base_nu: int
    frontiers: dict
    gaps: dict  # nu -> per-budget rate(nu) - rate(base_nu)
    refined_budgets: tuple

    @property
    def max_gap(self) -> float:
        vals = [np.nanmax(g) for g in self.gaps.values() if np.any(np.isfinite(g))]
        return float(max(vals)) if vals else 0.0


def cardinality_sweep(c: ChannelModel, nu_values, d_grid, cfg: SearchConfig | None = None, gap_tol: float = 1e-4) -> CardinalityReport:
    """Compare partial frontiers across auxiliary alphabet sizes.

    Budgets where some larger ``nu`` beats the ``|X| + 1`` frontier by more
    than ``gap_tol`` are searched again for ``|X| + 1`` with ten times the
    samples and starts, seeded with the ``|X| + 1`` optimum.
    """
    cfg = cfg or SearchConfig()
    base = c.nx + 1
    nus = sorted(set(int(v) for v in nu_values))
    if base not in nus or not any(v > base for v in nus):
        raise DomainError(f"nu_values must include {base} and a larger value")
    grid = np.asarray(d_grid, dtype=float)
    fronts = {}
    for nu in nus:
        sub = SearchConfig(cfg.seed, cfg.samples, cfg.keep, cfg.step_start, cfg.step_min, nu, cfg.threads, cfg.max_sweeps)
        seeds = [fronts[v] for v in fronts if v < nu]
        fronts[nu] = optimize_frontier(c, "partial", grid, sub, seeds=seeds)

    def gaps_now():
        ref = fronts[base].rates()
        return {nu: fronts[nu].rates() - ref for nu in nus if nu != base}

    gaps = gaps_now()
    worst = np.nanmax(np.vstack(list(gaps.values())), axis=0) if gaps else np.zeros(grid.size)
    redo = np.flatnonzero(np.nan_to_num(worst, nan=0.0) > gap_tol)
    if redo.size:
        big = SearchConfig(cfg.seed + 1, cfg.samples * 10, cfg.keep * 10, cfg.step_start, cfg.step_min, base, cfg.threads, cfg.max_sweeps)
        again = optimize_frontier(c, "partial", grid[redo], big, seeds=[fronts[base]])
        pts = list(fronts[base].points)
        for i, new in zip(redo, again.points):
            old = pts[i]
            if new.feasible and (not old.feasible or new.r_effective > old.r_effective):
                pts[i] = new
        meta = dict(fronts[base].search_metadata, refined_budgets=int(redo.size))
        fronts[base] = Frontier("partial", _carry_forward(pts), meta)
        gaps = gaps_now()
    return CardinalityReport(base, fronts, gaps, tuple(float(grid[i]) for i in redo))


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    return "" if v is None else f"{v:.12g}"


def frontier_rows(f: Frontier):
    for p in f.points:
        wit = "" if p.witness is None else ";".join(_fmt(float(v)) for v in np.ravel(p.witness))
        yield [f.strategy, _fmt(p.d_budget), _fmt(p.d_achieved), _fmt(p.r0), _fmt(p.r1), _fmt(p.r_sum), _fmt(p.r_effective), wit]


def frontier_to_csv(frontiers) -> str:
    """Serialize one or more frontiers to CSV text (12 significant digits)."""
    if isinstance(frontiers, Frontier):
        frontiers = [frontiers]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for f in frontiers:
        w.writerows(frontier_rows(f))
    return buf.getvalue()


def gnuplot_script(csv_path: str, strategies, title: str = "") -> str:
    """Gnuplot commands that draw rate against budget for each strategy in a CSV."""
    name = os.path.basename(csv_path)
    stem = os.path.splitext(name)[0]
    lines = [
        "set datafile separator ','",
        "set key bottom right",
        "set xlabel 'distortion budget D'",
        "set ylabel 'rate R (bits)'",
        f"set title '{title}'" if title else "unset title",
        "set terminal pngcairo size 800,600",
        f"set output '{stem}.png'",
    ]
    series = [f"'{name}' using 2:(strcol(1) eq '{s}' ? $7 : 1/0) with lines title '{s}'" for s in strategies]
    lines.append("plot " + ", \\\n     ".join(series))
    return "\n".join(lines) + "\n"
