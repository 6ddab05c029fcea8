"""One-shot Bayes state estimators.

Three observation models are supported, named by what the sensing receiver
sees next to ``Z``:

* ``"z"``  -- only ``Z`` (blind estimation),
* ``"uz"`` -- the decoded auxiliary ``U`` and ``Z`` (partial decoding),
* ``"xz"`` -- the channel input ``X`` and ``Z`` (full decoding, or the genie).

Each estimator minimizes posterior expected distortion cell by cell. Ties go
to the smallest state index; observation cells of probability zero get the
prior Bayes act so every table is total.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, conditional_marginals
from .errors import DimMismatch, IncompleteTable, TooLarge
from .prob import JointPmf, marginalize, validate_pmf

KINDS = ("z", "uz", "xz")
_OBS_AXES = {"z": ("Z",), "uz": ("U", "Z"), "xz": ("X", "Z")}
BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class EstimatorTable:
    """Deterministic map from an observation tuple to a state index.

    ``table`` has shape ``(nz,)``, ``(nu, nz)`` or ``(nx, nz)`` depending on
    ``kind``. ``conditional_costs`` holds ``c1(x)``, ``c*(u)`` or ``c(x)``
    respectively, and ``expected`` is the overall expected distortion.
    """

    kind: str
    table: np.ndarray
    conditional_costs: np.ndarray
    expected: float

    def __call__(self, *obs):
        return int(self.table[tuple(obs)])


def _check_d(d, ns: int) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.shape != (ns, ns):
        raise DimMismatch(f"distortion must be {ns}x{ns}, got {d.shape}")
    return d


def prior_act(p_s: np.ndarray, d: np.ndarray) -> int:
    """Bayes act with no observation: argmin over s' of sum_s P(s) d(s, s')."""
    return _first_argmin(d.T @ p_s)


def _first_argmin(risk: np.ndarray, axis: int = 0) -> np.ndarray:
    # near-ties (round-off) resolve to the smallest index
    best = risk.min(axis=axis, keepdims=True)
    scale = np.maximum(np.abs(best), 1.0)
    return np.argmax(risk <= best + 1e-14 * scale, axis=axis)


def bayes_table(p_s_obs: np.ndarray, d: np.ndarray, fallback: int) -> np.ndarray:
    """Posterior-risk minimizers for an unnormalized ``p[s, *obs]`` array.

    ``fallback`` is used for observation cells of zero mass.
    """
    ns = p_s_obs.shape[0]
    flat = p_s_obs.reshape(ns, -1)
    risk = d.T @ flat  # risk[s_hat, obs]
    table = _first_argmin(risk, axis=0).astype(np.int64)
    table[flat.sum(axis=0) <= 0] = fallback
    return table.reshape(p_s_obs.shape[1:])


def _conditional_cost(p_s_cond_obs: np.ndarray, table: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``sum_{s,z} p[s, c, z] d[s, table[c, z]]`` for each conditioning symbol c."""
    picked = d[:, table]  # [s, c, z]
    return (p_s_cond_obs * picked).sum(axis=(0, 2))


def estimator_uz(joint: JointPmf, d) -> EstimatorTable:
    """Optimal one-shot estimator from ``(U, Z)`` for a model joint over S,U,X,Y,Z."""
    if joint.names is None or set("SUZ") - set(joint.names):
        raise DimMismatch("joint must carry named axes S, U, Z")
    p_suz = marginalize(joint, ("S", "U", "Z")).probs
    ns = p_suz.shape[0]
    d = _check_d(d, ns)
    p_s = p_suz.sum(axis=(1, 2))
    fb = prior_act(p_s, d)
    table = bayes_table(p_suz, d, fb)
    p_u = p_suz.sum(axis=(0, 2))
    mass = _conditional_cost(p_suz, table, d)
    prior_risk = float((d.T @ p_s)[fb])
    costs = np.where(p_u > 0, mass / np.where(p_u > 0, p_u, 1.0), prior_risk)
    return EstimatorTable("uz", table, costs, float(mass.sum()))


def _check_px(channel: ChannelModel, p_x) -> np.ndarray:
    p_x = validate_pmf(p_x)
    if p_x.shape[0] != channel.nx:
        raise DimMismatch(f"input pmf has length {p_x.shape[0]}, channel has |X|={channel.nx}")
    return p_x


def estimator_z(channel: ChannelModel, p_x) -> EstimatorTable:
    """Blind estimator from ``Z`` alone; costs are ``c1(x)``."""
    p_x = _check_px(channel, p_x)
    _, pz = conditional_marginals(channel)
    d, p_s = channel.distortion, channel.state_pmf
    p_xsz = p_x[:, None, None] * p_s[None, :, None] * pz  # [x, s, z]
    fb = prior_act(p_s, d)
    table = bayes_table(p_xsz.sum(axis=0), d, fb)
    # c1(x) = E[d(S, s(Z)) | X = x], defined for every x through the kernel
    cond = p_s[:, None] * pz  # [x, s, z] given x
    costs = (cond * d[:, table][None, :, :]).sum(axis=(1, 2))
    return EstimatorTable("z", table, costs, float(p_x @ costs))


def estimator_xz(channel: ChannelModel, p_x) -> EstimatorTable:
    """Estimator from ``(X, Z)``; costs are ``c(x)``.

    The posterior ``P(s | x, z)`` does not involve ``P_X``, so the table is
    defined for every input symbol, including those with zero probability.
    """
    p_x = _check_px(channel, p_x)
    _, pz = conditional_marginals(channel)
    d, p_s = channel.distortion, channel.state_pmf
    cond = p_s[None, :, None] * pz  # [x, s, z] given x
    fb = prior_act(p_s, d)
    table = bayes_table(np.transpose(cond, (1, 0, 2)), d, fb)  # [x, z]
    costs = _conditional_cost(np.transpose(cond, (1, 0, 2)), table, d)
    return EstimatorTable("xz", table, costs, float(p_x @ costs))


def _obs_marginal(joint: JointPmf, kind: str) -> np.ndarray:
    if kind not in KINDS:
        raise ValueError(f"unknown estimator kind {kind!r}")
    return marginalize(joint, ("S",) + _OBS_AXES[kind]).probs


def expected_distortion(joint: JointPmf, est: EstimatorTable, d) -> float:
    """``E[d(S, s_hat(obs))]`` of a table under a model joint."""
    p = _obs_marginal(joint, est.kind)
    ns = p.shape[0]
    d = _check_d(d, ns)
    table = np.asarray(est.table)
    if table.shape != p.shape[1:]:
        raise IncompleteTable(f"table shape {table.shape} does not cover observations {p.shape[1:]}")
    if not np.issubdtype(table.dtype, np.integer) or table.min() < 0 or table.max() >= ns:
        raise IncompleteTable("table entries must be state indices in [0, |S|)")
    return float((p * d[:, table]).sum())


def brute_force_best_estimator(joint: JointPmf, kind: str, d, limit: int = BRUTE_FORCE_LIMIT):
    """Enumerate every deterministic table of ``kind`` and return the best one.

    Returns ``(EstimatorTable, expected_distortion)``. Among equally good
    tables the lexicographically smallest wins.
    """
    p = _obs_marginal(joint, kind)
    ns = p.shape[0]
    d = _check_d(d, ns)
    obs_shape = p.shape[1:]
    n_obs = int(np.prod(obs_shape))
    if float(ns) ** n_obs > limit:
        raise TooLarge(f"{ns}^{n_obs} tables exceed the limit {limit}")
    flat = p.reshape(ns, n_obs)
    best_val, best_t = np.inf, None
    chunk = 1 << 15
    it = itertools.product(range(ns), repeat=n_obs)
    while True:
        block = np.array(list(itertools.islice(it, chunk)), dtype=np.int64).reshape(-1, n_obs)
        if block.shape[0] == 0:
            break
        # vals[t] = sum_{s,o} p[s,o] d[s, block[t,o]]
        vals = np.einsum("so,sto->t", flat, d[:, block])
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_t = float(vals[i]), block[i].copy()
    table = best_t.reshape(obs_shape)
    if kind == "z":
        costs = np.array([best_val])
    else:
        p_c = p.sum(axis=(0, 2))
        mass = _conditional_cost(p, table, d)
        costs = np.divide(mass, p_c, out=np.zeros_like(mass), where=p_c > 0)
    return EstimatorTable(kind, table, costs, best_val), best_val
