"""Monte Carlo checks of the analytic distortions and information terms.

Samples of ``(S, U, X, Y, Z)`` are drawn i.i.d. from the assembled model
joint by inverse-CDF lookup on its flattened cells. Randomness comes from
numpy's Philox counter-based generator: draws are produced in fixed blocks
of ``BLOCK`` samples, block ``i`` using the stream ``Philox(seed)`` advanced
by ``i`` jumps. Blocks are independent and their counts are merged by
addition, so the result does not depend on how blocks are spread over
threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel
from .errors import DomainError
from .estimators import KINDS, estimator_uz, estimator_xz, estimator_z
from .prob import JointPmf, MODEL_AXES, assemble_joint, mutual_information
from .regions import JointInputDistribution

BLOCK = 1 << 18


@dataclass(frozen=True)
class SampleConfig:
    """Sample count, seed and the estimator applied by :func:`empirical_distortion`."""

    n: int
    seed: int = 0
    estimator_kind: str = "uz"
    threads: int = 1

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError(f"sample count must be >= 1, got {self.n}")
        if self.estimator_kind not in KINDS:
            raise DomainError(f"estimator_kind must be one of {KINDS}, got {self.estimator_kind!r}")
        if self.threads < 1:
            raise DomainError("threads must be positive")


def _as_pux(p_ux) -> JointInputDistribution:
    if isinstance(p_ux, JointInputDistribution):
        return p_ux
    a = np.asarray(p_ux, dtype=float)
    return JointInputDistribution(a[None, :] if a.ndim == 1 else a)


def _block_counts(cdf: np.ndarray, last: int, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed).jumped(block))
    u = rng.random(size) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), last)
    return np.bincount(idx, minlength=cdf.size)


def sample_joint(c: ChannelModel, p_ux, cfg: SampleConfig) -> np.ndarray:
    """Counts of ``cfg.n`` i.i.d. draws over the cells ``[s, u, x, y, z]``."""
    joint = assemble_joint(_as_pux(p_ux).probs, c.state_pmf, c.kernel)
    flat = joint.probs.ravel()
    cdf = np.cumsum(flat)
    last = int(np.flatnonzero(flat > 0)[-1])
    n = int(cfg.n)
    sizes = [min(BLOCK, n - i) for i in range(0, n, BLOCK)]
    work = [(cdf, last, cfg.seed, b, s) for b, s in enumerate(sizes)]
    if cfg.threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            parts = list(ex.map(lambda a: _block_counts(*a), work))
    else:
        parts = [_block_counts(*a) for a in work]
    counts = np.sum(parts, axis=0)
    return counts.reshape(joint.dims)


def _estimator(c: ChannelModel, p_ux: JointInputDistribution, kind: str):
    if kind == "z":
        return estimator_z(c, p_ux.p_x)
    if kind == "xz":
        return estimator_xz(c, p_ux.p_x)
    return estimator_uz(assemble_joint(p_ux.probs, c.state_pmf, c.kernel), c.distortion)


def analytic_distortion(c: ChannelModel, p_ux, kind: str) -> float:
    """Expected distortion of the optimal estimator of ``kind``."""
    return _estimator(c, _as_pux(p_ux), kind).expected


def empirical_distortion(c: ChannelModel, p_ux, cfg: SampleConfig) -> tuple[float, float]:
    """Mean sampled distortion of the analytic estimator and its standard error.

    The standard error is ``sqrt(var / n)`` with ``var`` the sample variance
    of the per-draw distortion (for Hamming distortion this is the binomial
    error).
    """
    p_ux = _as_pux(p_ux)
    est = _estimator(c, p_ux, cfg.estimator_kind)
    counts = sample_joint(c, p_ux, cfg)  # [s, u, x, y, z]
    obs = {"z": (4,), "uz": (1, 4), "xz": (2, 4)}[cfg.estimator_kind]
    keep = (0,) + obs
    drop = tuple(a for a in range(5) if a not in keep)
    cnt = counts.sum(axis=drop)  # [s, *obs]
    per_cell = c.distortion[:, est.table]  # [s, *obs]
    n = int(cfg.n)
    total = float((cnt * per_cell).sum())
    mean = total / n
    if n < 2:
        return mean, 0.0
    sq = float((cnt * per_cell**2).sum())
    var = max(sq - n * mean * mean, 0.0) / (n - 1)
    return mean, float(np.sqrt(var / n))


def empirical_mutual_information(c: ChannelModel, p_ux, cfg: SampleConfig, groups) -> float:
    """Plug-in estimate of ``I(A; B | C)`` from sampled counts.

    ``groups`` is ``(a, b)`` or ``(a, b, c)`` with axis names from S, U, X,
    Y, Z. The plug-in estimator is biased upward by roughly
    ``(cells - 1) / (2 n ln 2)`` bits.
    """
    counts = sample_joint(c, p_ux, cfg)
    emp = JointPmf(counts / counts.sum(), MODEL_AXES)
    return mutual_information(emp, *groups)
