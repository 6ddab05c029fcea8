"""The two binary worked examples and their closed-form rate/distortion values.

Example 1 (non-degraded)::

    Y = S X,    Z = a S X + (X + N) mod 2

Example 2 (degraded)::

    Y = S X,    Z = a Y + (Y + N) mod 2

with ``S ~ Bernoulli(q)``, ``N ~ Bernoulli(e)`` and Hamming distortion. The
attenuation ``a`` only matters through the distinctness of the four output
symbols, so Z is indexed ``0, 1, a, a+1`` -> ``0, 1, 2, 3``.

The ``*_oracle`` functions evaluate the closed forms with scalar arithmetic.
They intentionally share no code with :mod:`isac_regions.prob` or
:mod:`isac_regions.regions`, so that agreement between the two is a real
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, validate_channel
from .errors import DomainError

Z_LABELS = ("0", "1", "a", "a+1")


@dataclass(frozen=True)
class ExampleParams:
    e: float
    q: float
    p: float = 0.5

    def __post_init__(self):
        _check_eq(self.e, self.q)
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")


def _check_eq(e: float, q: float) -> None:
    if not 0.0 <= e <= 1.0:
        raise DomainError(f"e must lie in [0, 1], got {e}")
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")


def _z_index(reflected: int, bsc_bit: int) -> int:
    return 2 * reflected + bsc_bit


def _build(e: float, q: float, degraded: bool) -> ChannelModel:
    _check_eq(e, q)
    kernel = np.zeros((2, 2, 2, 4))
    for x in (0, 1):
        for s in (0, 1):
            y = s * x
            for n, pn in ((0, 1.0 - e), (1, e)):
                base = y if degraded else x
                kernel[x, s, y, _z_index(s * x, (base + n) % 2)] += pn
    labels = {"x": ("0", "1"), "s": ("0", "1"), "y": ("0", "1"), "z": Z_LABELS}
    return validate_channel(ChannelModel(np.array([1.0 - q, q]), kernel, None, labels))


def make_example1(e: float, q: float) -> ChannelModel:
    """Non-degraded example: the BSC part of Z is driven by X."""
    return _build(e, q, degraded=False)


def make_example2(e: float, q: float) -> ChannelModel:
    """Degraded example: Z is a noisy relabeling of Y."""
    return _build(e, q, degraded=True)


# ---------------------------------------------------------------------------
# closed forms


def _h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _h(ps) -> float:
    return -sum(v * math.log2(v) for v in ps if v > 0.0)


def _check_pp(pp) -> np.ndarray:
    pp = np.asarray(pp, dtype=float)
    if pp.ndim != 2 or pp.shape[1] != 2:
        raise DomainError("p_jk must be a (|U|, 2) array of joint probabilities p(u=j, x=k)")
    if pp.min() < 0.0 or abs(pp.sum() - 1.0) > 1e-9:
        raise DomainError("p_jk must be nonnegative and sum to 1")
    return pp


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")


def _rate_y_given_us(pp: np.ndarray, q: float) -> float:
    # I(X;Y|U,S) = q sum_j p_uj H2(p_j0 / p_uj)
    total = 0.0
    for pj0, pj1 in pp:
        puj = pj0 + pj1
        if puj > 0.0:
            total += puj * _h2(pj0 / puj)
    return q * total


def _rate_u_z(pp: np.ndarray, z_given_x0, z_given_x1) -> float:
    # I(U;Z) with p(u=j, z) = sum_k p(z | x=k) p_jk
    puz = [[pj0 * a + pj1 * b for a, b in zip(z_given_x0, z_given_x1)] for pj0, pj1 in pp]
    pz = [sum(row[i] for row in puz) for i in range(4)]
    total = 0.0
    for row in puz:
        pu = sum(row)
        for i, v in enumerate(row):
            if v > 0.0:
                total += v * math.log2(v / (pu * pz[i]))
    return max(total, 0.0)


def _ex1_z_given_x(e: float, q: float):
    eb, qb = 1.0 - e, 1.0 - q
    return (eb, e, 0.0, 0.0), (qb * e, qb * eb, q * e, q * eb)


def _ex2_z_given_x(e: float, q: float):
    eb, qb = 1.0 - e, 1.0 - q
    return (eb, e, 0.0, 0.0), (qb * eb, qb * e, q * e, q * eb)


def _posterior_error(num: float, den: float) -> float:
    """Conditional error probability of a binary MAP decision.

    ``num / den`` is the posterior of s=1; s=1 is chosen only when strictly
    larger than one half, matching the smallest-index tie rule.
    """
    if den <= 0.0:
        return 0.0
    post1 = num / den
    return 1.0 - post1 if post1 > 0.5 else post1


def corollary3_oracle(pp, e: float, q: float) -> tuple[float, float]:
    """Example 1, partial decoding: effective sum rate and distortion."""
    pp = _check_pp(pp)
    _check_eq(e, q)
    eb, qb = 1.0 - e, 1.0 - q
    p = float(pp[:, 0].sum())
    rate = _rate_y_given_us(pp, q) + _rate_u_z(pp, *_ex1_z_given_x(e, q))
    r_eff = min(q * _h2(p), rate)
    d = 0.0
    for pj0, pj1 in pp:
        # z = 0 and z = 1 cells; z in {a, a+1} reveals s = 1
        den0 = eb * pj0 + qb * e * pj1
        den1 = e * pj0 + qb * eb * pj1
        d += den0 * _posterior_error(q * eb * pj0, den0)
        d += den1 * _posterior_error(q * e * pj0, den1)
    return r_eff, d


def corollary4_oracle(p: float, e: float, q: float) -> tuple[float, float]:
    """Example 1, blind estimation: ``R = q H2(p)`` and ``D = d11 + d12``."""
    _check_p(p)
    _check_eq(e, q)
    pb, eb, qb = 1.0 - p, 1.0 - e, 1.0 - q
    pz0 = p * eb + qb * pb * e
    pz1 = p * e + qb * pb * eb
    d11 = qb * (pb * e + p * eb) if pz0 > 0 and q * p * eb / pz0 > 0.5 else q * p * eb
    d12 = qb * (pb * eb + p * e) if pz1 > 0 and q * p * e / pz1 > 0.5 else q * p * e
    return q * _h2(p), d11 + d12


def example1_mutual_xz(p: float, e: float, q: float) -> float:
    """``I(X;Z)`` for Example 1 via the output probabilities p_i and p_i1."""
    pb, eb, qb = 1.0 - p, 1.0 - e, 1.0 - q
    p_i = (p * e + qb * pb * eb, p * eb + qb * pb * e, pb * q * e, pb * q * eb)
    p_i1 = (qb * eb, qb * e, q * e, q * eb)
    return max(_h(p_i) - p * _h2(e) - pb * _h(p_i1), 0.0)


def corollary5_oracle(p: float, e: float, q: float) -> tuple[float, float]:
    """Example 1, full decoding: ``C = min{q H2(p), I(X;Z)}``, ``D = p min{q, 1-q}``."""
    _check_p(p)
    _check_eq(e, q)
    return min(q * _h2(p), example1_mutual_xz(p, e, q)), p * min(q, 1.0 - q)


def corollary6_oracle(pp, e: float, q: float) -> tuple[float, float]:
    """Example 1, genie-aided outer bound: the partial strategy's rate with ``D = p min{q, 1-q}``."""
    r_eff, _ = corollary3_oracle(pp, e, q)
    p = float(_check_pp(pp)[:, 0].sum())
    return r_eff, p * min(q, 1.0 - q)


def example2_mutual_xz(p: float, e: float, q: float) -> float:
    pb, eb, qb = 1.0 - p, 1.0 - e, 1.0 - q
    p_1i = (pb * q * e, pb * q * eb, (p + pb * qb) * eb, (p + pb * qb) * e)
    p_2i = (qb * eb, qb * e, q * e, q * eb)
    return max(_h(p_1i) - (p * _h2(e) + pb * _h(p_2i)), 0.0)


def example2_oracles(strategy: str, e: float, q: float, p: float | None = None, pp=None) -> tuple[float, float]:
    """Closed-form (rate, distortion) for Example 2.

    ``strategy`` is ``"blind"`` or ``"full"`` (needs ``p``) or ``"partial"``
    (needs the joint table ``pp``).
    """
    _check_eq(e, q)
    qb = 1.0 - q
    if strategy == "blind":
        _check_p(p)
        post0 = qb / (p + qb * (1.0 - p))
        return q * _h2(p), (q * p if post0 >= 0.5 else qb)
    if strategy == "full":
        _check_p(p)
        return example2_mutual_xz(p, e, q), p * min(q, 1.0 - q)
    if strategy == "partial":
        pp = _check_pp(pp)
        rate = _rate_y_given_us(pp, q) + _rate_u_z(pp, *_ex2_z_given_x(e, q))
        d = 0.0
        for pj0, pj1 in pp:
            den = pj0 + qb * pj1
            if den > 0 and q * pj0 / den > 0.5:
                d += qb * (pj0 + pj1)
            else:
                d += q * pj0
        return rate, d
    raise DomainError(f"unknown strategy {strategy!r}")
