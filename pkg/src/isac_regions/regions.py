"""Rate-distortion tuples for the decode-and-estimate strategies.

For a channel and an input distribution, each ``evaluate_*`` function returns
a :class:`RegionPoint` holding the three rate bounds and the expected
distortion of the matching one-shot estimator:

=========  ==========================  ============================  ==================
strategy   common rate ``r0``          private rate ``r1``           estimator
=========  ==========================  ============================  ==================
partial    I(U;Z)                      I(X;Y|U,S)                    s*(u, z)
outer      I(U;Z)                      I(X;Y|U,S)                    s*(x, z) (genie)
degraded   I(U;Z)                      I(X;Y|U,S)                    s*(u, z)
blind      0                           I(X;Y|S)                      s*(z)
full       min{I(X;Y|S), I(X;Z)}       0                             s*(x, z)
=========  ==========================  ============================  ==================

The sum-rate bound ``r_sum = I(X;Y|S)`` applies to every strategy except
``degraded``, where it is implied by the other two.

The scalar functions go through :mod:`isac_regions.prob`. The search code
uses :func:`batch_evaluate`, a vectorized re-derivation of the same terms;
the test suite keeps the two in agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel, check_degraded, conditional_marginals
from .errors import DimMismatch, DomainError, NotDegraded
from .estimators import estimator_uz, estimator_xz, estimator_z
from .prob import JointPmf, assemble_joint, mutual_information, validate_pmf, xlogx

STRATEGIES = ("blind", "partial", "full", "outer", "degraded")


@dataclass(frozen=True)
class JointInputDistribution:
    """Joint pmf of the auxiliary U and the channel input X, indexed ``[u, x]``."""

    probs: np.ndarray

    def __post_init__(self):
        a = np.array(self.probs, dtype=float)
        if a.ndim != 2:
            raise DimMismatch(f"P_UX must be 2-D [u, x], got shape {a.shape}")
        a = validate_pmf(a.ravel()).reshape(a.shape)
        object.__setattr__(self, "probs", a)

    @property
    def nu(self) -> int:
        return self.probs.shape[0]

    @property
    def nx(self) -> int:
        return self.probs.shape[1]

    @property
    def p_x(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    @classmethod
    def constant(cls, p_x) -> "JointInputDistribution":
        """Trivial auxiliary: ``|U| = 1``."""
        return cls(np.asarray(p_x, dtype=float)[None, :])

    @classmethod
    def copy_of_input(cls, p_x) -> "JointInputDistribution":
        """``U = X``."""
        return cls(np.diag(np.asarray(p_x, dtype=float)))

    def check_cardinality(self, allow_large: bool = False) -> None:
        if not allow_large and self.nu > self.nx + 1:
            raise DomainError(f"|U| = {self.nu} exceeds |X| + 1 = {self.nx + 1}")


@dataclass(frozen=True)
class RegionPoint:
    """Rate bounds and distortion for one input distribution.

    ``r_sum`` is ``None`` for the degraded strategy.
    """

    r0: float
    r1: float
    r_sum: float | None
    d: float
    strategy: str
    witness: np.ndarray = field(repr=False, default=None)

    @property
    def r_effective(self) -> float:
        """Largest total rate ``R0 + R1`` the three bounds allow."""
        total = self.r0 + self.r1
        return total if self.r_sum is None else min(total, self.r_sum)


def _as_pux(c: ChannelModel, p_ux) -> JointInputDistribution:
    if not isinstance(p_ux, JointInputDistribution):
        p_ux = JointInputDistribution(p_ux)
    if p_ux.nx != c.nx:
        raise DimMismatch(f"P_UX has |X|={p_ux.nx}, channel has |X|={c.nx}")
    return p_ux


def _joint(c: ChannelModel, p_ux: JointInputDistribution) -> JointPmf:
    return assemble_joint(p_ux.probs, c.state_pmf, c.kernel)


def _rates(j: JointPmf) -> tuple[float, float, float]:
    r0 = mutual_information(j, "U", "Z")
    r1 = mutual_information(j, "X", "Y", ("U", "S"))
    r_sum = mutual_information(j, "X", "Y", "S")
    return r0, r1, r_sum


def evaluate_partial(c: ChannelModel, p_ux) -> RegionPoint:
    p_ux = _as_pux(c, p_ux)
    j = _joint(c, p_ux)
    r0, r1, r_sum = _rates(j)
    d = estimator_uz(j, c.distortion).expected
    return RegionPoint(r0, r1, r_sum, d, "partial", p_ux.probs)


def evaluate_outer(c: ChannelModel, p_ux) -> RegionPoint:
    """Genie-aided bound: same rates as partial, estimator sees X."""
    p_ux = _as_pux(c, p_ux)
    j = _joint(c, p_ux)
    r0, r1, r_sum = _rates(j)
    d = estimator_xz(c, p_ux.p_x).expected
    return RegionPoint(r0, r1, r_sum, d, "outer", p_ux.probs)


def evaluate_blind(c: ChannelModel, p_x) -> RegionPoint:
    p_x = validate_pmf(p_x)
    j = _joint(c, JointInputDistribution.constant(p_x))
    r = mutual_information(j, "X", "Y", "S")
    d = estimator_z(c, p_x).expected
    return RegionPoint(0.0, r, r, d, "blind", p_x)


def evaluate_full(c: ChannelModel, p_x) -> RegionPoint:
    p_x = validate_pmf(p_x)
    j = _joint(c, JointInputDistribution.constant(p_x))
    r_sum = mutual_information(j, "X", "Y", "S")
    r0 = min(r_sum, mutual_information(j, "X", "Z"))
    d = estimator_xz(c, p_x).expected
    return RegionPoint(r0, 0.0, r_sum, d, "full", p_x)


def evaluate_degraded(c: ChannelModel, p_ux, verdict=None) -> RegionPoint:
    """Capacity-region tuple of a degraded channel; raises if Z is not degraded."""
    verdict = verdict if verdict is not None else check_degraded(c)
    if not verdict.is_degraded:
        raise NotDegraded(f"Z is not a degraded version of Y (residual {verdict.residual:.3g})")
    p = evaluate_partial(c, p_ux)
    return RegionPoint(p.r0, p.r1, None, p.d, "degraded", p.witness)


def evaluate(c: ChannelModel, strategy: str, dist) -> RegionPoint:
    """Dispatch on ``strategy``; ``dist`` is P_X for blind/full and P_UX otherwise."""
    if strategy == "blind":
        return evaluate_blind(c, dist)
    if strategy == "full":
        return evaluate_full(c, dist)
    if strategy == "partial":
        return evaluate_partial(c, dist)
    if strategy == "outer":
        return evaluate_outer(c, dist)
    if strategy == "degraded":
        return evaluate_degraded(c, dist)
    raise DomainError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# vectorized evaluation, used by the frontier search


@dataclass(frozen=True)
class BatchTerms:
    r0: np.ndarray
    r1: np.ndarray
    r_sum: np.ndarray
    i_xz: np.ndarray
    d_uz: np.ndarray
    d_xz: np.ndarray
    d_z: np.ndarray


def _bayes_risk(p_s_obs: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Minimum expected distortion for ``p[b, s, obs...]``, summed over obs."""
    risk = np.einsum("bso,st->bto", p_s_obs.reshape(p_s_obs.shape[0], p_s_obs.shape[1], -1), d)
    return risk.min(axis=1).sum(axis=1)


def batch_terms(c: ChannelModel, P: np.ndarray) -> BatchTerms:
    """All rate and distortion terms for a stack of ``P_UX`` arrays ``[b, u, x]``."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 3 or P.shape[2] != c.nx:
        raise DimMismatch(f"expected P[b, u, x] with |X|={c.nx}, got {P.shape}")
    py, pz = conditional_marginals(c)  # [x,s,y], [x,s,z]
    ps, d = c.state_pmf, c.distortion
    px = P.sum(axis=1)  # [b, x]
    pu = P.sum(axis=2)  # [b, u]

    # H(Y|X,S) and H(Y|S)
    h_y_xs = -xlogx(py).sum(axis=2)  # [x, s]
    h_y_given_xs = np.einsum("bx,s,xs->b", px, ps, h_y_xs)
    p_sy = np.einsum("bx,xsy->bsy", px, py)  # P(y|s) per s
    h_y_given_s = -(ps[None, :] * xlogx(p_sy).sum(axis=2)).sum(axis=1)
    r_sum = h_y_given_s - h_y_given_xs

    # H(Y|U,S) from the joint P(u, s, y) = sum_x P(u,x) P(s) P(y|x,s)
    p_usy = np.einsum("bux,s,xsy->busy", P, ps, py)
    h_usy = -xlogx(p_usy).sum(axis=(1, 2, 3))
    h_us = -xlogx(pu).sum(axis=1) - xlogx(ps).sum()
    r1 = (h_usy - h_us) - h_y_given_xs

    # I(U;Z) and I(X;Z)
    pz_x = np.einsum("s,xsz->xz", ps, pz)
    p_uz = np.einsum("bux,xz->buz", P, pz_x)
    p_z = p_uz.sum(axis=1)
    h_z = -xlogx(p_z).sum(axis=1)
    r0 = h_z - (-xlogx(p_uz).sum(axis=(1, 2)) + xlogx(pu).sum(axis=1))
    p_xz = px[:, :, None] * pz_x[None]
    i_xz = h_z - (-xlogx(p_xz).sum(axis=(1, 2)) + xlogx(px).sum(axis=1))

    # distortions of the three estimators
    p_suz = np.einsum("bux,s,xsz->bsuz", P, ps, pz)
    p_sxz = np.einsum("bx,s,xsz->bsxz", px, ps, pz)
    d_uz = _bayes_risk(p_suz, d)
    d_xz = _bayes_risk(p_sxz, d)
    d_z = _bayes_risk(p_sxz.sum(axis=2), d)

    clip = lambda a: np.maximum(a, 0.0)  # noqa: E731
    return BatchTerms(clip(r0), clip(r1), clip(r_sum), clip(i_xz), d_uz, d_xz, d_z)


def batch_evaluate(c: ChannelModel, strategy: str, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective total rate and distortion for each ``P[b]`` under ``strategy``.

    For ``blind`` and ``full`` only the X-marginal of each ``P[b]`` is used.
    """
    t = batch_terms(c, P)
    if strategy == "blind":
        return t.r_sum, t.d_z
    if strategy == "full":
        return np.minimum(t.r_sum, t.i_xz), t.d_xz
    if strategy == "partial":
        return np.minimum(t.r0 + t.r1, t.r_sum), t.d_uz
    if strategy == "outer":
        return np.minimum(t.r0 + t.r1, t.r_sum), t.d_xz
    if strategy == "degraded":
        return t.r0 + t.r1, t.d_uz
    raise DomainError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# baselines


@dataclass(frozen=True)
class Segment:
    name: str
    start: tuple[float, float]
    end: tuple[float, float]  # (D, R)

    def rate_at(self, d: float) -> float:
        (d0, r0), (d1, r1) = self.start, self.end
        if d >= d1:
            return r1
        return r0 + (r1 - r0) * (d - d0) / (d1 - d0)


def max_rate_input(c: ChannelModel, tol: float = 1e-13, max_iter: int = 100000) -> np.ndarray:
    """Input pmf maximizing ``I(X;Y|S)`` by Blahut-Arimoto.

    Since X and S are independent, ``I(X;Y|S) = I(X; Y,S)``, i.e. the capacity
    of the channel ``x -> (y, s)`` with law ``P_S(s) P(y|x,s)``.
    """
    py, _ = conditional_marginals(c)
    W = (c.state_pmf[None, :, None] * py).reshape(c.nx, -1)  # [x, (s,y)]
    p = np.full(c.nx, 1.0 / c.nx)
    for _ in range(max_iter):
        out = p @ W
        with np.errstate(divide="ignore", invalid="ignore"):
            logratio = np.where(W > 0, np.log2(W / out[None, :]), 0.0)
        div = (W * logratio).sum(axis=1)  # D(W(.|x) || out) in bits
        lower, upper = float(p @ div), float(div.max())
        if upper - lower < tol:
            break
        p = p * np.exp2(div)
        p /= p.sum()
    return p


def time_sharing_baselines(c: ChannelModel) -> tuple[Segment, Segment]:
    """Time-sharing (TS) and improved time-sharing (ITS) lines in the (D, R) plane.

    TS alternates pure communication (rate ``R_max``, estimator = best
    constant guess) with pure sensing (distortion 0 at rate 0). ITS keeps the
    rate-maximizing input and lets the sensing receiver estimate from Z with
    the trivial auxiliary, i.e. the partial-decoding distortion of that input.
    """
    p_star = max_rate_input(c)
    point = evaluate_partial(c, JointInputDistribution.constant(p_star))
    r_max = point.r_effective
    d, ps = c.distortion, c.state_pmf
    d_const = float((d.T @ ps).min())
    ts = Segment("TS", (0.0, 0.0), (d_const, r_max))
    its = Segment("ITS", (0.0, 0.0), (point.d, r_max))
    return ts, its


# ---------------------------------------------------------------------------
# equivalence of the three superposition regions


@dataclass
class EquivalenceReport:
    n_samples: int
    max_defect: float
    tolerance: float
    corner_counts: dict
    worst_witness: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        return self.max_defect <= self.tolerance


def _info_terms(c: ChannelModel, P: np.ndarray) -> dict:
    j = assemble_joint(P, c.state_pmf, c.kernel)
    return {
        "uz": mutual_information(j, "U", "Z"),
        "xy_us": mutual_information(j, "X", "Y", ("U", "S")),
        "xy_s": mutual_information(j, "X", "Y", "S"),
        "uy_s": mutual_information(j, "U", "Y", "S"),
    }


def _c_defect(c: ChannelModel, P: np.ndarray, r0: float, r1: float) -> float:
    """How far ``(r0, r1)`` sits outside the pentagon C(U, X) for joint ``P``."""
    t = _info_terms(c, P)
    return max(0.0, r0 - min(t["uz"], t["uy_s"]), r1 - t["xy_us"])


def b_corner_witnesses(c: ChannelModel, P: np.ndarray):
    """Corner points of region B(U, X) with the joints that place them inside C.

    Yields ``(case, (r0, r1), P_witness)`` tuples. The witnesses follow the
    standard argument: a trivial auxiliary for the ``R0 = 0`` corner, ``U = X``
    for the ``R1 = 0`` corner, and either ``U`` itself or a Bernoulli
    time-share between ``U`` and ``X`` for the remaining corner.
    """
    P = np.asarray(P, dtype=float)
    t = _info_terms(c, P)
    p_x = P.sum(axis=0)
    nu, nx = P.shape
    r1 = min(t["xy_s"], t["xy_us"] + t["uz"])
    yield "r0=0", (0.0, r1), p_x[None, :]
    r0 = min(t["uz"], t["xy_s"])
    yield "r1=0", (r0, 0.0), np.diag(p_x)
    if t["uz"] <= t["xy_s"]:
        corner = (t["uz"], min(t["xy_us"], t["xy_s"] - t["uz"]))
        if t["uy_s"] >= t["uz"]:
            yield "inner", corner, P
        else:
            # (1 - alpha) I(X;Y|S) + alpha I(U;Y|S) = I(U;Z)
            alpha = (t["xy_s"] - t["uz"]) / (t["xy_s"] - t["uy_s"])
            alpha = min(max(alpha, 0.0), 1.0)
            W = np.zeros((nx + nu, nx))
            W[:nx] = (1.0 - alpha) * np.diag(p_x)
            W[nx:] = alpha * P
            yield "time-share", corner, W


def region_equivalence_check(c: ChannelModel, n_samples: int, seed: int, tol: float = 5e-3, nu: int | None = None) -> EquivalenceReport:
    """Sample ``P_UX`` and check that every corner of B(U, X) lies in C.

    Also checks the trivial inclusion of the A-pentagon corners in B. The
    report carries the largest containment defect in bits.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    nu = nu or c.nx + 1
    counts: dict = {}
    worst, worst_P = 0.0, None
    for _ in range(n_samples):
        P = rng.exponential(size=(nu, c.nx))
        P /= P.sum()
        for case, (r0, r1), W in b_corner_witnesses(c, P):
            counts[case] = counts.get(case, 0) + 1
            defect = _c_defect(c, W, r0, r1)
            if defect > worst:
                worst, worst_P = defect, P
        # A(U,X) corners satisfy the B constraints by construction
        t = _info_terms(c, P)
        a_r0 = min(t["uz"], t["xy_s"])
        a_r1 = min(t["xy_us"], t["xy_s"] - a_r0)
        b_defect = max(0.0, a_r0 + a_r1 - min(t["xy_us"] + t["uz"], t["xy_s"]))
        worst = max(worst, b_defect)
    return EquivalenceReport(n_samples, worst, tol, counts, worst_P)
