"""Self-check suites run by ``isac-regions verify``.

Each suite returns a list of :class:`Check` records; a suite passes when
every record does.

``corollaries``
    Closed-form example values against the generic evaluators.
``estimators``
    Bayes estimators against exhaustive search, and the ordering
    ``D(x,z) <= D(u,z) <= D(z)``.
``degraded``
    Degradedness verdicts on both examples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import examples as ex
from .channel import ChannelModel, check_degraded, validate_channel
from .estimators import brute_force_best_estimator, estimator_uz, estimator_xz, estimator_z
from .prob import assemble_joint
from .regions import evaluate_blind, evaluate_full, evaluate_outer, evaluate_partial

SUITES = ("corollaries", "estimators", "degraded")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.value:.3e} (tolerance {self.tolerance:.1e})"


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_simplex(rng: np.random.Generator, shape) -> np.ndarray:
    e = rng.exponential(size=shape)
    return e / e.sum()


def random_channel(rng: np.random.Generator, nx: int, ns: int, ny: int, nz: int) -> ChannelModel:
    """Channel with uniformly random state pmf and kernel rows, Hamming distortion."""
    kernel = rng.exponential(size=(nx, ns, ny, nz))
    kernel /= kernel.sum(axis=(2, 3), keepdims=True)
    return validate_channel(ChannelModel(random_simplex(rng, ns), kernel))


def sample_example_params(rng: np.random.Generator):
    e = float(rng.uniform(0.0, 1.0))
    q = float(rng.uniform(0.01, 0.99))
    p = float(rng.uniform(0.0, 1.0))
    pp = random_simplex(rng, (3, 2))
    return e, q, p, pp


def _gap(a, b) -> float:
    return float(np.max(np.abs(np.subtract(a, b))))


def corollary_checks(samples: int, seed: int, tol: float = 1e-9) -> list[Check]:
    """Oracle against generic evaluation for every closed form."""
    rng = _rng(seed)
    worst = {k: 0.0 for k in ("example1/partial", "example1/blind", "example1/full", "example1/outer", "example2/blind", "example2/full", "example2/partial")}
    for _ in range(samples):
        e, q, p, pp = sample_example_params(rng)
        c1, c2 = ex.make_example1(e, q), ex.make_example2(e, q)
        px = np.array([p, 1.0 - p])
        gp = evaluate_partial(c1, pp)
        worst["example1/partial"] = max(worst["example1/partial"], _gap(ex.corollary3_oracle(pp, e, q), (gp.r_effective, gp.d)))
        gb = evaluate_blind(c1, px)
        worst["example1/blind"] = max(worst["example1/blind"], _gap(ex.corollary4_oracle(p, e, q), (gb.r_effective, gb.d)))
        gf = evaluate_full(c1, px)
        worst["example1/full"] = max(worst["example1/full"], _gap(ex.corollary5_oracle(p, e, q), (gf.r_effective, gf.d)))
        go = evaluate_outer(c1, pp)
        worst["example1/outer"] = max(worst["example1/outer"], _gap(ex.corollary6_oracle(pp, e, q), (go.r_effective, go.d)))
        b2 = evaluate_blind(c2, px)
        worst["example2/blind"] = max(worst["example2/blind"], _gap(ex.example2_oracles("blind", e, q, p=p), (b2.r_effective, b2.d)))
        f2 = evaluate_full(c2, px)
        worst["example2/full"] = max(worst["example2/full"], _gap(ex.example2_oracles("full", e, q, p=p), (f2.r0, f2.d)))
        p2 = evaluate_partial(c2, pp)
        worst["example2/partial"] = max(worst["example2/partial"], _gap(ex.example2_oracles("partial", e, q, pp=pp), (p2.r0 + p2.r1, p2.d)))
    return [Check(k, v, tol, v <= tol) for k, v in worst.items()]


def estimator_checks(samples: int, seed: int, tol: float = 1e-12) -> list[Check]:
    """Exhaustive-search optimality and the information ordering."""
    rng = _rng(seed)
    brute = order = 0.0
    for i in range(samples):
        nz = 2 + i % 2
        c = random_channel(rng, 2, 2, 2, nz)
        pux = random_simplex(rng, (2, 2))
        j = assemble_joint(pux, c.state_pmf, c.kernel)
        ests = {"uz": estimator_uz(j, c.distortion), "z": estimator_z(c, pux.sum(axis=0)), "xz": estimator_xz(c, pux.sum(axis=0))}
        for kind, est in ests.items():
            _, best = brute_force_best_estimator(j, kind, c.distortion)
            brute = max(brute, abs(best - est.expected))
        d_xz, d_uz, d_z = ests["xz"].expected, ests["uz"].expected, ests["z"].expected
        order = max(order, d_xz - d_uz, d_uz - d_z)
    return [
        Check("estimator vs exhaustive search", brute, tol, brute <= tol),
        Check("ordering D(x,z) <= D(u,z) <= D(z), worst violation", max(order, 0.0), tol, order <= tol),
    ]


def degraded_checks(samples: int, seed: int, tol: float = 1e-7) -> list[Check]:
    """Example 2 is degraded with an exact witness; Example 1 is not."""
    rng = _rng(seed)
    witness_err = 0.0
    wrong = 0
    for _ in range(samples):
        e, q = float(rng.uniform(0.05, 0.45)), float(rng.uniform(0.05, 0.95))
        v2 = check_degraded(ex.make_example2(e, q))
        v1 = check_degraded(ex.make_example1(e, q))
        wrong += (not v2.is_degraded) + v1.is_degraded
        if v2.is_degraded:
            c = ex.make_example2(e, q)
            py, pz = c.kernel.sum(axis=3), c.kernel.sum(axis=2)
            witness_err = max(witness_err, float(np.abs(py @ v2.witness_kernel - pz).max()))
    return [
        Check("wrong degradedness verdicts", float(wrong), 0.0, wrong == 0),
        Check("witness reproduction error", witness_err, tol, witness_err <= tol),
    ]


def run_suite(name: str, samples: int, seed: int) -> list[Check]:
    if name == "corollaries":
        return corollary_checks(samples, seed)
    if name == "estimators":
        return estimator_checks(samples, seed)
    if name == "degraded":
        return degraded_checks(samples, seed)
    if name == "all":
        return [chk for s in SUITES for chk in run_suite(s, samples, seed)]
    raise ValueError(f"unknown suite {name!r}")
