"""State-dependent two-receiver broadcast channel model.

A :class:`ChannelModel` holds the state pmf ``P_S``, the kernel
``P(y, z | x, s)`` indexed ``[x, s, y, z]`` and a distortion matrix
``d[s, s_hat]``. Channels can be read from and written to a small JSON
document (see :func:`load_channel`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, InvalidDistortion, InvalidKernel, MassMismatch, NegativeMass, ParseError
from .prob import PMF_TOL, validate_pmf

AXIS_NAMES = ("x", "s", "y", "z")
DEGRADED_TOL = 1e-7


def hamming(n: int) -> np.ndarray:
    return 1.0 - np.eye(n)


@dataclass(frozen=True)
class ChannelModel:
    state_pmf: np.ndarray
    kernel: np.ndarray
    distortion: np.ndarray = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        ps = np.array(self.state_pmf, dtype=float)
        k = np.array(self.kernel, dtype=float)
        d = hamming(ps.shape[0]) if self.distortion is None else np.array(self.distortion, dtype=float)
        for a in (ps, k, d):
            a.setflags(write=False)
        object.__setattr__(self, "state_pmf", ps)
        object.__setattr__(self, "kernel", k)
        object.__setattr__(self, "distortion", d)
        object.__setattr__(self, "labels", {k_: tuple(v) for k_, v in (self.labels or {}).items()})

    @property
    def nx(self) -> int:
        return self.kernel.shape[0]

    @property
    def ns(self) -> int:
        return self.kernel.shape[1]

    @property
    def ny(self) -> int:
        return self.kernel.shape[2]

    @property
    def nz(self) -> int:
        return self.kernel.shape[3]

    @property
    def d_max(self) -> float:
        return float(self.distortion.max())

    def label(self, axis: str, i: int) -> str:
        names = self.labels.get(axis)
        return names[i] if names else str(i)

    def __eq__(self, other):
        if not isinstance(other, ChannelModel):
            return NotImplemented
        return (
            self.kernel.shape == other.kernel.shape
            and np.array_equal(self.state_pmf, other.state_pmf)
            and np.array_equal(self.kernel, other.kernel)
            and np.array_equal(self.distortion, other.distortion)
            and self.labels == other.labels
        )

    __hash__ = None


@dataclass(frozen=True)
class DegradednessVerdict:
    is_degraded: bool
    witness_kernel: np.ndarray | None
    residual: float


def validate_channel(c: ChannelModel) -> ChannelModel:
    """Check shapes, kernel rows, state pmf and distortion entries.

    Returns ``c`` unchanged when every check passes.
    """
    if c.kernel.ndim != 4:
        raise DimMismatch(f"kernel must be 4-D [x][s][y][z], got shape {c.kernel.shape}")
    if c.state_pmf.ndim != 1 or c.state_pmf.shape[0] != c.ns:
        raise DimMismatch(f"state_pmf has length {c.state_pmf.size}, kernel expects {c.ns}")
    if c.distortion.shape != (c.ns, c.ns):
        raise DimMismatch(f"distortion must be {c.ns}x{c.ns}, got {c.distortion.shape}")
    for axis, names in c.labels.items():
        size = {"x": c.nx, "s": c.ns, "y": c.ny, "z": c.nz}.get(axis)
        if size is None or len(names) != size:
            raise DimMismatch(f"labels for axis {axis!r} do not match its alphabet")
    try:
        validate_pmf(c.state_pmf, PMF_TOL)
    except (NegativeMass, MassMismatch) as exc:
        raise InvalidKernel(f"state_pmf: {exc}") from None
    for x in range(c.nx):
        for s in range(c.ns):
            try:
                validate_pmf(c.kernel[x, s].ravel(), PMF_TOL)
            except (NegativeMass, MassMismatch) as exc:
                raise InvalidKernel(f"kernel slice (x={x}, s={s}): {exc}") from None
    if not np.all(np.isfinite(c.distortion)) or np.any(c.distortion < 0):
        raise InvalidDistortion("distortion entries must be finite and nonnegative")
    return c


def conditional_marginals(c: ChannelModel) -> tuple[np.ndarray, np.ndarray]:
    """Return ``P(y|x,s)`` as ``[x,s,y]`` and ``P(z|x,s)`` as ``[x,s,z]``."""
    return c.kernel.sum(axis=3), c.kernel.sum(axis=2)


def project_rows_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(v)
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    k = np.arange(1, n + 1)
    cond = u - css / k > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _fit_stochastic_factor(A: np.ndarray, B: np.ndarray, max_iter: int, tol: float) -> np.ndarray:
    """Least-squares fit of a row-stochastic K with ``A @ K ~ B``.

    Accelerated projected gradient with adaptive restart; stops once the
    max-norm residual falls below ``tol`` or the iterates stall.
    """
    ny, nz = A.shape[1], B.shape[1]
    AtA, AtB = A.T @ A, A.T @ B
    L = max(np.linalg.eigvalsh(AtA).max(), 1e-12)
    K = np.full((ny, nz), 1.0 / nz)
    V, t = K.copy(), 1.0
    f_prev = np.inf
    for _ in range(max_iter):
        grad = AtA @ V - AtB
        K_new = project_rows_to_simplex(V - grad / L)
        R = A @ K_new - B
        f = float((R * R).sum())
        if f > f_prev:
            # restart momentum
            V, t = K.copy(), 1.0
            f_prev = np.inf
            continue
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        V = K_new + ((t - 1.0) / t_new) * (K_new - K)
        step = np.abs(K_new - K).max()
        K, t, f_prev = K_new, t_new, f
        if np.abs(R).max() <= tol or step < 1e-15:
            break
    return K


def check_degraded(c: ChannelModel, tol: float = DEGRADED_TOL, max_iter: int = 20000) -> DegradednessVerdict:
    """Decide whether Z is a stochastically degraded version of Y.

    Looks for a row-stochastic ``K[y, z]`` with
    ``sum_y P(y|x,s) K[y,z] = P(z|x,s)`` for every ``(x, s, z)``. The verdict
    is positive iff the max-norm residual of the best fit is ``<= tol``.
    """
    py, pz = conditional_marginals(c)
    A = py.reshape(-1, c.ny)
    B = pz.reshape(-1, c.nz)
    K = _fit_stochastic_factor(A, B, max_iter, tol / 10.0)
    residual = float(np.abs(A @ K - B).max())
    ok = residual <= tol
    K.setflags(write=False)
    return DegradednessVerdict(ok, K if ok else None, residual)


def dump_channel(c: ChannelModel) -> str:
    """Serialize ``c`` to the JSON channel format."""
    doc = {
        "alphabet_sizes": {"x": c.nx, "s": c.ns, "y": c.ny, "z": c.nz},
        "state_pmf": c.state_pmf.tolist(),
        "kernel": c.kernel.tolist(),
        "distortion": c.distortion.tolist(),
    }
    if c.labels:
        doc["labels"] = {k: list(v) for k, v in c.labels.items()}
    return json.dumps(doc, indent=2)


def _rect_array(value, name: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name!r} is not a rectangular numeric array: {exc}") from None
    if arr.ndim != ndim:
        raise ParseError(f"{name!r} must be a {ndim}-level nested array, got {arr.ndim} levels")
    return arr


def load_channel(text: str) -> ChannelModel:
    """Parse a JSON channel description and validate the resulting model."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("alphabet_sizes", "state_pmf", "kernel"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    sizes = doc["alphabet_sizes"]
    if not isinstance(sizes, dict) or any(not isinstance(sizes.get(a), int) or sizes[a] < 1 for a in AXIS_NAMES):
        raise ParseError("alphabet_sizes must map x, s, y, z to positive integers")
    ps = _rect_array(doc["state_pmf"], "state_pmf", 1)
    kernel = _rect_array(doc["kernel"], "kernel", 4)
    expected = tuple(sizes[a] for a in AXIS_NAMES)
    if kernel.shape != expected:
        raise DimMismatch(f"kernel shape {kernel.shape} disagrees with alphabet_sizes {expected}")
    dist = None
    if doc.get("distortion") is not None:
        dist = _rect_array(doc["distortion"], "distortion", 2)
    labels = doc.get("labels") or {}
    if not isinstance(labels, dict) or not all(isinstance(v, list) for v in labels.values()):
        raise ParseError("labels must map axis names to arrays of strings")
    c = ChannelModel(ps, kernel, dist, {k: [str(s) for s in v] for k, v in labels.items()})
    return validate_channel(c)
