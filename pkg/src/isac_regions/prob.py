"""Exact finite-alphabet probability arithmetic.

Everything here works on dense numpy arrays; alphabets in this problem are
tiny, so there is no sparse path. Logarithms are base 2 throughout and the
convention ``0 log 0 = 0`` is applied by skipping zero cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BadAxes, DimMismatch, DomainError, InvalidKernel, MassMismatch, NegativeMass, OverlappingGroups

PMF_TOL = 1e-9
JOINT_TOL = 1e-8

# axis order of every assembled model joint
MODEL_AXES = ("S", "U", "X", "Y", "Z")

Axis = Union[int, str]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def validate_pmf(raw, tol: float = PMF_TOL) -> np.ndarray:
    """Check that ``raw`` is a probability vector and return a normalized copy.

    Entries in ``[-tol, 0)`` are clamped to zero before renormalizing. The
    returned array is read-only.

    Raises
    ------
    NegativeMass
        If an entry is below ``-tol``.
    MassMismatch
        If the entries do not sum to one within ``tol``.
    """
    p = np.asarray(raw, dtype=float).ravel()
    if p.size == 0:
        raise DimMismatch("empty probability vector")
    if not np.all(np.isfinite(p)):
        raise MassMismatch("non-finite probability entry")
    if np.any(p < -tol):
        raise NegativeMass(f"entry {p.min():.3g} below -{tol:g}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise MassMismatch(f"mass {total:.12g} differs from 1 by more than {tol:g}")
    p = np.clip(p, 0.0, None)
    return _frozen(p / p.sum())


def binary_entropy(p: float) -> float:
    """H2(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary_entropy needs p in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def xlogx(a: np.ndarray) -> np.ndarray:
    """Elementwise ``a * log2(a)`` with zeros mapped to zero."""
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    pos = a > 0
    out[pos] = a[pos] * np.log2(a[pos])
    return out


def entropy(p) -> float:
    """Shannon entropy in bits of a pmf or of a joint array (all cells)."""
    if isinstance(p, JointPmf):
        p = p.probs
    return float(max(0.0, -xlogx(np.asarray(p, dtype=float)).sum()))


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf with optional axis names.

    ``probs`` has one axis per variable; ``names`` (if given) labels them so
    that callers can refer to axes as ``"X"`` rather than ``2``.
    """

    probs: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        probs = _frozen(self.probs)
        object.__setattr__(self, "probs", probs)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != probs.ndim or len(set(names)) != len(names):
                raise DimMismatch(f"names {names} do not match a {probs.ndim}-axis array")
            object.__setattr__(self, "names", names)

    @classmethod
    def from_array(cls, arr, names=None, tol: float = PMF_TOL) -> "JointPmf":
        """Validate ``arr`` as a joint pmf (nonnegative, unit mass) and wrap it."""
        a = np.asarray(arr, dtype=float)
        flat = validate_pmf(a.ravel(), tol)
        return cls(flat.reshape(a.shape), names)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    def axis(self, ax: Axis) -> int:
        if isinstance(ax, str):
            if self.names is None or ax not in self.names:
                raise BadAxes(f"unknown axis name {ax!r}")
            return self.names.index(ax)
        ax = int(ax)
        if not 0 <= ax < self.ndim:
            raise BadAxes(f"axis {ax} out of range for {self.ndim} axes")
        return ax

    def axes(self, group) -> tuple[int, ...]:
        if group is None:
            return ()
        if isinstance(group, (int, str, np.integer)):
            group = (group,)
        out = tuple(self.axis(g) for g in group)
        if len(set(out)) != len(out):
            raise BadAxes(f"repeated axis in {group!r}")
        return out


def assemble_joint(p_ux, p_s, kernel, tol: float = JOINT_TOL) -> JointPmf:
    """Build the model joint ``P(s,u,x,y,z) = P_UX(u,x) P_S(s) P(y,z|x,s)``.

    ``kernel`` is indexed ``[x, s, y, z]``. The result uses the axis order
    S, U, X, Y, Z.
    """
    p_ux = p_ux.probs if isinstance(p_ux, JointPmf) else np.asarray(p_ux, dtype=float)
    p_s = np.asarray(p_s, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    if p_ux.ndim != 2 or p_s.ndim != 1 or kernel.ndim != 4:
        raise DimMismatch("expected p_ux[u,x], p_s[s] and kernel[x,s,y,z]")
    if kernel.shape[0] != p_ux.shape[1] or kernel.shape[1] != p_s.shape[0]:
        raise DimMismatch(f"kernel shape {kernel.shape} inconsistent with |X|={p_ux.shape[1]}, |S|={p_s.shape[0]}")
    rows = kernel.reshape(kernel.shape[0] * kernel.shape[1], -1)
    for i, row in enumerate(rows):
        try:
            validate_pmf(row, PMF_TOL)
        except (NegativeMass, MassMismatch) as exc:
            x, s = divmod(i, kernel.shape[1])
            raise InvalidKernel(f"kernel row (x={x}, s={s}): {exc}") from None
    joint = np.einsum("ux,s,xsyz->suxyz", p_ux, p_s, kernel)
    total = joint.sum()
    if abs(total - 1.0) > tol:
        raise MassMismatch(f"assembled joint has mass {total:.12g}")
    return JointPmf(joint, MODEL_AXES)


def marginalize(j: JointPmf, keep: Sequence[Axis]) -> JointPmf:
    """Sum out every axis not in ``keep``; kept axes appear in ``keep`` order."""
    idx = j.axes(tuple(keep))
    drop = tuple(a for a in range(j.ndim) if a not in idx)
    m = j.probs.sum(axis=drop) if drop else j.probs
    # remaining axes are in ascending order; permute to the requested order
    order = sorted(idx)
    m = np.transpose(m, [order.index(a) for a in idx]) if idx else np.asarray(m)
    names = tuple(j.names[a] for a in idx) if j.names is not None else None
    return JointPmf(m, names)


def mutual_information(j: JointPmf, a, b, c=()) -> float:
    """Conditional mutual information ``I(A; B | C)`` in bits.

    Each group is an axis (index or name) or a sequence of axes; ``c`` may be
    empty. Cells with zero probability are skipped, and tiny negative
    round-off is clamped to zero.
    """
    ga, gb, gc = j.axes(a), j.axes(b), j.axes(c)
    if not ga or not gb:
        raise BadAxes("groups A and B must be non-empty")
    if set(ga) & set(gb) or set(ga) & set(gc) or set(gb) & set(gc):
        raise OverlappingGroups(f"groups {ga}, {gb}, {gc} overlap")
    pabc = marginalize(j, ga + gb + gc).probs
    na, nb = len(ga), len(gb)
    pac = pabc.sum(axis=tuple(range(na, na + nb)), keepdims=True)
    pbc = pabc.sum(axis=tuple(range(na)), keepdims=True)
    pc = pabc.sum(axis=tuple(range(na + nb)), keepdims=True)
    num = pabc * pc
    den = pac * pbc
    pos = pabc > 0
    terms = pabc[pos] * np.log2(np.broadcast_to(num, pabc.shape)[pos] / np.broadcast_to(den, pabc.shape)[pos])
    val = float(terms.sum())
    return max(0.0, val)


def conditional_entropy(j: JointPmf, a, c=()) -> float:
    """``H(A | C)`` in bits."""
    ga, gc = j.axes(a), j.axes(c)
    if set(ga) & set(gc):
        raise OverlappingGroups(f"groups {ga}, {gc} overlap")
    h_ac = entropy(marginalize(j, ga + gc))
    h_c = entropy(marginalize(j, gc)) if gc else 0.0
    return max(0.0, h_ac - h_c)
