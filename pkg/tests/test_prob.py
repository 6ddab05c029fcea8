import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from isac_regions.errors import BadAxes, DimMismatch, DomainError, InvalidKernel, MassMismatch, NegativeMass, OverlappingGroups
from isac_regions.prob import (
    JointPmf,
    assemble_joint,
    binary_entropy,
    conditional_entropy,
    entropy,
    marginalize,
    mutual_information,
    validate_pmf,
)


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def random_joint(seed, shape):
    rng = np.random.default_rng(seed)
    a = rng.exponential(size=shape)
    return JointPmf(a / a.sum())


joints = st.builds(random_joint, st.integers(0, 2**32 - 1), st.sampled_from([(2, 2, 2), (2, 3, 2), (3, 2, 4), (2, 2, 3)]))


class TestValidatePmf:
    def test_normalizes_and_freezes(self):
        p = validate_pmf([0.25, 0.75])
        np.testing.assert_allclose(p, [0.25, 0.75])
        assert not p.flags.writeable

    def test_clamps_tiny_negatives(self):
        p = validate_pmf([-1e-12, 1.0 + 1e-12])
        assert p[0] == 0.0
        assert p.sum() == pytest.approx(1.0, abs=1e-15)

    def test_negative_mass(self):
        with pytest.raises(NegativeMass):
            validate_pmf([-0.1, 1.1])

    def test_mass_mismatch(self):
        with pytest.raises(MassMismatch):
            validate_pmf([0.5, 0.6])

    def test_empty(self):
        with pytest.raises(DimMismatch):
            validate_pmf([])


class TestEntropy:
    def test_uniform(self):
        assert entropy(np.full(8, 1 / 8)) == pytest.approx(3.0)

    def test_point_mass_is_zero(self):
        assert entropy([0.0, 1.0, 0.0]) == 0.0

    def test_binary_entropy_value(self):
        assert binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)
        assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0

    def test_binary_entropy_domain(self):
        with pytest.raises(DomainError):
            binary_entropy(1.5)


class TestMutualInformation:
    def test_bsc_uniform_input(self):
        # I(X;Y) = 1 - H2(e) for a BSC with uniform input
        e = 0.11
        j = JointPmf(np.array([[0.5 * (1 - e), 0.5 * e], [0.5 * e, 0.5 * (1 - e)]]), ("X", "Y"))
        assert mutual_information(j, "X", "Y") == pytest.approx(1 - h2(e), abs=1e-12)

    def test_independent_is_zero(self):
        j = JointPmf(np.outer([0.3, 0.7], [0.2, 0.5, 0.3]))
        assert mutual_information(j, 0, 1) == pytest.approx(0.0, abs=1e-15)

    def test_xor_conditional(self):
        # X, Z fair bits, Y = X xor Z: I(X;Y) = 0 but I(X;Y|Z) = 1
        p = np.zeros((2, 2, 2))
        for x in (0, 1):
            for z in (0, 1):
                p[x, x ^ z, z] = 0.25
        j = JointPmf(p, ("X", "Y", "Z"))
        assert mutual_information(j, "X", "Y") == pytest.approx(0.0, abs=1e-15)
        assert mutual_information(j, "X", "Y", "Z") == pytest.approx(1.0, abs=1e-15)

    def test_overlapping_groups(self):
        j = random_joint(0, (2, 2, 2))
        with pytest.raises(OverlappingGroups):
            mutual_information(j, 0, (0, 1))

    def test_bad_axis(self):
        j = JointPmf(np.full((2, 2), 0.25), ("A", "B"))
        with pytest.raises(BadAxes):
            mutual_information(j, "A", "Q")
        with pytest.raises(BadAxes):
            mutual_information(j, 0, 5)

    @settings(max_examples=60, deadline=None)
    @given(joints)
    def test_nonnegative_and_symmetric(self, j):
        a = mutual_information(j, 0, 1, 2)
        b = mutual_information(j, 1, 0, 2)
        assert a >= 0.0
        assert a == pytest.approx(b, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(joints)
    def test_chain_rule(self, j):
        # I(A; B,C) = I(A;C) + I(A;B|C)
        lhs = mutual_information(j, 0, (1, 2))
        rhs = mutual_information(j, 0, 2) + mutual_information(j, 0, 1, 2)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(joints)
    def test_entropy_identity(self, j):
        # I(A;B) = H(A) - H(A|B)
        lhs = mutual_information(j, 0, 1)
        rhs = entropy(marginalize(j, (0,))) - conditional_entropy(j, 0, 1)
        assert lhs == pytest.approx(rhs, abs=1e-12)


class TestMarginalize:
    def test_order_follows_keep(self):
        j = random_joint(3, (2, 3, 4))
        m = marginalize(j, (2, 0))
        np.testing.assert_allclose(m.probs, j.probs.sum(axis=1).T)

    def test_names_carry(self):
        j = JointPmf(np.full((2, 3), 1 / 6), ("A", "B"))
        m = marginalize(j, ("B",))
        assert m.names == ("B",)
        np.testing.assert_allclose(m.probs, [1 / 3] * 3)

    @settings(max_examples=40, deadline=None)
    @given(arrays(float, (2, 3, 2), elements=st.floats(0.01, 1.0)))
    def test_mass_preserved(self, a):
        j = JointPmf.from_array(a / a.sum())
        assert marginalize(j, (1,)).probs.sum() == pytest.approx(1.0, abs=1e-12)


class TestAssembleJoint:
    def _kernel(self):
        k = np.zeros((2, 2, 2, 2))
        k[:, :, 0, 0] = 0.5
        k[:, :, 1, 1] = 0.5
        return k

    def test_axes_and_factorization(self):
        pux = np.array([[0.1, 0.2], [0.3, 0.4]])
        ps = np.array([0.6, 0.4])
        k = np.random.default_rng(1).exponential(size=(2, 2, 3, 2))
        k /= k.sum(axis=(2, 3), keepdims=True)
        j = assemble_joint(pux, ps, k)
        assert j.names == ("S", "U", "X", "Y", "Z")
        assert j.probs[1, 0, 1, 2, 0] == pytest.approx(pux[0, 1] * ps[1] * k[1, 1, 2, 0])
        assert j.probs.sum() == pytest.approx(1.0, abs=1e-14)

    def test_bad_kernel_row(self):
        k = self._kernel()
        k[1, 0] *= 2
        with pytest.raises(InvalidKernel):
            assemble_joint(np.full((1, 2), 0.5), [0.5, 0.5], k)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            assemble_joint(np.full((1, 3), 1 / 3), [0.5, 0.5], self._kernel())

    def test_mass_mismatch(self):
        with pytest.raises(MassMismatch):
            assemble_joint(np.full((1, 2), 0.6), [0.5, 0.5], self._kernel())
