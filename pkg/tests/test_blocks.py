"""Block construction, eigendecomposition, and multiplicity checks."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tcmode.blocks import (absorption_block, clear_block_cache, diagonalize,
                           eigensystem, emission_block, multiplicity,
                           multiplicity_table, TCBlock)
from tcmode.errors import ParameterError

SQ2 = math.sqrt(2.0)
SQ6 = math.sqrt(6.0)


class TestMultiplicity:
    def test_two_tlm_symmetric_sector(self):
        assert multiplicity(2, 1) == 1

    def test_four_tlm_r1(self):
        # 4! * 3 / (4! * 1!) = 3, cross-checked by the sum rule below
        assert multiplicity(4, 1) == 3

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 12])
    def test_top_sector_always_one(self, n):
        assert multiplicity(n, Fraction(n, 2)) == 1

    @pytest.mark.parametrize("n", range(1, 21))
    def test_sum_rule_exact(self, n):
        table = multiplicity_table(n)
        total = sum(p * (2 * r + 1) for r, p in table.values.items())
        assert total == 2 ** n

    @pytest.mark.parametrize("n,r", [(2, 2), (2, 0.4), (3, 1), (4, -1),
                                     (0, 0), (5, 3)])
    def test_invalid_pairings(self, n, r):
        with pytest.raises(ParameterError):
            multiplicity(n, r)


class TestBlockConstruction:
    def test_single_tlm_vacuum(self):
        b = emission_block(1, 0, 0.0)
        assert b.dim == 2
        np.testing.assert_allclose(b.diag, [0.0, 0.0])
        np.testing.assert_allclose(b.offdiag, [1.0])

    def test_two_tlm_vacuum_matrix(self):
        b = emission_block(2, 0, 0.0)
        np.testing.assert_allclose(b.offdiag, [SQ2, 2.0], atol=1e-15)

    def test_emission_shape(self):
        b = emission_block(5, 7, 0.3)
        assert b.dim == 6
        assert b.n_min == 7
        assert b.r == 2.5 and b.c == 9.5
        np.testing.assert_allclose(b.diag, -0.3 * np.arange(7, 13))

    def test_absorption_vacuum_is_trivial(self):
        b = absorption_block(100, 0, 0.0)
        assert b.dim == 1
        np.testing.assert_allclose(b.diag, [0.0])

    def test_absorption_single_excitation_matches_emission(self):
        up = emission_block(1, 0, 0.0)
        down = absorption_block(1, 1, 0.0)
        assert (up.two_r, up.two_c) == (down.two_r, down.two_c)
        np.testing.assert_array_equal(up.matrix(), down.matrix())

    def test_absorption_dim(self):
        assert absorption_block(3, 2, 0.0).dim == 3
        assert absorption_block(3, 7, 0.0).n_min == 4
        assert absorption_block(2, 50, 0.0).dim == 3

    def test_offdiag_positive(self):
        for n in range(6):
            b = absorption_block(4, n + 1, -2.0)
            assert np.all(b.offdiag > 0)

    @pytest.mark.parametrize("bad", [0, -3])
    def test_bad_n_tlm(self, bad):
        with pytest.raises(ParameterError):
            emission_block(bad, 0, 0.0)
        with pytest.raises(ParameterError):
            absorption_block(bad, 1, 0.0)

    def test_negative_photon_number(self):
        with pytest.raises(ParameterError):
            emission_block(1, -1, 0.0)


class TestDiagonalize:
    def test_two_by_two_exact(self):
        eig = diagonalize(emission_block(1, 0, 0.0))
        np.testing.assert_allclose(eig.q, [-1.0, 1.0], atol=1e-15)
        inv = 1.0 / SQ2
        np.testing.assert_allclose(eig.A, [[inv, inv], [-inv, inv]],
                                   atol=1e-15)

    def test_three_by_three_analytic(self):
        # characteristic polynomial lambda (lambda^2 - 6) = 0
        eig = diagonalize(emission_block(2, 0, 0.0))
        np.testing.assert_allclose(eig.q, [-SQ6, 0.0, SQ6], atol=1e-14)

    def test_single_tlm_frequencies(self):
        for n in range(12):
            eig = diagonalize(emission_block(1, n, 0.0))
            root = math.sqrt(n + 1.0)
            np.testing.assert_allclose(eig.q, [-root, root], atol=1e-13)

    def test_dim_one(self):
        eig = diagonalize(absorption_block(5, 0, 1.5))
        np.testing.assert_array_equal(eig.q, [0.0])
        np.testing.assert_array_equal(eig.A, [[1.0]])

    def test_deterministic(self):
        a = diagonalize(emission_block(9, 14, 0.8))
        b = diagonalize(emission_block(9, 14, 0.8))
        assert np.array_equal(a.q, b.q)
        assert np.array_equal(a.A, b.A)

    def test_sign_convention(self):
        eig = diagonalize(emission_block(12, 3, -1.2))
        for j in range(eig.A.shape[1]):
            col = eig.A[:, j]
            first = col[np.abs(col) > 0][0]
            assert first > 0

    def test_cache_read_through(self):
        clear_block_cache()
        one = eigensystem(3, 2, 0.5, "emission")
        two = eigensystem(3, 2, 0.5, "emission")
        assert one is two
        clear_block_cache()
        three = eigensystem(3, 2, 0.5, "emission")
        assert three is not one
        np.testing.assert_array_equal(one.q, three.q)

    def test_cache_rejects_unknown_mode(self):
        with pytest.raises(ParameterError):
            eigensystem(3, 2, 0.5, "sideways")


def random_blocks(count, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n_tlm = int(rng.integers(1, 51))
        n = int(rng.integers(0, 201))
        beta = float(rng.uniform(-10.0, 10.0))
        build = emission_block if rng.random() < 0.5 else absorption_block
        yield build(n_tlm, n, beta)


class TestEigenInvariants:
    def test_orthonormality_completeness_trace(self):
        for block in random_blocks(120):
            eig = diagonalize(block)
            dim = block.dim
            eye = np.eye(dim)
            assert np.max(np.abs(eig.A.T @ eig.A - eye)) < 1e-12 * dim
            assert np.max(np.abs(eig.A @ eig.A.T - eye)) < 1e-12 * dim
            expected = -block.detuning * (block.n_min * dim
                                          + dim * (dim - 1) / 2.0)
            scale = max(1.0, abs(expected), np.abs(eig.q).max(initial=1.0))
            assert abs(eig.q.sum() - expected) < 1e-11 * dim * scale

    def test_resonance_spectrum_symmetric(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            n_tlm = int(rng.integers(1, 41))
            n = int(rng.integers(0, 120))
            eig = diagonalize(emission_block(n_tlm, n, 0.0))
            np.testing.assert_allclose(eig.q, -eig.q[::-1], atol=1e-12 * (
                1.0 + np.abs(eig.q).max()))

    def test_negated_diagonal_negates_spectrum(self):
        # eigenvalues of the block with negated diagonal equal the negated,
        # reversed eigenvalues of the original: a pure matrix identity.
        for beta in (0.7, -2.5, 9.0):
            block = emission_block(6, 4, beta)
            flipped = TCBlock(n_tlm=block.n_tlm, two_r=block.two_r,
                              two_c=block.two_c, n_min=block.n_min,
                              diag=-block.diag, offdiag=block.offdiag,
                              detuning=-beta)
            q = diagonalize(block).q
            qf = diagonalize(flipped).q
            np.testing.assert_allclose(qf, -q[::-1],
                                       atol=1e-12 * (1 + np.abs(q).max()))
