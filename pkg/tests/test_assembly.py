import math

import numpy as np
import pytest

from pseudofermion.assembly import assemble, global_resolution_check


class TestAssemble:
    def test_trivial_tower(self):
        ops = assemble(0.5, 0)
        assert ops.total_dim == 1
        np.testing.assert_allclose(ops.A, [[0.0]], atol=1e-15, rtol=0)
        np.testing.assert_allclose(ops.B, [[0.0]], atol=1e-15, rtol=0)
        report = global_resolution_check(ops)
        assert report.resolution_residual <= 1e-12

    def test_block_sizes_and_offsets(self):
        ops = assemble(0.5, 4)
        assert ops.total_dim == 1 + 2 + 3 + 4 + 5
        assert ops.offsets == (0, 1, 3, 6, 10)
        assert [s.level for s in ops.block_systems] == [0, 1, 2, 3, 4]

    def test_number_operator_action(self):
        ops = assemble(0.5, 3)
        for level in range(4):
            for k in range(level + 1):
                h = ops.h_vector(level, k)
                np.testing.assert_allclose(ops.N @ h, k * h, atol=1e-10, rtol=0)
                e = ops.e_vector(level, k)
                np.testing.assert_allclose(
                    ops.N_sharp @ e, k * e, atol=1e-10, rtol=0
                )
        assert ops.action_residual <= 1e-10

    def test_ladder_action_across_tower(self):
        ops = assemble(0.4, 3)
        for level in range(4):
            for k in range(level + 1):
                h = ops.h_vector(level, k)
                down = math.sqrt(k) * ops.h_vector(level, k - 1) if k else 0.0 * h
                np.testing.assert_allclose(ops.A @ h, down, atol=1e-10, rtol=0)
                up = (
                    math.sqrt(k + 1) * ops.h_vector(level, k + 1)
                    if k < level
                    else 0.0 * h
                )
                np.testing.assert_allclose(ops.B @ h, up, atol=1e-10, rtol=0)

    def test_projections(self):
        ops = assemble(0.6, 3)
        total = np.zeros((ops.total_dim, ops.total_dim), dtype=complex)
        for i, p in enumerate(ops.projections):
            np.testing.assert_allclose(p @ p, p, atol=1e-10, rtol=0)
            np.testing.assert_allclose(p, p.conj().T, atol=1e-12, rtol=0)
            np.testing.assert_allclose(p @ ops.A, ops.A @ p, atol=1e-10, rtol=0)
            for j, q in enumerate(ops.projections):
                if i != j:
                    np.testing.assert_allclose(
                        p @ q, np.zeros_like(p), atol=1e-10, rtol=0
                    )
            total += p
        np.testing.assert_allclose(total, np.eye(ops.total_dim), atol=1e-10, rtol=0)

    def test_orthonormal_limit(self):
        ops = assemble(0.0, 3)
        np.testing.assert_allclose(
            ops.S_h_global, np.eye(ops.total_dim), atol=1e-12, rtol=0
        )
        np.testing.assert_allclose(
            ops.S_e_global, np.eye(ops.total_dim), atol=1e-12, rtol=0
        )
        np.testing.assert_allclose(ops.B, ops.A.conj().T, atol=1e-12, rtol=0)

    def test_fixture_mode(self):
        ops = assemble(0.5, 2, mode="fixture")
        assert ops.mode == "fixture"
        assert ops.action_residual <= 1e-10
        report = global_resolution_check(ops)
        assert report.resolution_residual <= 1e-10

    def test_fixture_mode_limits(self):
        with pytest.raises(ValueError):
            assemble(0.5, 3, mode="fixture")
        with pytest.raises(ValueError):
            assemble(0.5 + 0.1j, 2, mode="fixture")
        with pytest.raises(ValueError):
            assemble(0.5, 2, mode="qr")

    def test_vector_range_checks(self):
        ops = assemble(0.5, 2)
        with pytest.raises(ValueError):
            ops.h_vector(3, 0)
        with pytest.raises(ValueError):
            ops.h_vector(1, 2)
        with pytest.raises(ValueError):
            ops.e_vector(-1, 0)


class TestResolutionReport:
    @pytest.mark.parametrize("gamma", [0.3, 0.9])
    def test_resolution_of_identity(self, gamma):
        report = global_resolution_check(assemble(gamma, 4))
        assert report.resolution_residual <= 1e-10

    def test_intertwining_on_basis(self):
        report = global_resolution_check(assemble(0.9, 4))
        assert report.intertwining_residual <= 1e-8

    def test_metric_norm_growth(self):
        report = global_resolution_check(assemble(0.5, 6))
        norms = np.asarray(report.s_h_block_norms)
        assert norms.shape == (7,)
        assert np.all(np.diff(norms) > 0)
        np.testing.assert_allclose(norms, 1.5 ** np.arange(7.0), atol=0, rtol=1e-10)
        duals = np.asarray(report.s_e_block_norms)
        np.testing.assert_allclose(duals, 2.0 ** np.arange(7.0), atol=0, rtol=1e-10)

    def test_condition_number_growth(self):
        report = global_resolution_check(assemble(0.9, 4))
        conds = np.asarray(report.s_h_block_conditions)
        np.testing.assert_allclose(conds, 19.0 ** np.arange(5.0), atol=0, rtol=1e-8)
