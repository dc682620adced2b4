"""
Tests for the analytic references.
"""

import cmath

import numpy as np
import pytest

from src.enzgrid.constants import C0
from src.enzgrid.oracle import (
    CoincidentPointsError,
    OracleError,
    drude_fwhm_limit,
    green_reference,
    slab_flux_balance,
    transfer_matrix_slab,
    transfer_matrix_stack,
    vacuum_green_2d,
    vacuum_self_green_imag,
)

# kR = 1 at R = 1 um
OMEGA = C0 / 1e-6


class TestGreen2D:
    """Tests for the vacuum dyadic Green function."""

    def test_perpendicular_decay_at_kr_one(self):
        """8 Im G_perp at kR = 1 is J0(1) - J1(1)."""
        g = vacuum_green_2d((0.0, 0.0), (1e-6, 0.0), OMEGA)
        assert 8 * g[1, 1].imag == pytest.approx(0.6502941, abs=1e-6)

    def test_perpendicular_shift_at_kr_one(self):
        """-4 Re G_perp at kR = 1 is Y0(1) - Y1(1)."""
        g = vacuum_green_2d((0.0, 0.0), (1e-6, 0.0), OMEGA)
        assert -4 * g[1, 1].real == pytest.approx(0.8694698, abs=1e-6)

    def test_parallel_decay_at_kr_one(self):
        """8 Im G_par at kR = 1 is 2 J1(1)."""
        g = vacuum_green_2d((0.0, 0.0), (1e-6, 0.0), OMEGA)
        assert 8 * g[0, 0].imag == pytest.approx(2 * 0.4400506, abs=1e-6)

    def test_symmetric(self):
        """G is a symmetric tensor and reciprocal under r1 <-> r2."""
        r1, r2 = (0.2e-6, -0.1e-6), (1.3e-6, 0.7e-6)
        g = vacuum_green_2d(r1, r2, OMEGA)
        np.testing.assert_allclose(g, g.T, atol=1e-15)
        np.testing.assert_allclose(g, vacuum_green_2d(r2, r1, OMEGA), atol=1e-15)

    def test_rotation(self):
        """Separation along y swaps the xx and yy components."""
        gx = vacuum_green_2d((0.0, 0.0), (1e-6, 0.0), OMEGA)
        gy = vacuum_green_2d((0.0, 0.0), (0.0, 1e-6), OMEGA)
        assert gx[0, 0] == pytest.approx(gy[1, 1])
        assert gx[1, 1] == pytest.approx(gy[0, 0])

    def test_self_limit(self):
        """Im G tends to 1/8 as the points merge."""
        g = vacuum_green_2d((0.0, 0.0), (1e-12, 0.0), OMEGA)
        assert g[1, 1].imag == pytest.approx(vacuum_self_green_imag()[1, 1], rel=1e-6)

    def test_coincident_points(self):
        """r1 == r2 raises CoincidentPointsError."""
        with pytest.raises(CoincidentPointsError):
            vacuum_green_2d((1e-6, 1e-6), (1e-6, 1e-6), OMEGA)

    def test_non_positive_omega(self):
        """A non-positive frequency is rejected."""
        with pytest.raises(ValueError):
            vacuum_green_2d((0.0, 0.0), (1e-6, 0.0), 0.0)

    def test_reference_record(self):
        """green_reference wraps the tensor with units."""
        result = green_reference((0.0, 0.0), (1e-6, 0.0), OMEGA)
        data = result.to_dict()
        assert data['units'] == "1/m"
        assert data['value']['im'][1][1] == pytest.approx(0.6502941 / 8, abs=1e-7)


class TestTransferMatrix:
    """Tests for planar transfer matrices."""

    def test_vacuum_slab(self):
        """An empty slab reflects nothing and only advances the phase."""
        r, t = transfer_matrix_slab(1.0, 2e-6, OMEGA)
        assert abs(r) < 1e-12
        assert t == pytest.approx(cmath.exp(1j * OMEGA / C0 * 2e-6))

    def test_lossless_conserves_flux(self):
        """|r|^2 + |t|^2 = 1 for a lossless slab."""
        assert slab_flux_balance(4.0, 0.3e-6, OMEGA) == pytest.approx(1.0, abs=1e-12)

    def test_lossy_absorbs(self):
        """A lossy slab absorbs part of the flux."""
        assert slab_flux_balance(4.0 + 0.5j, 0.3e-6, OMEGA) < 1.0

    def test_stack_matches_slab(self):
        """A one-layer stack agrees with the closed-form slab."""
        r1, t1 = transfer_matrix_slab(4.0 + 0.5j, 0.3e-6, OMEGA)
        r2, t2 = transfer_matrix_stack([(4.0 + 0.5j, 0.3e-6)], OMEGA)
        assert r2 == pytest.approx(r1, rel=1e-9, abs=1e-12)
        assert t2 == pytest.approx(t1, rel=1e-9, abs=1e-12)

    def test_split_layer(self):
        """Splitting a layer in two leaves r and t unchanged."""
        whole = transfer_matrix_stack([(2.0 + 0.1j, 0.4e-6)], OMEGA)
        halves = transfer_matrix_stack([(2.0 + 0.1j, 0.2e-6), (2.0 + 0.1j, 0.2e-6)], OMEGA)
        assert halves[0] == pytest.approx(whole[0], rel=1e-9, abs=1e-12)
        assert halves[1] == pytest.approx(whole[1], rel=1e-9, abs=1e-12)

    def test_bad_thickness(self):
        """Non-positive thickness is rejected."""
        with pytest.raises(ValueError):
            transfer_matrix_slab(2.0, 0.0, OMEGA)


class TestLimits:
    """Tests for closed-form limits."""

    def test_drude_width(self):
        """Weak damping gives FWHM = gamma."""
        assert drude_fwhm_limit(1e16, 1e14) == 1e14

    def test_strong_damping_refused(self):
        """gamma >= wp/10 is outside the limit's validity."""
        with pytest.raises(OracleError):
            drude_fwhm_limit(1e16, 2e15)
