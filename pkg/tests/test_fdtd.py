"""
Tests for the time-domain engine: layout, sources, monitors, stepping.
"""

import math

import numpy as np
import pytest

from src.enzgrid.config import EngineSettings, omega_of
from src.enzgrid.constants import C0
from src.enzgrid.exceptions import ConfigError
from src.enzgrid.fdtd import (
    DipoleSource,
    GaussianPulse,
    LineSource,
    Monitor,
    RampedCW,
    RunResult,
    Simulation,
    SimulationError,
    Snapshot,
    SourcePlacementError,
    StabilityError,
    StopCriteria,
    YeeLayout,
    choose_cell_size,
    courant_dt,
    field_monitor,
    line_monitor,
    point_monitor,
    read_snapshot,
    source_from_dict,
    steady_residual,
    steps_per_period,
    trace_monitor,
    write_snapshot,
)
from src.enzgrid.fdtd.sources import stamp_source
from src.enzgrid.geometry import GridNetworkSpec, build_empty_scene, build_grid_scene, rasterize
from src.enzgrid.analysis import line_wavenumber
from src.enzgrid.materials import drude, permittivity, refractive_index, resolve_material

OMEGA = omega_of(1e-6)
DX = 50e-9


@pytest.fixture
def vacuum_raster():
    """2 um x 2 um vacuum box, 40 x 40 cells."""
    return rasterize(build_empty_scene(2e-6, 2e-6), DX)


def pulse_dipole(moment=1.0, position=(0.0, 0.0), orientation=(0.0, 1.0)):
    return DipoleSource(position, orientation, moment, GaussianPulse(OMEGA, 0.5))


class TestLayout:
    """Tests for the Yee layout and step size."""

    def test_courant_dt(self):
        """dt = S dx / (c sqrt 2)."""
        assert courant_dt(DX, 0.5) == pytest.approx(0.5 * DX / (C0 * math.sqrt(2)))

    def test_courant_out_of_range(self):
        """S outside (0, 1] raises StabilityError."""
        with pytest.raises(StabilityError):
            courant_dt(DX, 1.5)
        with pytest.raises(ConfigError):
            EngineSettings(courant=0.0)

    def test_layout_rejects_large_dt(self):
        """A step above the 2D bound is refused."""
        with pytest.raises(StabilityError):
            YeeLayout(dx=DX, nx=10, ny=10, dt=2 * courant_dt(DX, 1.0))

    def test_steps_per_period(self):
        """The snapped step divides the period exactly and stays stable."""
        dt_max = courant_dt(DX, 0.5)
        spp = steps_per_period(OMEGA, dt_max)
        dt = 2 * math.pi / OMEGA / spp
        assert dt <= dt_max
        assert spp * dt == pytest.approx(2 * math.pi / OMEGA)

    def test_choose_cell_size(self):
        """Cells resolve the wavelength and the narrowest feature."""
        assert choose_cell_size(OMEGA, [None], math.inf) == pytest.approx(1e-6 / 20)
        assert choose_cell_size(OMEGA, [None], 100e-9) == pytest.approx(25e-9)


class TestWaveforms:
    """Tests for source waveforms."""

    def test_cw_ramp(self):
        """The CW ramp is zero before t = 0 and full after the ramp."""
        cw = RampedCW(OMEGA, ramp_periods=2.0)
        assert cw.value(-1e-15) == 0.0
        t_half = cw.period
        assert cw.value(t_half + cw.period / 4) == pytest.approx(
            0.5 * (1 - math.cos(math.pi * (1.25 / 2))), rel=1e-9
        )
        t = 3.25 * cw.period
        assert cw.value(t) == pytest.approx(math.sin(OMEGA * t))

    def test_pulse_band_and_cutoff(self):
        """The pulse covers omega (1 +- bandwidth) and ends at 2 t0."""
        pulse = GaussianPulse(OMEGA, 0.2)
        assert pulse.band() == pytest.approx((0.8 * OMEGA, 1.2 * OMEGA))
        assert pulse.value(pulse.end_time) == 0.0
        assert abs(pulse.value(pulse.t0 + pulse.period / 4)) > 0.9

    def test_invalid_waveforms(self):
        """Non-positive omega and out-of-range bandwidth are rejected."""
        with pytest.raises(ValueError):
            RampedCW(-1.0)
        with pytest.raises(ValueError):
            GaussianPulse(OMEGA, 3.0)


class TestSources:
    """Tests for source stamping and parsing."""

    def test_dipole_split_over_two_edges(self, vacuum_raster):
        """A y dipole drives the two Ey edges of its cell with u d / (2 dx^2)."""
        layout = YeeLayout(DX, vacuum_raster.nx, vacuum_raster.ny, courant_dt(DX, 0.5), vacuum_raster.origin)
        stamped = stamp_source(pulse_dipole(moment=2.0), vacuum_raster, layout)
        assert len(stamped) == 1
        assert stamped[0].component == 'y'
        assert len(stamped[0].index) == 2
        np.testing.assert_allclose(stamped[0].weight, 0.5 * 2.0 / DX ** 2)

    def test_diagonal_dipole(self, vacuum_raster):
        """A diagonal dipole drives both components."""
        layout = YeeLayout(DX, vacuum_raster.nx, vacuum_raster.ny, courant_dt(DX, 0.5), vacuum_raster.origin)
        u = 1 / math.sqrt(2)
        stamped = stamp_source(pulse_dipole(orientation=(u, u)), vacuum_raster, layout)
        assert sorted(s.component for s in stamped) == ['x', 'y']

    def test_dipole_outside_grid(self, vacuum_raster):
        """A dipole outside the grid raises SourcePlacementError."""
        with pytest.raises(SourcePlacementError):
            Simulation(vacuum_raster, [pulse_dipole(position=(5e-6, 0.0))])

    def test_dipole_in_pec(self):
        """A dipole inside the cladding raises SourcePlacementError."""
        spec = GridNetworkSpec(1, 1, 2e-6, 300e-9, 100e-9, 200e-9)
        raster = rasterize(build_grid_scene(spec), 25e-9)
        with pytest.raises(SourcePlacementError):
            Simulation(raster, [pulse_dipole(position=(-450e-9, -450e-9))])

    def test_line_source_on_boundary(self, vacuum_raster):
        """A line source on the outer wall is refused."""
        source = LineSource((-1e-6, -0.5e-6), (-1e-6, 0.5e-6), 1.0, GaussianPulse(OMEGA))
        with pytest.raises(SourcePlacementError):
            Simulation(vacuum_raster, [source])

    def test_unit_orientation(self):
        """Dipole orientations must be unit vectors."""
        with pytest.raises(ValueError):
            DipoleSource((0.0, 0.0), (1.0, 1.0), 1.0, GaussianPulse(OMEGA))

    def test_mixed_waveforms(self, vacuum_raster):
        """All sources of a run share one waveform."""
        other = DipoleSource((0.2e-6, 0.0), (0.0, 1.0), 1.0, RampedCW(OMEGA))
        with pytest.raises(SimulationError):
            Simulation(vacuum_raster, [pulse_dipole(), other])

    def test_source_from_dict_anchor(self):
        """Positions may name anchors; orientations are normalized."""
        source = source_from_dict(
            {'position': 'cavity_0', 'orientation': [3, 4], 'waveform': {'frequency': '1um'}},
            {'cavity_0': (1e-6, 2e-6)},
        )
        assert source.position == (1e-6, 2e-6)
        assert source.orientation == pytest.approx((0.6, 0.8))
        assert source.waveform.omega == pytest.approx(OMEGA)

    def test_source_from_dict_unknown_anchor(self):
        """Unknown anchors are configuration errors."""
        with pytest.raises(ConfigError):
            source_from_dict({'position': 'cavity_9', 'waveform': {'frequency': '1um'}}, {})


class TestMonitors:
    """Tests for monitor definitions."""

    def test_point_count_checked(self):
        """Each kind needs its number of points."""
        with pytest.raises(ValueError):
            Monitor('m', 'line', ((0.0, 0.0),))
        with pytest.raises(ValueError):
            Monitor('m', 'bogus')

    def test_duplicate_names(self, vacuum_raster):
        """Monitor names must be unique within a run."""
        with pytest.raises(ConfigError):
            Simulation(vacuum_raster, [pulse_dipole()],
                       [point_monitor('a', (0.0, 0.0)), point_monitor('a', (0.1e-6, 0.0))])

    def test_out_of_band_frequency(self, vacuum_raster):
        """Monitor frequencies outside the source band are refused."""
        with pytest.raises(SimulationError):
            Simulation(vacuum_raster, [pulse_dipole()], [point_monitor('a', (0.0, 0.0), [3 * OMEGA])])

    def test_cw_requires_carrier(self, vacuum_raster):
        """CW runs only monitor the carrier."""
        source = DipoleSource((0.0, 0.0), (0.0, 1.0), 1.0, RampedCW(OMEGA))
        with pytest.raises(SimulationError):
            Simulation(vacuum_raster, [source], [point_monitor('a', (0.0, 0.0), [1.01 * OMEGA])])


class TestStepping:
    """Tests for the leapfrog update."""

    def test_zero_source_stays_zero(self, vacuum_raster):
        """With zero drive every field stays exactly zero."""
        sim = Simulation(vacuum_raster, [pulse_dipole(moment=0.0)])
        for _ in range(50):
            sim.step()
        assert not np.any(sim.state.hz)
        assert not np.any(sim.state.ex)
        assert not np.any(sim.state.ey)

    def test_source_radiates(self, vacuum_raster):
        """A driven dipole produces non-zero fields."""
        sim = Simulation(vacuum_raster, [pulse_dipole()])
        for _ in range(400):
            sim.step()
        assert np.abs(sim.state.hz).max() > 0

    def test_workers_bit_identical(self, vacuum_raster):
        """Fields and phasors do not depend on the worker count."""
        monitors = [point_monitor('p', (0.3e-6, 0.2e-6)), field_monitor('f')]
        stop = StopCriteria(max_steps=300)
        results = []
        for workers in (1, 4):
            sim = Simulation(vacuum_raster, [pulse_dipole()], monitors, workers=workers)
            results.append((sim.run(stop), sim.state))
        (one, s1), (four, s4) = results
        assert np.array_equal(s1.hz, s4.hz)
        assert np.array_equal(s1.ex, s4.ex)
        assert np.array_equal(s1.ey, s4.ey)
        for name in ('p', 'f'):
            assert np.array_equal(one.monitor(name).phasor('hz'), four.monitor(name).phasor('hz'))

    def test_energy_conserved_in_closed_box(self, vacuum_raster):
        """Without loss or absorbing layers the discrete energy is constant once the pulse ends."""
        source = pulse_dipole()
        sim = Simulation(vacuum_raster, [source], pml_axes=(), energy_every=1)
        end = int(math.ceil(source.waveform.end_time / sim.layout.dt)) + 5
        for _ in range(end + 300):
            sim.step()
        after = np.array([e for n, e in sim.energy if n > end])
        assert after.max() > 0
        assert (after.max() - after.min()) / after.max() < 1e-9

    def test_lossy_medium_dissipates(self):
        """A damped Drude medium drains energy after the pulse."""
        scene = build_empty_scene(2e-6, 2e-6, background="lossy")
        raster = rasterize(scene, DX, materials={'lossy': drude(1.0, 0.5 * OMEGA, 0.2 * OMEGA)})
        source = pulse_dipole()
        sim = Simulation(raster, [source], pml_axes=(), energy_every=1)
        end = int(math.ceil(source.waveform.end_time / sim.layout.dt)) + 5
        for _ in range(end + 600):
            sim.step()
        after = [e for n, e in sim.energy if n > end]
        assert after[-1] < 0.9 * after[0]

    def test_pulse_run_stops_on_budget(self, vacuum_raster):
        """A pulse run that hits max_steps reports not converged."""
        result = Simulation(vacuum_raster, [pulse_dipole()], [point_monitor('p', (0.0, 0.0))]).run(
            StopCriteria(max_steps=120)
        )
        assert result.steps == 120
        assert result.converged is False

    def test_trace_monitor(self, vacuum_raster):
        """Trace monitors keep raw time series."""
        sim = Simulation(vacuum_raster, [pulse_dipole()], [trace_monitor('t', (0.2e-6, 0.0))])
        result = sim.run(StopCriteria(max_steps=60))
        trace = result.monitor('t')
        assert len(trace.times) == 60
        assert trace.series['hz'].shape == (60,)

    def test_run_result_file(self, vacuum_raster, tmp_path):
        """Stored phasors reload with the same values."""
        monitors = [point_monitor('p', (0.3e-6, 0.0)), line_monitor('l', (-0.5e-6, 0.1e-6), (0.5e-6, 0.1e-6))]
        result = Simulation(vacuum_raster, [pulse_dipole()], monitors).run(StopCriteria(max_steps=200))
        path = tmp_path / "phasors.npz"
        result.save(path)
        again = RunResult.load(path, result.summary())
        assert again.steps == result.steps
        np.testing.assert_array_equal(again.monitor('l').phasor('ey'), result.monitor('l').phasor('ey'))
        np.testing.assert_array_equal(again.monitor('p').positions, result.monitor('p').positions)


class TestSteadyResidual:
    """Tests for the per-period change measure of CW runs."""

    def test_relative_change(self):
        """Bright values are measured against themselves."""
        assert steady_residual(np.array([2.0, 1.0]), np.array([1.9, 1.0]), 1e-3) == pytest.approx(0.05)

    def test_faint_values_use_floor(self):
        """A faint value that doubles counts against the floor, not itself."""
        residual = steady_residual(np.array([1.0, 1e-5]), np.array([1.0, 2e-5]), 1e-3)
        assert residual == pytest.approx(1e-2)

    def test_all_zero(self):
        """An empty field has not changed."""
        assert steady_residual(np.zeros(3), np.zeros(3), 1e-3) == 0.0

    def test_floor_from_settings(self):
        """Stop criteria carry the engine floor; a floor outside (0, 1) is refused."""
        assert StopCriteria.from_settings(EngineSettings(steady_floor=1e-2)).steady_floor == 1e-2
        with pytest.raises(ConfigError):
            EngineSettings(steady_floor=0.0)
        with pytest.raises(ConfigError):
            EngineSettings(steady_floor=1.5)


@pytest.mark.slow
class TestSteadyState:
    """Longer runs."""

    def test_energy_drift_over_long_run(self, vacuum_raster):
        """A lossless closed box keeps its energy within 0.1% over 10^4 steps."""
        source = pulse_dipole()
        sim = Simulation(vacuum_raster, [source], pml_axes=(), energy_every=50)
        end = int(math.ceil(source.waveform.end_time / sim.layout.dt)) + 5
        for _ in range(end + 10000):
            sim.step()
        after = np.array([e for n, e in sim.energy if n > end])
        assert len(after) >= 190
        assert (after.max() - after.min()) / after.max() < 1e-3

    def test_cw_converges_in_open_box(self):
        """A CW dipole inside absorbing layers reaches steady state."""
        raster = rasterize(build_empty_scene(3e-6, 3e-6), DX)
        source = DipoleSource((0.0, 0.0), (0.0, 1.0), 1.0, RampedCW(OMEGA, ramp_periods=3.0))
        settings = EngineSettings(steady_tolerance=1e-3, max_steps=20000)
        result = Simulation(raster, [source], [point_monitor('p', (0.5e-6, 0.0))], settings).run()
        assert result.converged
        assert result.residual < 1e-3
        assert result.steps % steps_per_period(OMEGA, courant_dt(DX, 0.5)) == 0


def plane_wave_run(material, wavelength, dx, length, line_length, bandwidth=0.4, tolerance=1e-10):
    """
    Pulsed full-height line source in a uniform strip between PEC walls,
    absorbing layers at both ends, an axial line monitor past the source.
    """
    omega = omega_of(wavelength)
    height = 4 * dx
    raster = rasterize(build_empty_scene(length, height, background=material), dx)
    x_src = -length / 2 + 20 * dx
    source = LineSource((x_src, -0.499 * height), (x_src, 0.499 * height), 1.0, GaussianPulse(omega, bandwidth))
    start = x_src + 5 * dx
    axis = line_monitor('axis', (start, 0.0), (start + line_length, 0.0), [omega])
    result = Simulation(raster, [source], [axis], pml_axes=('x',)).run(
        StopCriteria(max_steps=600000, decay_tolerance=tolerance)
    )
    assert result.converged
    return result, omega


@pytest.mark.slow
class TestPlaneWaves:
    """Plane waves along a strip in uniform media."""

    @pytest.fixture(scope="class")
    def vacuum_wave(self):
        return plane_wave_run('vacuum', 1e-6, DX, 8e-6, 4e-6)

    def test_phase_speed(self, vacuum_wave):
        """At 20 cells per wavelength the phase speed is within 1% of c."""
        result, omega = vacuum_wave
        k = line_wavenumber(result, 'axis', 5 * DX)
        assert omega / k.real == pytest.approx(C0, rel=0.01)
        assert abs(k.imag) < 1e-3 * k.real

    def test_absorbing_layer_reflection(self, vacuum_wave):
        """The wave returned by the far absorbing layer is below -40 dB."""
        result, _ = vacuum_wave
        axis = result.monitor('axis')
        x = axis.positions[:, 0]
        k = line_wavenumber(result, 'axis', 5 * DX).real
        basis = np.column_stack([np.exp(1j * k * x), np.exp(-1j * k * x)])
        (forward, backward), *_ = np.linalg.lstsq(basis, axis.phasor('hz'), rcond=None)
        assert 20 * math.log10(abs(backward) / abs(forward)) < -40

    @pytest.mark.parametrize(
        "material, wavelength, dx, length, line_length, spacing, bandwidth, tolerance",
        [
            ('gold', 800e-9, 2e-9, 400e-9, 100e-9, 10e-9, 0.4, 1e-10),
            ('tin', 667e-9, 2.5e-9, 500e-9, 120e-9, 10e-9, 0.4, 1e-10),
            ('sic', 10.3e-6, 50e-9, 12e-6, 5e-6, 2e-6, 0.15, 1e-9),
            # below the crossing, where the grid's frequency shift barely moves Im n
            ('enz_illustrative', 760e-9, 25e-9, 8e-6, 3e-6, 1e-6, 0.2, 1e-11),
        ],
    )
    def test_attenuation_matches_index(self, material, wavelength, dx, length, line_length, spacing,
                                       bandwidth, tolerance):
        """Im K in a uniform dispersive medium is (omega / c) Im n within 2%."""
        result, omega = plane_wave_run(material, wavelength, dx, length, line_length, bandwidth, tolerance)
        k = line_wavenumber(result, 'axis', spacing)
        n = refractive_index(permittivity(resolve_material(material), omega))
        assert k.imag == pytest.approx(omega / C0 * n.imag, rel=0.02)


class TestSnapshots:
    """Tests for field snapshot files."""

    def test_write_read(self, tmp_path):
        """A snapshot reloads with identical values and header."""
        values = (np.arange(12).reshape(3, 4) + 1j * np.arange(12).reshape(3, 4)[::-1]).astype(complex)
        snap = Snapshot(values=values, dx=DX, component='hz', omega=OMEGA, origin=(-1e-6, 0.0))
        again = read_snapshot(write_snapshot(snap, tmp_path / "hz.bin"))
        np.testing.assert_array_equal(again.values, values)
        assert (again.nx, again.ny) == (3, 4)
        assert again.component == 'hz'
        assert again.origin == (-1e-6, 0.0)

    def test_payload_size(self, tmp_path):
        """Payload is 16 bytes per cell after the header line."""
        snap = Snapshot(values=np.zeros((5, 2), dtype=complex), dx=DX, component='ex', omega=OMEGA)
        data = write_snapshot(snap, tmp_path / "ex.bin").read_bytes()
        assert len(data.split(b"\n", 1)[1]) == 5 * 2 * 16

    def test_truncated(self, tmp_path):
        """A truncated payload raises ConfigError."""
        path = write_snapshot(Snapshot(np.ones((2, 2), dtype=complex), DX, 'hz', OMEGA), tmp_path / "s.bin")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ConfigError):
            read_snapshot(path)
