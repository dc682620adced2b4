"""
Tests for the analyses, driven by synthetic run results.
"""

import math

import numpy as np
import pytest

from src.enzgrid.analysis import (
    AnalysisError,
    ConvergenceRequiredError,
    CouplingResult,
    FrequencyMismatchError,
    GreensSample,
    MissingMonitorError,
    SupercouplingQuery,
    TimeBinQubit,
    amplitude_retention,
    cavity_monitor,
    circular_spread,
    compare_slab,
    coupled_decay,
    coupling_peak,
    coupling_scan,
    decay_vs_distance,
    extract_green,
    guide_transmission,
    lattice_nodes_within,
    line_wavenumber,
    node_budget,
    phase_spread,
    purcell_factor,
    self_green,
    slab_transmission,
    supercoupling_reflection,
    transport_feasible,
    write_csv,
    write_report,
)
from src.enzgrid.analysis.green import snapped_position
from src.enzgrid.analysis.reports import read_csv, sha256_file
from src.enzgrid.constants import C0, MU0
from src.enzgrid.fdtd import DipoleSource, GaussianPulse, MonitorResult, RunResult
from src.enzgrid.geometry import BentChannelSpec, GridNetworkSpec, cavity_centers
from src.enzgrid.materials import VACUUM, permittivity, resolve_material
from src.enzgrid.oracle import transfer_matrix_slab, vacuum_green_2d

OMEGA = C0 / 1e-6  # k0 = 1/um
DX = 10e-9
ORIGIN = (-1e-6, -1e-6)


def make_run(monitors, omega=OMEGA, converged=True, shape=(200, 200), origin=ORIGIN):
    return RunResult(
        monitors={m.name: m for m in monitors},
        steps=1000,
        converged=converged,
        residual=1e-5 if converged else 1e-2,
        dt=1e-17,
        dx=DX,
        shape=shape,
        origin=origin,
        waveform={'kind': 'cw', 'omega': omega, 'ramp_periods': 5.0},
    )


def point(name, position=(0.0, 0.0), ex=0.0, ey=0.0, hz=0.0, omega=OMEGA):
    return MonitorResult(
        name=name,
        kind='point',
        frequencies=np.array([omega]),
        phasors={c: np.array([[v]], dtype=complex) for c, v in (('ex', ex), ('ey', ey), ('hz', hz))},
        positions=np.array([position], dtype=float),
    )


def dipole(orientation, moment=1.0, position=(5e-9, 5e-9)):
    return DipoleSource(position, orientation, moment, GaussianPulse(OMEGA))


def green_runs(offset=(1e-6, 0.0), moment=1.0):
    """x and y dipole runs whose probe reads the vacuum Green function."""
    source = dipole((1.0, 0.0), moment)
    r1 = snapped_position(make_run([]), source.position)
    r2 = (r1[0] + offset[0], r1[1] + offset[1])
    g = vacuum_green_2d(r1, r2, OMEGA)
    runs = []
    for axis, u in enumerate(((1.0, 0.0), (0.0, 1.0))):
        e = OMEGA ** 2 * MU0 * moment * g[:, axis]
        runs.append((make_run([point('probe', r2, ex=e[0], ey=e[1])]), dipole(u, moment)))
    return runs, g


class TestGreenExtraction:
    """Tests for Green tensors from dipole runs."""

    def test_two_runs_fill_tensor(self):
        """Orthogonal dipole runs recover the full tensor."""
        runs, g = green_runs()
        sample = extract_green(runs)
        assert sample.complete
        np.testing.assert_allclose(sample.tensor, g, rtol=1e-10)

    def test_moment_scales_out(self):
        """The dipole moment divides out of G."""
        runs, g = green_runs(moment=3.5)
        np.testing.assert_allclose(extract_green(runs).tensor, g, rtol=1e-10)

    def test_single_run_partial(self):
        """One axis-aligned run fills one column; the other stays NaN."""
        runs, g = green_runs()
        sample = extract_green(runs[1:])
        assert not sample.complete
        assert sample.component('yy') == pytest.approx(g[1, 1])
        assert math.isnan(sample.tensor[0, 0].real)

    def test_coupling_at_kr_one(self):
        """Perpendicular dipoles at kR = 1 give 0.6502941 and 0.8694698."""
        runs, _ = green_runs()
        result = coupled_decay(extract_green(runs[1:]), (0.0, 1.0), (0.0, 1.0))
        assert result.gamma21_normalized == pytest.approx(0.6502941, abs=1e-5)
        assert result.lamb_shift_normalized == pytest.approx(0.8694698, abs=1e-5)

    def test_missing_column(self):
        """A dipole along an unprobed axis is refused."""
        runs, _ = green_runs()
        with pytest.raises(AnalysisError):
            coupled_decay(extract_green(runs[1:]), (1.0, 0.0), (1.0, 0.0))

    def test_reference_moment(self):
        """Normalization scales with 1 / reference_moment^2."""
        runs, _ = green_runs()
        sample = extract_green(runs)
        unit = coupled_decay(sample, (0.0, 1.0), (0.0, 1.0))
        doubled = coupled_decay(sample, (0.0, 1.0), (0.0, 1.0), reference_moment=2.0)
        assert doubled.gamma21_normalized == pytest.approx(unit.gamma21_normalized / 4)
        assert doubled.gamma21 == pytest.approx(unit.gamma21)

    def test_unconverged_refused(self):
        """Unconverged runs raise ConvergenceRequiredError."""
        runs, _ = green_runs()
        run, source = runs[0]
        run.converged = False
        with pytest.raises(ConvergenceRequiredError):
            extract_green([(run, source)])

    def test_wrong_frequency(self):
        """Asking for a frequency the monitor lacks raises FrequencyMismatchError."""
        runs, _ = green_runs()
        with pytest.raises(FrequencyMismatchError):
            extract_green(runs, omega=1.1 * OMEGA)

    def test_missing_probe(self):
        """A missing probe monitor raises MissingMonitorError."""
        runs, _ = green_runs()
        with pytest.raises(MissingMonitorError):
            extract_green(runs, monitor="elsewhere")


class TestSelfTerm:
    """Tests for coincident-point Green functions."""

    def test_vacuum_purcell_is_one(self):
        """A structure identical to vacuum has Purcell factor 1."""
        tensor = np.array([[0.3 + 0.1j, 0.0], [0.0, 0.3 + 0.1j]])
        vacuum = GreensSample((0.0, 0.0), (0.0, 0.0), OMEGA, tensor)
        sample = self_green(vacuum, vacuum)
        assert sample.self_term
        assert purcell_factor(sample, (0.0, 1.0)) == pytest.approx(1.0)

    def test_scattered_part_adds(self):
        """The scattered imaginary part raises the decay rate."""
        vacuum = GreensSample((0.0, 0.0), (0.0, 0.0), OMEGA, np.zeros((2, 2)))
        structured = GreensSample((0.0, 0.0), (0.0, 0.0), OMEGA, np.diag([0.0, 0.125j]))
        assert purcell_factor(self_green(structured, vacuum), (0.0, 1.0)) == pytest.approx(2.0)

    def test_needs_self_term(self):
        """purcell_factor refuses two-point samples."""
        runs, _ = green_runs()
        with pytest.raises(AnalysisError):
            purcell_factor(extract_green(runs), (1.0, 0.0))


class TestCouplingScan:
    """Tests for frequency scans of the coupling."""

    def test_sorted_and_peak(self):
        """Scans come back in ascending frequency; the peak has the largest rate."""
        samples = [
            GreensSample((0.0, 0.0), (1e-6, 0.0), w, np.diag([0.0, 0.01j * k]))
            for k, w in zip((3, 1, 2), (1.2 * OMEGA, 0.9 * OMEGA, OMEGA))
        ]
        scan = coupling_scan(samples, (0.0, 1.0), (0.0, 1.0))
        assert [r.omega for r in scan] == sorted(r.omega for r in scan)
        assert coupling_peak(scan).omega == pytest.approx(1.2 * OMEGA)

    def test_result_keys(self):
        """Coupling rows carry normalized columns."""
        result = CouplingResult(1.0, 2.0, 0.5, 0.25, (0.0, 1.0), (0.0, 1.0), OMEGA)
        data = result.to_dict()
        assert data['gamma21_norm'] == 0.5
        assert data['lamb_norm'] == 0.25

    def test_non_finite_refused(self):
        """Non-finite couplings are rejected."""
        with pytest.raises(ValueError):
            CouplingResult(float('nan'), 0.0, 0.0, 0.0, (0.0, 1.0), (0.0, 1.0), OMEGA)


def grid_run(spec, values, hz=None):
    centers = cavity_centers(spec)
    hz = hz if hz is not None else [1.0] * len(centers)
    return make_run([
        point(cavity_monitor(k), centers[k], ex=values[k], ey=0.0, hz=hz[k])
        for k in range(len(centers))
    ])


class TestNetwork:
    """Tests for decay, phase and retention over cavity networks."""

    @pytest.fixture
    def spec(self):
        return GridNetworkSpec(3, 3, 2.089e-6, 310e-9, 100e-9, 100e-9)

    def test_decay_normalized_and_sorted(self, spec):
        """Values are relative to the center cavity and sorted by distance."""
        centers = cavity_centers(spec)
        values = [2.0 * math.exp(-math.hypot(x, y) / 5e-6) for x, y in centers]
        curve = decay_vs_distance(grid_run(spec, values), spec)
        assert curve.source_index == 4
        assert curve.entries[0].index == 4
        assert curve.entries[0].value == pytest.approx(1.0)
        distances = [e.distance for e in curve.entries]
        assert distances == sorted(distances)
        assert curve.farthest().distance == pytest.approx(math.sqrt(2) * 2.089e-6)
        assert curve.farthest().value == pytest.approx(math.exp(-math.sqrt(2) * 2.089e-6 / 5e-6))

    def test_decay_explicit_source(self, spec):
        """An explicit source index moves the reference."""
        curve = decay_vs_distance(grid_run(spec, [float(k + 1) for k in range(9)]), spec, source_index=0)
        assert curve.values()[8] == pytest.approx(9.0)

    def test_decay_ratio(self, spec):
        """Curves divide cavity by cavity."""
        a = decay_vs_distance(grid_run(spec, [1.0] * 9), spec)
        b = decay_vs_distance(grid_run(spec, [1.0] * 4 + [2.0] + [1.0] * 4), spec)
        assert a.ratio_to(b)[0] == pytest.approx(2.0)

    def test_missing_cavity(self, spec):
        """A missing cavity monitor raises MissingMonitorError."""
        run = grid_run(spec, [1.0] * 9)
        del run.monitors[cavity_monitor(7)]
        with pytest.raises(MissingMonitorError):
            decay_vs_distance(run, spec)

    def test_phase_locked(self, spec):
        """Equal phases everywhere give zero spread."""
        hz = [0.5 * np.exp(0.3j)] * 9
        phases = phase_spread(grid_run(spec, [1.0] * 9, hz), spec)
        assert phases.spread == pytest.approx(0.0, abs=1e-6)
        assert phases.phases[(1, 2)] == pytest.approx(0.3)

    def test_phase_excludes_zero(self, spec):
        """Cavities with vanishing Hz are excluded."""
        hz = [1.0] * 9
        hz[4] = 0.0
        phases = phase_spread(grid_run(spec, [1.0] * 9, hz), spec)
        assert phases.excluded == [(1, 1)]
        assert (1, 1) not in phases.phases

    def test_uniform_phases_cap(self):
        """Phases spread evenly around the circle give pi."""
        assert circular_spread(np.linspace(0, 2 * math.pi, 8, endpoint=False)) == pytest.approx(math.pi)

    def test_small_spread(self):
        """Small spreads follow sqrt(-2 ln R)."""
        phases = [0.0, 0.1, -0.1]
        r = (1 + 2 * math.cos(0.1)) / 3
        assert circular_spread(phases) == pytest.approx(math.sqrt(-2 * math.log(r)), rel=1e-6)

    def test_amplitude_retention(self):
        """Retention is the peak in cavity b over the peak in cavity a."""
        spec = BentChannelSpec((0.0, 0.0), (1e-6, 1e-6), 300e-9, 50e-9)
        origin = (-0.5e-6, -0.5e-6)
        x = origin[0] + (np.arange(200) + 0.5) * DX
        y = origin[1] + (np.arange(200) + 0.5) * DX
        X, Y = np.meshgrid(x, y, indexing='ij')
        field = np.full(X.shape, 0.1, dtype=complex)
        field[np.hypot(X, Y) <= 300e-9] = 1.0
        field[np.hypot(X - 1e-6, Y - 1e-6) <= 300e-9] = 0.5
        monitor = MonitorResult(
            name='field', kind='field', frequencies=np.array([OMEGA]),
            phasors={'ex': field[None], 'ey': np.zeros((1, 200, 200), dtype=complex),
                     'hz': np.zeros((1, 200, 200), dtype=complex)},
        )
        run = make_run([monitor], origin=origin)
        assert amplitude_retention(run, spec) == pytest.approx(0.5)


class TestBudget:
    """Tests for node budgets and transport."""

    def test_sic_budget(self):
        """1.4 mm coherence at 2.089 um pitch reaches about 1.41 million nodes."""
        budget = node_budget(1.4e-3, 2.089e-6)
        assert 1.40e6 <= budget <= 1.42e6

    def test_lattice_count_close(self):
        """Counting lattice points agrees with the area estimate within 1%."""
        budget = node_budget(1.4e-3, 2.089e-6)
        count = lattice_nodes_within(1.4e-3, 2.089e-6)
        assert abs(count - budget) / budget < 0.01

    def test_small_lattice(self):
        """Radius 1 pitch holds 5 nodes; radius sqrt 2 holds 9."""
        assert lattice_nodes_within(1.0, 1.0) == 5
        assert lattice_nodes_within(math.sqrt(2) + 1e-12, 1.0) == 9

    def test_invalid_budget(self):
        """Non-positive lengths are rejected."""
        with pytest.raises(ValueError):
            node_budget(0.0, 1e-6)

    def test_transport(self):
        """Paths strictly shorter than L_c are feasible."""
        qubit = TimeBinQubit.from_angles(math.pi / 2, 0.0)
        assert transport_feasible(qubit, 1e-3, 1.4e-3).feasible
        assert not transport_feasible(qubit, 1.4e-3, 1.4e-3).feasible
        assert transport_feasible(None, 2e-3, 1.4e-3).margin == pytest.approx(-0.6e-3)
        with pytest.raises(ValueError):
            transport_feasible(qubit, -1.0, 1.4e-3)

    def test_qubit_normalization(self):
        """Qubit amplitudes must be normalized."""
        with pytest.raises(ValueError):
            TimeBinQubit(1.0, 1.0)
        qubit = TimeBinQubit.from_angles(math.pi / 2, math.pi)
        assert np.linalg.norm(qubit.state_vector()) == pytest.approx(1.0)


class TestSupercoupling:
    """Tests for the channel transmission model."""

    def test_matched_without_channel(self):
        """Equal guides and no channel area transmit fully."""
        rho, t2 = supercoupling_reflection(SupercouplingQuery(400e-9, 400e-9, 0.0, 1e7))
        assert rho == 0
        assert t2 == pytest.approx(1.0)

    def test_step_reflection(self):
        """A bare width step reflects (a1 - a2) / (a1 + a2)."""
        rho, t2 = supercoupling_reflection(SupercouplingQuery(400e-9, 200e-9, 0.0, 1e7))
        assert rho == pytest.approx(1 / 3)
        assert t2 == pytest.approx(8 / 9)

    def test_small_channel(self):
        """A small channel area barely reflects."""
        k0 = 2 * math.pi / 780e-9
        rho, t2 = supercoupling_reflection(SupercouplingQuery(400e-9, 400e-9, 25e-9 * 200e-9, k0))
        assert abs(rho) == pytest.approx(k0 * 5e-15 / 800e-9, rel=1e-3)
        assert t2 == pytest.approx(1 - abs(rho) ** 2)
        assert t2 > 0.99

    def test_large_channel(self):
        """A large channel area chokes transmission."""
        _, t2 = supercoupling_reflection(SupercouplingQuery(400e-9, 400e-9, 1e-12, 1e7))
        assert t2 < 0.01

    def test_measured_transmission(self):
        """Measured |T| compares exit rms Hz with the reference guide."""
        line = lambda name, value: MonitorResult(
            name=name, kind='line', frequencies=np.array([OMEGA]),
            phasors={'hz': np.full((1, 8), value, dtype=complex)},
            positions=np.zeros((8, 2)),
        )
        run = make_run([line('exit', 0.5)])
        reference = make_run([line('exit', 1.0)])
        assert guide_transmission(run, reference, 400e-9, 400e-9) == pytest.approx(0.5)
        assert guide_transmission(run, reference, 400e-9, 800e-9) == pytest.approx(0.5 * math.sqrt(2))


def exit_line(values, frequencies, name='exit', count=4):
    """Line monitor with a uniform Hz per frequency."""
    return MonitorResult(
        name=name, kind='line', frequencies=np.asarray(frequencies, dtype=float),
        phasors={'hz': np.outer(np.asarray(values, dtype=complex), np.ones(count))},
        positions=np.column_stack([np.zeros(count), DX * np.arange(count)]),
    )


def axial_line(values, name='axis'):
    return MonitorResult(
        name=name, kind='line', frequencies=np.array([OMEGA]),
        phasors={'hz': np.asarray(values, dtype=complex)[None, :]},
        positions=np.column_stack([DX * np.arange(len(values)), np.zeros(len(values))]),
    )


class TestPropagation:
    """Tests for slab transmission and line wavenumbers."""

    THICKNESS = 50e-9

    def test_vacuum_slab(self):
        """A vacuum slab transmits exactly like the reference run."""
        frequencies = [0.9 * OMEGA, OMEGA]
        run = make_run([exit_line([0.3 + 0.1j, 0.2j], frequencies)])
        comparison = compare_slab(run, run, VACUUM, self.THICKNESS, name='vacuum')
        assert comparison.max_error < 1e-12
        assert [s.omega for s in comparison.samples] == frequencies

    def test_model_slab(self):
        """A run carrying the transfer-matrix ratio reproduces the model."""
        tin = resolve_material('tin')
        frequencies = [2.6e15, 2.8e15, 3.0e15]
        incident = np.array([1.0, 0.5 - 0.5j, 2j])
        ratio = []
        for w in frequencies:
            _, t = transfer_matrix_slab(permittivity(tin, w), self.THICKNESS, w)
            ratio.append(t * np.exp(-1j * w / C0 * self.THICKNESS))
        run = make_run([exit_line(incident * np.array(ratio), frequencies)], omega=2.8e15)
        reference = make_run([exit_line(incident, frequencies)], omega=2.8e15)
        comparison = compare_slab(run, reference, tin, self.THICKNESS, name='tin')
        assert comparison.max_error < 1e-9
        # a lossy film attenuates
        assert all(abs(s.measured) < 1 for s in comparison.samples)
        assert len(comparison.rows()) == 3
        assert comparison.to_dict()['material'] == 'tin'

    def test_dark_reference(self):
        """A reference without field cannot calibrate."""
        run = make_run([exit_line([1.0], [OMEGA])])
        dark = make_run([exit_line([0.0], [OMEGA])])
        with pytest.raises(AnalysisError, match="no field"):
            slab_transmission(run, dark)

    def test_unconverged(self):
        """Slab transmission needs converged runs."""
        run = make_run([exit_line([1.0], [OMEGA])])
        stale = make_run([exit_line([1.0], [OMEGA])], converged=False)
        with pytest.raises(ConvergenceRequiredError):
            slab_transmission(run, stale)

    def test_wavenumber_standing_wave(self):
        """Counter-propagating waves give back their complex wavenumber."""
        k = OMEGA / C0 * (1.5 + 0.02j)
        x = DX * np.arange(60)
        p = 1.0 * np.exp(1j * k * x) + (0.4 - 0.3j) * np.exp(-1j * k * x)
        found = line_wavenumber(make_run([axial_line(p)]), 'axis', spacing=5 * DX)
        assert found == pytest.approx(k, rel=1e-9)

    def test_wavenumber_sign(self):
        """A wave decaying along its travel comes back with positive real and imaginary parts."""
        k = OMEGA / C0 * (0.3 + 0.8j)
        p = np.exp(-1j * k * DX * np.arange(40))
        found = line_wavenumber(make_run([axial_line(p)]), 'axis', spacing=4 * DX)
        assert found.imag > 0
        assert found == pytest.approx(k, rel=1e-9)

    def test_wavenumber_needs_samples(self):
        """The sample spacing must fit inside the line."""
        p = np.ones(6, dtype=complex)
        with pytest.raises(AnalysisError, match="samples"):
            line_wavenumber(make_run([axial_line(p)]), 'axis', spacing=3 * DX)

    def test_wavenumber_point_monitor(self):
        """Point monitors carry no wavenumber."""
        with pytest.raises(AnalysisError, match="line monitor"):
            line_wavenumber(make_run([point('centre', hz=1.0)]), 'centre', spacing=DX)


class TestReports:
    """Tests for CSV and JSON outputs."""

    def test_csv_crlf(self, tmp_path):
        """CSV rows end in CRLF and keep full precision."""
        path = write_csv(tmp_path / "decay.csv", ("distance_m", "normalized_E"), [(0.0, 1.0), (2.089e-6, 0.1234567890123)])
        raw = path.read_bytes()
        assert raw.startswith(b"distance_m,normalized_E\r\n")
        frame = read_csv(path)
        assert frame['normalized_E'].iloc[1] == 0.1234567890123

    def test_report_digests(self, tmp_path):
        """Reports carry the SHA-256 of their inputs."""
        inputs = tmp_path / "phasors.npz"
        inputs.write_bytes(b"abc")
        path = write_report(tmp_path / "decay.json", "decay", {'value': 1.0}, {'phasors': inputs})
        text = path.read_text()
        assert sha256_file(inputs) in text
        assert '"analysis": "decay"' in text
