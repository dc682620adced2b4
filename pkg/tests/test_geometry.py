"""
Tests for network scenes, cut lines and rasterization.
"""

import math

import numpy as np
import pytest

from src.enzgrid.geometry import (
    PEC,
    BentChannelSpec,
    CavityIndexError,
    Disc,
    GridNetworkSpec,
    GuideSpec,
    Inclusion,
    InvalidSpecError,
    Rect,
    ResolutionError,
    Scene,
    build_bent_scene,
    build_empty_scene,
    build_grid_scene,
    build_guide_scene,
    build_slab_scene,
    cavity_centers,
    cut_line,
    flood_connected,
    polyline_length,
    rasterize,
    read_raster,
    write_pgm,
    write_raster,
)

PITCH = 2.089e-6
RADIUS = 310e-9


def grid(rows=2, cols=2, **kwargs) -> GridNetworkSpec:
    params = dict(
        rows=rows, cols=cols, pitch=PITCH, cavity_radius=RADIUS,
        channel_width=100e-9, cladding_thickness=100e-9,
    )
    params.update(kwargs)
    return GridNetworkSpec(**params)


class TestGridScene:
    """Tests for grid network scenes."""

    def test_single_cavity(self):
        """A 1x1 grid is one disc at the origin and no channels."""
        spec = grid(1, 1)
        scene = build_grid_scene(spec)
        assert cavity_centers(spec) == [(0.0, 0.0)]
        assert scene.count(Disc) == 1
        assert scene.count(Rect) == 0

    def test_pair(self):
        """A 2x1 grid has two discs joined by one channel."""
        scene = build_grid_scene(grid(1, 2))
        assert scene.count(Disc) == 2
        assert scene.count(Rect) == 1

    def test_five_by_five(self):
        """5x5 at 3 um pitch: 25 discs, 40 channels, about 15 um across."""
        spec = grid(5, 5, pitch=3e-6)
        scene = build_grid_scene(spec)
        assert scene.count(Disc) == 25
        assert scene.count(Rect) == 40 == spec.channel_count
        assert scene.width == pytest.approx(12e-6 + 2 * (RADIUS + 100e-9))
        assert scene.width == scene.height

    def test_corner_distance(self):
        """Corner-to-corner distance on a 5x5 lattice is 4 sqrt(2) pitch."""
        centers = cavity_centers(grid(5, 5))
        assert math.dist(centers[0], centers[24]) == pytest.approx(4 * math.sqrt(2) * PITCH)
        assert math.dist(centers[0], centers[24]) == pytest.approx(11.82e-6, rel=1e-3)

    def test_row_major_order(self):
        """Cavity index is row * cols + col."""
        spec = grid(3, 4)
        centers = cavity_centers(spec)
        assert spec.index(1, 2) == 6
        assert spec.position(6) == (1, 2)
        assert centers[6][1] == centers[4][1]
        assert centers[6][0] > centers[5][0]

    def test_overlapping_discs(self):
        """Discs wider than the pitch are rejected."""
        with pytest.raises(InvalidSpecError):
            build_grid_scene(grid(2, 2, cavity_radius=1.1e-6))

    def test_channel_wider_than_cavity(self):
        """A channel wider than the cavity diameter is rejected."""
        with pytest.raises(InvalidSpecError):
            grid(2, 2, channel_width=700e-9)

    def test_inclusions(self):
        """Inclusions are painted last and must fit inside their cavity."""
        spec = grid(1, 2, inclusions=(Inclusion(1, 80e-9, "gold", (0.0, 180e-9)),))
        scene = build_grid_scene(spec)
        assert isinstance(scene.shapes[-1], Disc)
        assert scene.shapes[-1].material == "gold"
        assert scene.min_feature == pytest.approx(100e-9)
        with pytest.raises(InvalidSpecError):
            build_grid_scene(grid(1, 2, inclusions=(Inclusion(0, 200e-9, "gold", (0.0, 200e-9)),)))

    def test_from_dict_units(self):
        """Spec dictionaries accept SI-suffixed lengths and defaults."""
        spec = GridNetworkSpec.from_dict({'rows': 2, 'cols': 3, 'pitch': '2.089um', 'cavity_radius': '310nm'})
        assert spec.pitch == pytest.approx(PITCH)
        assert spec.channel_width == pytest.approx(100e-9)
        assert spec.cladding_material == PEC

    def test_from_dict_missing(self):
        """A missing field is an invalid spec."""
        with pytest.raises(InvalidSpecError):
            GridNetworkSpec.from_dict({'rows': 2, 'cols': 3})


class TestCutLine:
    """Tests for cavity centers and cut lines."""

    def test_adjacent_length(self):
        """A cut line between neighbours has the pitch as length."""
        points = cut_line(grid(2, 2), 0, 1, spacing=10e-9)
        assert polyline_length(points) == pytest.approx(PITCH)
        assert np.allclose(np.diff(points[:, 1]), 0.0)

    def test_spacing(self):
        """Samples are spaced by about the requested spacing."""
        points = cut_line(grid(2, 2), 0, 3, spacing=20e-9)
        steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
        assert steps.max() == pytest.approx(20e-9, rel=0.01)

    def test_bad_index(self):
        """Out-of-range cavity indices raise CavityIndexError."""
        with pytest.raises(CavityIndexError):
            cut_line(grid(2, 2), 0, 4, spacing=10e-9)

    def test_bent_follows_path(self):
        """For a bent channel the cut line follows the L path."""
        spec = BentChannelSpec((0.0, 0.0), (PITCH, PITCH), RADIUS, 100e-9)
        points = cut_line(spec, 0, 1, spacing=10e-9)
        assert polyline_length(points) == pytest.approx(2 * PITCH, rel=1e-6)
        assert polyline_length(cut_line(spec, 0, 1, spacing=10e-9, extend=RADIUS)) == pytest.approx(
            2 * PITCH + 2 * RADIUS, rel=1e-6
        )


class TestOtherScenes:
    """Tests for bent, guide, slab and empty scenes."""

    def test_bent_scene(self):
        """An L bend is two discs plus two channel legs."""
        spec = BentChannelSpec((0.0, 0.0), (PITCH, PITCH), RADIUS, 100e-9)
        scene = build_bent_scene(spec)
        assert scene.count(Disc) == 2
        assert scene.count(Rect) == 2
        assert scene.meta['path_length'] == pytest.approx(2 * PITCH)
        assert spec.corner == (PITCH, 0.0)

    def test_straight_bend_needs_alignment(self):
        """A straight channel needs axis-aligned centers."""
        with pytest.raises(InvalidSpecError):
            BentChannelSpec((0.0, 0.0), (PITCH, PITCH), RADIUS, 100e-9, bend="straight")

    def test_guide_scene(self):
        """Guide scenes record widths and exit position; the reference is straight."""
        spec = GuideSpec(a1=400e-9, a2=300e-9, channel_width=25e-9, channel_length=200e-9, guide_length=1.5e-6)
        scene = build_guide_scene(spec)
        assert scene.meta['a1'] == 400e-9
        assert scene.meta['exit_center'] == pytest.approx((100e-9, 100e-9 + 0.75e-6))
        assert scene.min_feature == pytest.approx(25e-9)
        ref = spec.reference()
        assert ref.bend == "straight"
        assert ref.a2 == ref.a1 == ref.channel_width

    def test_slab_scene(self):
        """A slab spans the domain height."""
        scene = build_slab_scene(200e-9, "sic", length=2e-6, height=0.5e-6)
        assert scene.kind == "slab"
        assert scene.width == pytest.approx(2e-6)
        with pytest.raises(InvalidSpecError):
            build_slab_scene(3e-6, "sic", length=2e-6, height=0.5e-6)

    def test_empty_scene(self):
        """Empty scenes are centered on the origin."""
        scene = build_empty_scene(2e-6, 1e-6)
        assert scene.center == (0.0, 0.0)
        assert scene.material_ids == ["vacuum"]


class TestRasterize:
    """Tests for rasterization."""

    def test_empty_scene_uniform(self):
        """An empty scene rasterizes to its background only."""
        raster = rasterize(build_empty_scene(1e-6, 0.5e-6), 50e-9)
        assert (raster.nx, raster.ny) == (20, 10)
        assert np.all(raster.ids == 0)

    def test_disc_area(self):
        """A disc of radius 5 cells fills pi*25 cells within the perimeter bound."""
        dx = 10e-9
        scene = Scene(bounds=(-8 * dx, -8 * dx, 8 * dx, 8 * dx), background="vacuum",
                      shapes=(Disc(0.0, 0.0, 5 * dx, "gold"),))
        count = rasterize(scene, dx).cell_count("gold")
        assert abs(count - math.pi * 25) <= 2 * math.pi * 5

    def test_refinement_within_perimeter_bound(self):
        """Halving the cell size keeps the area estimate within the perimeter bound."""
        scene = Scene(bounds=(-100e-9, -100e-9, 100e-9, 100e-9), background="vacuum",
                      shapes=(Disc(0.0, 0.0, 61e-9, "gold"),))
        coarse = rasterize(scene, 10e-9).cell_count("gold") * (10e-9) ** 2
        fine = rasterize(scene, 5e-9).cell_count("gold") * (5e-9) ** 2
        assert abs(coarse - fine) < 2 * math.pi * 61e-9 * 10e-9

    def test_mirror_symmetry(self):
        """A mirror-symmetric spec gives a mirror-symmetric raster."""
        raster = rasterize(build_grid_scene(grid(3, 3)), 25e-9)
        assert np.array_equal(raster.ids, raster.ids[::-1, :])
        assert np.array_equal(raster.ids, raster.ids[:, ::-1])

    def test_deterministic_across_workers(self):
        """The raster does not depend on the worker count."""
        scene = build_grid_scene(grid(2, 2))
        one = rasterize(scene, 25e-9, workers=1)
        many = rasterize(scene, 25e-9, workers=3)
        assert np.array_equal(one.ids, many.ids)

    def test_resolution_error(self):
        """Cells coarser than a quarter channel width are refused."""
        with pytest.raises(ResolutionError):
            rasterize(build_grid_scene(grid(2, 2)), 30e-9)

    def test_connectivity(self):
        """Every cavity is reachable from cavity 0 through non-cladding cells."""
        spec = grid(3, 3)
        raster = rasterize(build_grid_scene(spec), 25e-9)
        centers = cavity_centers(spec)
        reached = flood_connected(raster, raster.cell_of(*centers[0]))
        for c in centers:
            assert reached[raster.cell_of(*c)]

    def test_pec_mask(self):
        """PEC cladding cells are flagged."""
        raster = rasterize(build_grid_scene(grid(1, 1)), 25e-9)
        assert raster.pec_mask()[0, 0]
        assert not raster.pec_mask()[raster.cell_of(0.0, 0.0)]

    def test_raster_file(self, tmp_path):
        """Raster export keeps ids, table and origin."""
        raster = rasterize(build_grid_scene(grid(1, 2)), 25e-9)
        again = read_raster(write_raster(raster, tmp_path / "scene.bin"))
        assert np.array_equal(again.ids, raster.ids)
        assert [e.name for e in again.table] == [e.name for e in raster.table]
        assert again.origin == pytest.approx(raster.origin)

    def test_pgm_preview(self, tmp_path):
        """The preview is a binary PGM of nx by ny pixels."""
        raster = rasterize(build_grid_scene(grid(1, 2)), 25e-9)
        data = write_pgm(raster, tmp_path / "scene.pgm").read_bytes()
        header = f"P5\n{raster.nx} {raster.ny}\n255\n".encode('ascii')
        assert data.startswith(header)
        assert len(data) == len(header) + raster.nx * raster.ny
