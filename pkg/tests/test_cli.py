"""CLI subcommands: synth, process, bench."""

import json

import numpy as np
import pytest

from depthmatte.cli import main
from depthmatte.frames import to_uint8
from depthmatte.rgbd_io import SceneSpec, load_color, load_manifest, silhouette_mask

SMALL_SCENE = dict(subject_depth_m=1.0, background_depth_m=3.0,
                   color_width=40, color_height=32,
                   depth_width=40, depth_height=32,
                   velocity_px_per_frame=4.0, noise_sigma=0.0)


def _write_scene(tmp_path, **overrides):
    spec = {**SMALL_SCENE, **overrides}
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(spec))
    return path


class TestSynth:
    def test_writes_dataset_and_manifest(self, tmp_path):
        spec_path = _write_scene(tmp_path)
        out = tmp_path / "ds"
        assert main(["synth", "--spec", str(spec_path), "--frames", "10",
                     "--out", str(out)]) == 0
        assert len(list(out.glob("color_*.png"))) == 10
        assert len(list(out.glob("depth_*.bin"))) == 10
        manifest = load_manifest(out / "manifest.json")
        assert len(manifest.entries) == 10
        assert manifest.background == "background.png"
        manifest.verify(out)

    def test_velocity_shifts_silhouette(self, tmp_path):
        spec_path = _write_scene(tmp_path)
        out = tmp_path / "ds"
        main(["synth", "--spec", str(spec_path), "--frames", "2", "--out", str(out)])
        spec = SceneSpec.from_dict({**SMALL_SCENE})
        c0 = load_color(out / "color_0000.png")
        c1 = load_color(out / "color_0001.png")
        m0 = silhouette_mask(spec, 0, 40, 32)
        m1 = silhouette_mask(spec, 1, 40, 32)
        # frame 1's subject sits exactly where frame 0's shifted by 4 px
        np.testing.assert_array_equal(c1.pixels[m1], c0.pixels[m0])
        assert not np.array_equal(c0.pixels, c1.pixels)

    def test_invalid_spec_fails(self, tmp_path):
        spec_path = _write_scene(tmp_path, subject_depth_m=4.0, background_depth_m=2.0)
        assert main(["synth", "--spec", str(spec_path), "--frames", "1",
                     "--out", str(tmp_path / "ds")]) == 1

    def test_seed_reproducible(self, tmp_path):
        spec_path = _write_scene(tmp_path, noise_sigma=0.05)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["synth", "--spec", str(spec_path), "--frames", "2",
              "--out", str(out_a), "--seed", "5"])
        main(["synth", "--spec", str(spec_path), "--frames", "2",
              "--out", str(out_b), "--seed", "5"])
        assert ((out_a / "color_0001.png").read_bytes()
                == (out_b / "color_0001.png").read_bytes())


class TestProcess:
    @pytest.fixture()
    def dataset(self, tmp_path):
        spec_path = _write_scene(tmp_path, velocity_px_per_frame=0.0)
        out = tmp_path / "ds"
        main(["synth", "--spec", str(spec_path), "--frames", "4", "--out", str(out)])
        return out

    def test_counts(self, dataset, tmp_path):
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"depth_m": 2.0}))
        out = tmp_path / "run"
        assert main(["process", "--manifest", str(dataset / "manifest.json"),
                     "--params", str(params), "--out", str(out)]) == 0
        assert len(list(out.glob("composite_*.png"))) == 4
        lines = (out / "timings.csv").read_text().strip().split("\n")
        assert len(lines) == 5  # header + 4 rows

    def test_composite_pixels_split_by_silhouette(self, dataset, tmp_path):
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"depth_m": 2.0, "rolloff_m": 0.0}))
        out = tmp_path / "run"
        main(["process", "--manifest", str(dataset / "manifest.json"),
              "--params", str(params), "--out", str(out)])
        spec = SceneSpec.from_dict({**SMALL_SCENE, "velocity_px_per_frame": 0.0})
        mask = silhouette_mask(spec, 0, 40, 32)
        composite = load_color(out / "composite_0000.png")
        color = load_color(dataset / "color_0000.png")
        background = load_color(dataset / "background.png")
        comp8 = to_uint8(composite)
        np.testing.assert_array_equal(comp8[mask][:, :3], to_uint8(color)[mask][:, :3])
        np.testing.assert_array_equal(comp8[~mask][:, :3],
                                      to_uint8(background)[~mask][:, :3])

    def test_missing_depth_file_names_path(self, dataset, tmp_path, capsys):
        (dataset / "depth_0002.bin").unlink()
        out = tmp_path / "run"
        assert main(["process", "--manifest", str(dataset / "manifest.json"),
                     "--out", str(out)]) == 1
        assert "depth_0002.bin" in capsys.readouterr().err

    def test_frames_flag_limits(self, dataset, tmp_path):
        out = tmp_path / "run"
        assert main(["process", "--manifest", str(dataset / "manifest.json"),
                     "--frames", "2", "--out", str(out)]) == 0
        assert len(list(out.glob("composite_*.png"))) == 2


class TestBench:
    def test_writes_reports(self, tmp_path):
        out = tmp_path / "bench"
        assert main(["bench", "--resolutions", "32x24", "--kernels", "0,3",
                     "--reps", "3", "--out", str(out)]) == 0
        csv = (out / "bench.csv").read_text()
        assert csv.startswith("width,height,kernel,")
        assert len(csv.strip().split("\n")) == 3
        assert (out / "bench.md").read_text().startswith("# close+composite latency")

    def test_bad_reps_fails(self, tmp_path):
        assert main(["bench", "--resolutions", "8x8", "--kernels", "0",
                     "--reps", "1", "--out", str(tmp_path / "b")]) == 1
