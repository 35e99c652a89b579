import hashlib
import urllib.request

import numpy as np
import pytest

from riskbench import load, normalize_to_unit_ball, synthetic_mixture
from riskbench.errors import (ChecksumMismatch, EmptyInput, InconsistentWidth,
                              NetworkError, ParseError)
from riskbench.ingest import RawDataset, fetch


class TestLoad:
    def test_csv_two_by_two(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("0,1\n1,0\n")
        raw = load(path, format="csv")
        assert raw.matrix.shape == (2, 2)
        assert np.allclose(raw.matrix, [[0, 1], [1, 0]])
        assert raw.labels is None

    def test_csv_label_column(self, tmp_path):
        path = tmp_path / "labeled.csv"
        path.write_text("0.5,1.5,1\n2.5,3.5,0\n")
        raw = load(path, format="csv", label_col="last")
        assert raw.matrix.shape == (2, 2)
        assert raw.labels.tolist() == [1.0, 0.0]

    def test_libsvm_sparse_row(self, tmp_path):
        path = tmp_path / "row.svm"
        path.write_text("1 1:0.5 3:0.25\n")
        raw = load(path, format="libsvm")
        assert raw.matrix.shape == (1, 3)
        assert np.allclose(raw.matrix[0], [0.5, 0.0, 0.25])
        assert raw.labels.tolist() == [1.0]

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        mat = rng.uniform(-2, 2, (7, 4))
        path = tmp_path / "round.csv"
        path.write_text("\n".join(",".join(repr(float(v)) for v in row)
                                  for row in mat))
        raw = load(path, format="csv")
        assert np.array_equal(raw.matrix, mat)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(ParseError) as err:
            load(path, format="csv")
        assert err.value.line == 2

    def test_inconsistent_width(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(InconsistentWidth):
            load(path, format="csv")


class TestNormalize:
    def test_single_point_maps_to_origin(self):
        raw = RawDataset(np.array([[3.0, -4.0]]), None, "mem")
        P = normalize_to_unit_ball(raw)
        assert np.allclose(P.points, 0.0)

    def test_two_points_straddle_origin(self):
        raw = RawDataset(np.array([[0.0, 0.0], [2.0, 0.0]]), None, "mem")
        P = normalize_to_unit_ball(raw)
        assert np.allclose(sorted(P.points[:, 0]), [-1.0, 1.0])
        assert P.max_norm() == pytest.approx(1.0)
        assert P.normalization["scale"] == pytest.approx(1.0)

    def test_random_cloud_exact_unit_norm_and_ratios(self):
        rng = np.random.default_rng(4)
        raw = RawDataset(rng.uniform(-10, 6, (40, 3)), None, "mem")
        P = normalize_to_unit_ball(raw)
        assert abs(P.max_norm() - 1.0) < 1e-12
        assert P.validate_in_ball(1e-12)
        d_raw = np.linalg.norm(raw.matrix[:, None] - raw.matrix[None, :], axis=2)
        d_new = np.linalg.norm(P.points[:, None] - P.points[None, :], axis=2)
        iu = np.triu_indices(40, 1)
        ratios = d_new[iu] / d_raw[iu]
        assert ratios.max() - ratios.min() < 1e-9

    def test_small_cloud_unscaled(self):
        raw = RawDataset(np.array([[0.1, 0.0], [-0.1, 0.0]]), None, "mem")
        P = normalize_to_unit_ball(raw)
        assert P.max_norm() == pytest.approx(0.1)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            normalize_to_unit_ball(RawDataset(np.zeros((0, 2)), None, "mem"))


class TestFetch:
    def _serve(self, tmp_path, payload: bytes):
        src = tmp_path / "payload.bin"
        src.write_bytes(payload)
        return src.as_uri(), hashlib.sha256(payload).hexdigest()

    def test_fetch_verifies_and_writes(self, tmp_path):
        url, digest = self._serve(tmp_path, b"hello risk")
        dest = tmp_path / "out" / "data.bin"
        assert fetch(url, digest, dest) == dest
        assert dest.read_bytes() == b"hello risk"

    def test_tampered_payload_leaves_no_file(self, tmp_path):
        url, _ = self._serve(tmp_path, b"tampered!")
        wrong = hashlib.sha256(b"expected").hexdigest()
        dest = tmp_path / "data.bin"
        with pytest.raises(ChecksumMismatch):
            fetch(url, wrong, dest)
        assert not dest.exists()

    def test_cache_hit_skips_download(self, tmp_path, monkeypatch):
        url, digest = self._serve(tmp_path, b"cache me")
        dest = tmp_path / "data.bin"
        fetch(url, digest, dest)
        calls = {"n": 0}
        real = urllib.request.urlopen

        def counting(*args, **kwargs):
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(urllib.request, "urlopen", counting)
        fetch(url, digest, dest)
        assert calls["n"] == 0

    def test_network_error(self, tmp_path):
        with pytest.raises(NetworkError):
            fetch((tmp_path / "missing.bin").as_uri(), "00" * 32,
                  tmp_path / "x.bin")


class TestSyntheticMixture:
    def test_inside_ball_and_deterministic(self):
        a = synthetic_mixture(500, 8, 5, 0.1, seed=2)
        b = synthetic_mixture(500, 8, 5, 0.1, seed=2)
        assert a.validate_in_ball(1e-12)
        assert np.array_equal(a.points, b.points)
        assert a.n == 500 and a.d == 8
