import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from klpca import data
from klpca.data import GrayImage
from klpca.errors import InvalidInput, ParseError


class TestShellBall:
    def test_regions_and_labels(self):
        cloud = data.gen_shell_ball(200, 50, seed=0)
        r2 = np.sum(cloud.points**2, axis=0)
        assert cloud.points.shape == (3, 250)
        shell = cloud.labels == 0
        assert shell.sum() == 200 and np.all(shell[:200])
        assert np.all((r2[shell] > 0.6) & (r2[shell] < 1.0))
        assert np.all(r2[~shell] < 0.2)

    def test_deterministic(self):
        a = data.gen_shell_ball(30, 10, seed=5)
        b = data.gen_shell_ball(30, 10, seed=5)
        np.testing.assert_array_equal(a.points, b.points)
        assert not np.array_equal(a.points, data.gen_shell_ball(30, 10, seed=6).points)

    def test_roughly_isotropic(self):
        pts = data.gen_shell_ball(2000, 10, seed=1).points[:, :2000]
        # a uniform shell has zero mean; SE per coordinate is about 0.018
        assert np.abs(pts.mean(axis=1)).max() < 0.08

    def test_bad_sizes(self):
        with pytest.raises(InvalidInput):
            data.gen_shell_ball(0, 5)


class TestEllipses:
    def test_shape_and_matrix(self):
        stack = data.gen_rotated_ellipses(4, 32)
        assert stack.images.shape == (4, 32, 32)
        M = stack.matrix
        assert M.shape == (1024, 4)
        np.testing.assert_array_equal(M[:, 2], stack.images[2].ravel())
        np.testing.assert_allclose(stack.angles, np.arange(4) * np.pi / 4)

    def test_half_turn_wraps(self):
        a = data.render_ellipse(48, 15.0, 6.0, 0.3)
        b = data.render_ellipse(48, 15.0, 6.0, 0.3 + np.pi)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_ink_roughly_constant(self):
        stack = data.gen_rotated_ellipses(36, 64)
        ink = stack.images.sum(axis=(1, 2))
        assert (ink.max() - ink.min()) / ink.mean() < 0.01
        assert ink.mean() == pytest.approx(np.pi * 0.35 * 0.15 * 64**2, rel=0.02)

    def test_quarter_turn_transposes(self):
        a = data.render_ellipse(40, 12.0, 5.0, 0.0)
        b = data.render_ellipse(40, 12.0, 5.0, np.pi / 2)
        np.testing.assert_allclose(b, a.T, atol=1e-12)

    @pytest.mark.parametrize("axes", [(5.0, 5.0), (3.0, 6.0), (4.0, 0.0)])
    def test_bad_axes(self, axes):
        with pytest.raises(InvalidInput):
            data.gen_rotated_ellipses(4, 32, semi_axes=axes)

    def test_bad_size(self):
        with pytest.raises(InvalidInput):
            data.gen_rotated_ellipses(4, 8)


class TestCsv:
    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 5)),
                  elements=st.floats(allow_nan=False, allow_infinity=False)))
    def test_round_trip_bit_exact(self, tmp_path_factory, M):
        path = tmp_path_factory.mktemp("csv") / "m.csv"
        data.write_csv(path, M)
        back = data.read_csv(path)
        assert back.tobytes() == np.ascontiguousarray(M).tobytes()

    def test_header(self, tmp_path):
        path = tmp_path / "h.csv"
        data.write_csv(path, [[1.0, 2.0], [3.0, 4.0]], header=["a", "b"])
        M, header = data.read_csv(path, with_header=True)
        assert header == ["a", "b"]
        np.testing.assert_array_equal(M, [[1, 2], [3, 4]])

    def test_no_header_returns_none(self):
        M, header = data.parse_csv("1,2\n3,4\n", with_header=True)
        assert header is None and M.shape == (2, 2)

    def test_blank_lines_skipped(self):
        np.testing.assert_array_equal(data.parse_csv("1,2\n\n3,4\n"), [[1, 2], [3, 4]])

    @pytest.mark.parametrize(
        "text,line",
        [("", 1), ("a,b\n", 2), ("1,2\n3\n", 2), ("1,2\n3,x\n", 2), ("1,2\n3,nan\n", 2)],
    )
    def test_errors(self, text, line):
        with pytest.raises(ParseError) as err:
            data.parse_csv(text)
        assert err.value.line == line
        assert f"line {line}" in str(err.value)


class TestPgm:
    def test_half_gray(self, tmp_path):
        path = tmp_path / "g.pgm"
        data.write_pgm(path, GrayImage(np.full((2, 3), 0.5)))
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n3 2\n255\n")
        assert raw[-6:] == bytes([128] * 6)
        img = data.read_pgm(path)
        np.testing.assert_allclose(img.pixels, 128 / 255)

    @pytest.mark.parametrize("binary", [True, False])
    def test_round_trip(self, tmp_path, binary):
        q = np.random.default_rng(0).integers(0, 256, size=(5, 7))
        img = GrayImage(q / 255.0)
        path = tmp_path / "r.pgm"
        data.write_pgm(path, img, binary=binary)
        back = data.read_pgm(path)
        np.testing.assert_array_equal(data.quantize(back.pixels), q)
        assert back.pixels.shape == (5, 7)

    def test_comments_preserved(self):
        raw = b"P2\n# made by hand\n2 1\n# second\n255\n0 255\n"
        img = data.parse_pgm(raw)
        assert img.comments == ("made by hand", "second")
        np.testing.assert_array_equal(img.pixels, [[0.0, 1.0]])

    def test_small_maxval(self):
        img = data.parse_pgm(b"P2 2 1 4 0 2")
        np.testing.assert_array_equal(img.pixels, [[0.0, 0.5]])

    def test_quantize_half_up(self):
        np.testing.assert_array_equal(data.quantize([0.0, 0.5, 1.0, 1 / 510]), [0, 128, 255, 1])

    @pytest.mark.parametrize(
        "raw",
        [
            b"",
            b"P6\n1 1\n255\n\x00",
            b"P5\n2 2\n255\n\x00\x01",
            b"P2\n2 1\n255\n0",
            b"P2\n1 1\n300\n0",
            b"P2\n1 1\n255\n-3",
            b"P2\n1 1\n10\n11",
        ],
    )
    def test_parse_errors(self, raw):
        with pytest.raises(ParseError):
            data.parse_pgm(raw)

    def test_truncated_reports_offset(self):
        with pytest.raises(ParseError) as err:
            data.parse_pgm(b"P5\n2 2\n255\n\x00\x01")
        assert err.value.offset == 13

    def test_image_validation(self):
        with pytest.raises(InvalidInput):
            GrayImage(np.full((2, 2), 1.2))
