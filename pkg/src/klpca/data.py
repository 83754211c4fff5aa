"""Synthetic datasets and file I/O (CSV matrices, PGM images)."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInput, ParseError

SHELL_RANGE = (0.6, 1.0)
BALL_RADIUS_SQ = 0.2


@dataclass(frozen=True)
class LabeledCloud:
    points: np.ndarray  # 3 x n
    labels: np.ndarray  # 0 = shell, 1 = ball
    seed: int


def _rejection(gen: np.random.Generator, count: int, accept) -> np.ndarray:
    out = np.empty((0, 3))
    while out.shape[0] < count:
        batch = gen.uniform(-1.0, 1.0, size=(max(256, 8 * (count - out.shape[0])), 3))
        out = np.vstack([out, batch[accept(np.sum(batch * batch, axis=1))]])
    return out[:count]


def gen_shell_ball(n_shell: int = 200, n_ball: int = 50, seed: int = 0) -> LabeledCloud:
    """Uniform points in the shell ``0.6 < |x|^2 < 1`` (label 0) and in the ball
    ``|x|^2 < 0.2`` (label 1), by rejection from the cube ``[-1, 1]^3``."""
    if n_shell < 1 or n_ball < 1:
        raise InvalidInput("class sizes must be >= 1")
    gen = np.random.default_rng(seed)
    lo, hi = SHELL_RANGE
    shell = _rejection(gen, n_shell, lambda r2: (r2 > lo) & (r2 < hi))
    ball = _rejection(gen, n_ball, lambda r2: r2 < BALL_RADIUS_SQ)
    labels = np.concatenate([np.zeros(n_shell, dtype=int), np.ones(n_ball, dtype=int)])
    return LabeledCloud(np.vstack([shell, ball]).T.copy(), labels, seed)


# ---------------------------------------------------------------------------
# images


@dataclass(frozen=True)
class GrayImage:
    pixels: np.ndarray  # height x width, values in [0, 1]
    comments: tuple[str, ...] = field(default=())

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=float)
        if p.ndim != 2:
            raise InvalidInput("image must be 2-D")
        if p.size and (not np.all(np.isfinite(p)) or p.min() < 0 or p.max() > 1):
            raise InvalidInput("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", p)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class ImageStack:
    images: np.ndarray  # n x res x res
    angles: np.ndarray

    def __len__(self):
        return self.images.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Images unrolled row-major as columns: ``res^2 x n``."""
        return self.images.reshape(len(self), -1).T.copy()


def render_ellipse(resolution: int, a: float, b: float, theta: float) -> np.ndarray:
    """Filled centered ellipse with semi-axes ``a`` (along angle ``theta``) and
    ``b``, in pixels, anti-aliased by 2x2 supersampling."""
    theta = theta % np.pi
    c = (resolution - 1) / 2.0
    offs = np.array([-0.25, 0.25])
    # subsample coordinates: x to the right, y up
    cols = (np.arange(resolution)[:, None] + offs[None, :]).ravel() - c
    rows = c - (np.arange(resolution)[:, None] + offs[None, :]).ravel()
    X, Y = np.meshgrid(cols, rows)
    u = X * np.cos(theta) + Y * np.sin(theta)
    v = -X * np.sin(theta) + Y * np.cos(theta)
    inside = (u / a) ** 2 + (v / b) ** 2 <= 1.0
    return inside.reshape(resolution, 2, resolution, 2).mean(axis=(1, 3))


def gen_rotated_ellipses(
    n_images: int = 36, resolution: int = 64, semi_axes: tuple[float, float] | None = None
) -> ImageStack:
    """Image ``k`` shows the ellipse rotated by ``k * pi / n_images``.

    Default semi-axes are ``0.35 * resolution`` and ``0.15 * resolution``.
    """
    if resolution < 16:
        raise InvalidInput("resolution must be >= 16")
    if n_images < 4:
        raise InvalidInput("need at least 4 images")
    a, b = semi_axes if semi_axes is not None else (0.35 * resolution, 0.15 * resolution)
    if not a > b > 0:
        raise InvalidInput("semi-axes must satisfy a > b > 0")
    angles = np.arange(n_images) * np.pi / n_images
    images = np.stack([render_ellipse(resolution, a, b, t) for t in angles])
    return ImageStack(images, angles)


# ---------------------------------------------------------------------------
# CSV


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_csv(text: str, with_header: bool = False):
    """Rows are samples, columns features. A first line with any non-numeric
    field is taken as a header."""
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text)))]
    rows = [(i, [f.strip() for f in r]) for i, r in rows if any(f.strip() for f in r)]
    if not rows:
        raise ParseError("empty CSV", line=1)
    header = None
    if not all(_is_number(f) for f in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
        if not rows:
            raise ParseError("CSV has a header but no data", line=2)
    width = len(header) if header is not None else len(rows[0][1])
    data = []
    for lineno, fields in rows:
        if len(fields) != width:
            raise ParseError(f"expected {width} fields, got {len(fields)}", line=lineno)
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ParseError("non-numeric field", line=lineno) from None
        if not all(np.isfinite(vals)):
            raise ParseError("non-finite value", line=lineno)
        data.append(vals)
    M = np.array(data, dtype=float)
    return (M, header) if with_header else M


def read_csv(path, with_header: bool = False):
    return parse_csv(Path(path).read_text(), with_header=with_header)


def write_csv(path, M, header=None) -> None:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in M:
            w.writerow([format(float(v), ".17g") for v in row])


# ---------------------------------------------------------------------------
# PGM


class _Tokens:
    """Header tokenizer for netpbm files; collects ``#`` comments."""

    def __init__(self, raw: bytes):
        self.raw = raw
        self.pos = 0
        self.comments: list[str] = []

    def _skip(self):
        raw = self.raw
        while self.pos < len(raw):
            ch = raw[self.pos : self.pos + 1]
            if ch.isspace():
                self.pos += 1
            elif ch == b"#":
                end = raw.find(b"\n", self.pos)
                end = len(raw) if end < 0 else end
                self.comments.append(raw[self.pos + 1 : end].decode("latin-1").strip())
                self.pos = end
            else:
                return

    def next(self, what: str) -> bytes:
        self._skip()
        start = self.pos
        raw = self.raw
        while self.pos < len(raw) and not raw[self.pos : self.pos + 1].isspace() and raw[self.pos : self.pos + 1] != b"#":
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"unexpected end of file reading {what}", offset=start)
        return raw[start : self.pos]

    def integer(self, what: str) -> int:
        start = self.pos
        tok = self.next(what)
        if not tok.isdigit():
            raise ParseError(f"bad {what} {tok!r}", offset=start)
        return int(tok)


def parse_pgm(raw: bytes) -> GrayImage:
    if not raw:
        raise ParseError("empty file", offset=0)
    tok = _Tokens(raw)
    magic = tok.next("magic number")
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"unsupported magic {magic!r}", offset=0)
    width = tok.integer("width")
    height = tok.integer("height")
    maxval = tok.integer("maxval")
    if width < 1 or height < 1:
        raise ParseError("image dimensions must be positive", offset=tok.pos)
    if not 1 <= maxval <= 255:
        raise ParseError(f"maxval {maxval} outside [1, 255]", offset=tok.pos)
    n = width * height
    if magic == b"P5":
        start = tok.pos + 1  # single whitespace byte after maxval
        if start > len(raw) or not raw[tok.pos : start].isspace():
            raise ParseError("missing raster separator", offset=tok.pos)
        body = raw[start : start + n]
        if len(body) < n:
            raise ParseError(f"raster truncated: {len(body)} of {n} bytes", offset=start + len(body))
        vals = np.frombuffer(body, dtype=np.uint8).astype(float)
    else:
        vals = np.array([tok.integer("pixel") for _ in range(n)], dtype=float)
    if vals.max(initial=0) > maxval:
        raise ParseError("pixel exceeds maxval", offset=tok.pos)
    return GrayImage((vals / maxval).reshape(height, width), tuple(tok.comments))


def read_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def quantize(pixels) -> np.ndarray:
    """``round(v * 255)`` with halves rounded up."""
    return np.floor(np.clip(np.asarray(pixels, dtype=float), 0, 1) * 255 + 0.5).astype(np.uint8)


def encode_pgm(image: GrayImage, binary: bool = True) -> bytes:
    q = quantize(image.pixels)
    head = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n255\n".encode()
    if binary:
        return head + q.tobytes()
    lines = [" ".join(str(int(v)) for v in row) for row in q]
    return head + ("\n".join(lines) + "\n").encode()


def write_pgm(path, image: GrayImage, binary: bool = True) -> None:
    Path(path).write_bytes(encode_pgm(image, binary=binary))
