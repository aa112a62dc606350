"""Video ingestion (Y4M, raw planar YUV) and synthetic test sequences.

Readers are generators yielding one luma :class:`~blockmatch.core.Frame` at a time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from .core import Frame


class IngestError(ValueError):
    pass


class SourceFormat(str, Enum):
    Y4M = "y4m"
    RAW_YUV420 = "420"
    RAW_Y_ONLY = "y"


@dataclass(frozen=True)
class SequenceSource:
    format: SourceFormat
    width: int
    height: int
    frame_count: int
    path: str


Y4M_MAGIC = b"YUV4MPEG2"
_CHROMA_420 = {"420", "420jpeg", "420paldv", "420mpeg2"}


def _chroma_bytes(colorspace: str, width: int, height: int) -> int:
    if colorspace == "mono":
        return 0
    if colorspace in _CHROMA_420:
        return 2 * ((width + 1) // 2) * ((height + 1) // 2)
    raise IngestError(f"unsupported Y4M colorspace C{colorspace} (only 4:2:0 and mono)")


def parse_y4m_header(line: bytes) -> dict:
    tokens = line.split()
    if not tokens or tokens[0] != Y4M_MAGIC:
        raise IngestError("not a Y4M stream (bad magic)")
    params = {}
    for tok in tokens[1:]:
        key, value = chr(tok[0]), tok[1:].decode("ascii", "replace")
        params.setdefault(key, value)
    if "W" not in params or "H" not in params:
        raise IngestError("Y4M header lacks W or H")
    try:
        width, height = int(params["W"]), int(params["H"])
    except ValueError:
        raise IngestError("Y4M header has non-integer W or H") from None
    if width <= 0 or height <= 0:
        raise IngestError("Y4M dimensions must be positive")
    colorspace = params.get("C", "420jpeg")
    if colorspace.startswith("mono") and colorspace != "mono":
        raise IngestError(f"only 8-bit video is supported, got C{colorspace}")
    _chroma_bytes(colorspace, width, height)
    return {"width": width, "height": height, "colorspace": colorspace, "params": params}


def _read_line(f: BinaryIO, limit: int = 4096) -> bytes:
    line = f.readline(limit)
    if line and not line.endswith(b"\n"):
        raise IngestError("unterminated Y4M header line")
    return line[:-1] if line else line


def read_y4m(path) -> Iterator[Frame]:
    """Yield the luma plane of every frame in a Y4M file; chroma is skipped."""
    with open(path, "rb") as f:
        yield from read_y4m_stream(f)


def read_y4m_stream(f: BinaryIO) -> Iterator[Frame]:
    header = parse_y4m_header(_read_line(f))
    w, h = header["width"], header["height"]
    luma_size = w * h
    chroma = _chroma_bytes(header["colorspace"], w, h)
    index = 0
    while True:
        marker = _read_line(f)
        if not marker:
            return
        if not marker.startswith(b"FRAME"):
            raise IngestError(f"expected FRAME marker before frame {index}")
        luma = f.read(luma_size)
        rest = f.read(chroma) if chroma else b""
        if len(luma) != luma_size or len(rest) != chroma:
            raise IngestError(f"truncated payload in frame {index}")
        yield Frame(np.frombuffer(luma, dtype=np.uint8).reshape(h, w))
        index += 1


def write_y4m(path, frames: Iterable[Frame], fps: str = "30:1", mono: bool = False) -> None:
    """Write frames as Y4M; chroma planes are filled with mid-grey unless ``mono``."""
    frames = iter(frames)
    first = next(frames, None)
    if first is None:
        raise IngestError("no frames to write")
    w, h = first.width, first.height
    cs = "mono" if mono else "420jpeg"
    chroma = bytes([128]) * _chroma_bytes(cs, w, h)
    with open(path, "wb") as f:
        f.write(b"YUV4MPEG2 W%d H%d F%s Ip A1:1 C%s\n" % (w, h, fps.encode(), cs.encode()))
        for frame in _chain(first, frames):
            if (frame.width, frame.height) != (w, h):
                raise IngestError("all frames must share one size")
            f.write(b"FRAME\n")
            f.write(frame.luma.tobytes())
            f.write(chroma)


def _chain(first, rest):
    yield first
    yield from rest


def frame_stride(width: int, height: int, fmt) -> int:
    fmt = SourceFormat(fmt)
    if fmt is SourceFormat.RAW_YUV420:
        return width * height + _chroma_bytes("420", width, height)
    if fmt is SourceFormat.RAW_Y_ONLY:
        return width * height
    raise IngestError("Y4M has no fixed stride")


def probe_raw(path, width: int, height: int, fmt=SourceFormat.RAW_YUV420) -> SequenceSource:
    if width <= 0 or height <= 0:
        raise IngestError("raw dimensions must be positive")
    stride = frame_stride(width, height, fmt)
    size = os.path.getsize(path)
    if size % stride:
        raise IngestError(f"file length {size} is not a multiple of the frame size {stride}")
    return SequenceSource(SourceFormat(fmt), width, height, size // stride, str(path))


def read_raw(path, width: int, height: int, fmt=SourceFormat.RAW_YUV420) -> Iterator[Frame]:
    """Yield luma planes from a headerless planar file (4:2:0 or luma-only)."""
    src = probe_raw(path, width, height, fmt)
    stride = frame_stride(width, height, fmt)
    with open(path, "rb") as f:
        for _ in range(src.frame_count):
            buf = f.read(stride)
            yield Frame(np.frombuffer(buf[:width * height], dtype=np.uint8).reshape(height, width))


def write_raw(path, frames: Iterable[Frame], fmt=SourceFormat.RAW_YUV420) -> None:
    fmt = SourceFormat(fmt)
    with open(path, "wb") as f:
        for frame in frames:
            f.write(frame.luma.tobytes())
            if fmt is SourceFormat.RAW_YUV420:
                f.write(bytes([128]) * _chroma_bytes("420", frame.width, frame.height))


def open_sequence(path, width=None, height=None, fmt=None) -> Iterator[Frame]:
    """Dispatch on extension: ``.y4m`` or raw with explicit size."""
    if fmt in (None, SourceFormat.Y4M, "y4m") and Path(path).suffix.lower() == ".y4m":
        return read_y4m(path)
    if width is None or height is None:
        raise IngestError("raw input needs an explicit size")
    return read_raw(path, width, height, fmt or SourceFormat.RAW_YUV420)


# synthetic sequences


def textured_base(width: int, height: int, cell: int = 16) -> np.ndarray:
    """Texture with a unimodal block-distortion surface around any displacement.

    Each ``cell`` x ``cell`` tile holds an elliptic cone (twice as steep
    vertically), and a frame-wide elliptic cone is added on top. Block matching on
    translated copies then has a single basin for displacements below ``cell``.
    """
    y, x = np.mgrid[0:height, 0:width].astype(float)
    ux = x % cell - (cell - 1) / 2
    uy = y % cell - (cell - 1) / 2
    local = np.sqrt(ux ** 2 + 2 * uy ** 2)
    gx = x - (width - 1) / 2
    gy = y - (height - 1) / 2
    wide = np.sqrt(gx ** 2 + 2 * gy ** 2)
    f = local / local.max() + 0.5 * wide / max(wide.max(), 1e-12)
    f -= f.min()
    return f * (235.0 / f.max()) + 10.0


def _shift(img: np.ndarray, dx: int, dy: int) -> np.ndarray:
    # out(x, y) = img(x + dx, y + dy), with wraparound
    return np.roll(img, shift=(-dy, -dx), axis=(0, 1))


def synth_sequence(kind: str, width: int, height: int, frames: int, dx: int = 0, dy: int = 0,
                   seed: int = 0) -> Iterator[Frame]:
    """Deterministic test sequences.

    ``static`` repeats one textured frame. ``translate`` moves the texture so that
    frame t sampled at (x, y) equals frame t-1 at (x + dx, y + dy); the true
    motion vector of every block is therefore (dx, dy). ``noise`` applies a
    seeded random shift in [-3, 3] per frame plus Gaussian sensor noise.
    """
    if kind == "static":
        base = np.rint(textured_base(width, height)).astype(np.uint8)
        for _ in range(frames):
            yield Frame(base)
    elif kind == "translate":
        base = textured_base(width, height)
        for t in range(frames):
            yield Frame(np.rint(_shift(base, t * dx, t * dy)).astype(np.uint8))
    elif kind == "noise":
        rng = np.random.default_rng(seed)
        img = textured_base(width, height)
        for t in range(frames):
            if t:
                sx, sy = rng.integers(-3, 4, size=2)
                img = _shift(img, int(sx), int(sy))
            noisy = img + rng.normal(0.0, 4.0, img.shape)
            yield Frame(np.clip(np.rint(noisy), 0, 255).astype(np.uint8))
    else:
        raise ValueError(f"unknown synthetic sequence kind {kind!r}")


def parse_synth(spec: str) -> dict:
    """Parse ``static``, ``translate:DX,DY`` or ``noise``."""
    name, _, args = spec.partition(":")
    if name == "translate":
        try:
            dx, dy = (int(v) for v in args.split(","))
        except ValueError:
            raise ValueError(f"bad translate spec {spec!r}, expected translate:DX,DY") from None
        return {"kind": "translate", "dx": dx, "dy": dy}
    if name in ("static", "noise") and not args:
        return {"kind": name}
    raise ValueError(f"unknown synthetic sequence {spec!r}")
