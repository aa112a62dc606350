import io

import numpy as np
import pytest

from blockmatch.core import Frame
from blockmatch.ingest import (
    IngestError,
    SourceFormat,
    frame_stride,
    open_sequence,
    parse_synth,
    parse_y4m_header,
    probe_raw,
    read_raw,
    read_y4m,
    read_y4m_stream,
    synth_sequence,
    write_raw,
    write_y4m,
)


def y4m_bytes(w, h, payloads, colorspace="mono"):
    out = b"YUV4MPEG2 W%d H%d F25:1 Ip A0:0 C%s\n" % (w, h, colorspace.encode())
    for p in payloads:
        out += b"FRAME\n" + bytes(p)
    return out


def test_minimal_y4m():
    frames = list(read_y4m_stream(io.BytesIO(y4m_bytes(2, 2, [[10, 20, 30, 40]]))))
    assert len(frames) == 1
    assert frames[0].luma.tolist() == [[10, 20], [30, 40]]


def test_y4m_skips_chroma():
    data = y4m_bytes(2, 2, [[1, 2, 3, 4, 99, 99], [5, 6, 7, 8, 99, 99]], "420jpeg")
    frames = list(read_y4m_stream(io.BytesIO(data)))
    assert [f.luma.ravel().tolist() for f in frames] == [[1, 2, 3, 4], [5, 6, 7, 8]]


def test_bad_magic():
    with pytest.raises(IngestError, match="magic"):
        list(read_y4m_stream(io.BytesIO(b"JUNK W2 H2\nFRAME\n1234")))


def test_truncated_second_frame():
    data = y4m_bytes(2, 2, [[1, 2, 3, 4]]) + b"FRAME\n\x01"
    with pytest.raises(IngestError, match="truncated"):
        list(read_y4m_stream(io.BytesIO(data)))


def test_bad_frame_marker():
    data = y4m_bytes(2, 2, [[1, 2, 3, 4]]) + b"FRAMX\n1234"
    with pytest.raises(IngestError):
        list(read_y4m_stream(io.BytesIO(data)))


@pytest.mark.parametrize(
    "header",
    [b"YUV4MPEG2 W2", b"YUV4MPEG2 W2 H0", b"YUV4MPEG2 W2 H2 C444", b"YUV4MPEG2 W2 H2 Cmono16", b"YUV4MPEG2 Wx H2"],
)
def test_bad_headers(header):
    with pytest.raises(IngestError):
        parse_y4m_header(header)


def test_y4m_round_trip(tmp_path):
    frames = list(synth_sequence("noise", 32, 16, 3, seed=9))
    for mono in (False, True):
        path = tmp_path / f"seq{mono}.y4m"
        write_y4m(path, frames, mono=mono)
        back = list(read_y4m(path))
        assert all(np.array_equal(a.luma, b.luma) for a, b in zip(frames, back))
        assert len(back) == 3
    with pytest.raises(IngestError):
        write_y4m(tmp_path / "x.y4m", [])


def test_raw_stride_and_count(tmp_path):
    assert frame_stride(352, 288, "420") == 152064
    path = tmp_path / "cif.yuv"
    path.write_bytes(bytes(152064 * 3))
    assert probe_raw(path, 352, 288).frame_count == 3
    assert len(list(read_raw(path, 352, 288))) == 3


def test_raw_divisibility(tmp_path):
    path = tmp_path / "bad.yuv"
    path.write_bytes(bytes(100))
    with pytest.raises(IngestError, match="multiple"):
        probe_raw(path, 8, 8, SourceFormat.RAW_YUV420)  # stride 96


def test_raw_y_only(tmp_path):
    path = tmp_path / "y.raw"
    path.write_bytes(bytes(range(8)))
    frames = list(read_raw(path, 2, 2, "y"))
    assert [f.luma.ravel().tolist() for f in frames] == [[0, 1, 2, 3], [4, 5, 6, 7]]


def test_raw_round_trip_and_dispatch(tmp_path):
    frames = list(synth_sequence("noise", 16, 16, 2, seed=3))
    path = tmp_path / "s.yuv"
    write_raw(path, frames)
    back = list(open_sequence(path, 16, 16))
    assert all(np.array_equal(a.luma, b.luma) for a, b in zip(frames, back))
    with pytest.raises(IngestError):
        open_sequence(path)


def test_synth_static():
    frames = list(synth_sequence("static", 32, 32, 3))
    assert len(frames) == 3
    assert all(np.array_equal(frames[0].luma, f.luma) for f in frames)
    assert frames[0].luma.std() > 10


def test_synth_translate():
    f0, f1, f2 = synth_sequence("translate", 64, 48, 3, dx=2, dy=-1)
    # frame t at (x, y) equals frame t-1 at (x + 2, y - 1)
    assert np.array_equal(f1.luma[1:, :-2], f0.luma[:-1, 2:])
    assert np.array_equal(f2.luma[1:, :-2], f1.luma[:-1, 2:])


def test_synth_noise_deterministic():
    a = [f.luma.tobytes() for f in synth_sequence("noise", 32, 32, 4, seed=1)]
    b = [f.luma.tobytes() for f in synth_sequence("noise", 32, 32, 4, seed=1)]
    c = [f.luma.tobytes() for f in synth_sequence("noise", 32, 32, 4, seed=2)]
    assert a == b and a != c


def test_parse_synth():
    assert parse_synth("translate:2,-1") == {"kind": "translate", "dx": 2, "dy": -1}
    assert parse_synth("noise") == {"kind": "noise"}
    for bad in ("translate:2", "wobble", "static:1"):
        with pytest.raises(ValueError):
            parse_synth(bad)
    with pytest.raises(ValueError):
        list(synth_sequence("wobble", 16, 16, 1))


def test_readers_stream_lazily(tmp_path):
    path = tmp_path / "s.y4m"
    write_y4m(path, synth_sequence("static", 16, 16, 5))
    it = read_y4m(path)
    assert isinstance(next(it), Frame)
