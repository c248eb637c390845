"""RIFF/WAVE reader and writer, restricted to 16-bit PCM mono 16 kHz.

The narrow surface is deliberate: one bit-exact container, nothing else.
Rejections name the offending field.
"""

import struct

import numpy as np

from ..errors import InvalidInputError, UnsupportedFormatError
from .types import PIPELINE_SAMPLE_RATE, Waveform

_PCM_FORMAT = 1
_BITS = 16


def read_wav(path) -> Waveform:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or len(fmt) < 16:
        raise UnsupportedFormatError(f"{path}: missing fmt chunk")
    if payload is None:
        raise UnsupportedFormatError(f"{path}: missing data chunk")

    audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if audio_format != _PCM_FORMAT:
        raise UnsupportedFormatError(f"{path}: audio format {audio_format} is not PCM")
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: {channels} channels, only mono supported")
    if bits != _BITS:
        raise UnsupportedFormatError(f"{path}: {bits}-bit samples, only 16-bit supported")
    if rate != PIPELINE_SAMPLE_RATE:
        raise UnsupportedFormatError(
            f"{path}: sample rate {rate} Hz, only {PIPELINE_SAMPLE_RATE} Hz supported"
        )

    raw = np.frombuffer(payload[: (len(payload) // 2) * 2], dtype="<i2")
    if raw.size == 0:
        raise InvalidInputError(f"{path}: empty data chunk")
    return Waveform(raw.astype(np.float64) / 32768.0, rate)


def write_wav(path, w: Waveform) -> None:
    if w.sample_rate != PIPELINE_SAMPLE_RATE:
        raise UnsupportedFormatError(
            f"refusing to write sample rate {w.sample_rate}, pipeline is "
            f"{PIPELINE_SAMPLE_RATE} Hz"
        )
    clipped = np.clip(w.samples, -1.0, 1.0)
    ints = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()

    byte_rate = w.sample_rate * _BITS // 8
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    fmt = b"fmt " + struct.pack(
        "<IHHIIHH", 16, _PCM_FORMAT, 1, w.sample_rate, byte_rate, _BITS // 8, _BITS
    )
    data_hdr = b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as fh:
        fh.write(header + fmt + data_hdr + payload)
