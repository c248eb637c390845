"""Parameter checkpoint serialization.

Wire format, all integers little-endian uint32:
  magic b"PTFSE\\x01"
  count
  count records of: name_len, name (UTF-8), rank, rank dims,
  float32 little-endian values in row-major order.
Records are written in sorted name order so files are reproducible.
"""

import struct

import numpy as np

from ..errors import UnsupportedFormatError
from .tensor import DiffTensor

CHECKPOINT_MAGIC = b"PTFSE\x01"


def save_checkpoint(path, params: dict) -> None:
    chunks = [CHECKPOINT_MAGIC, struct.pack("<I", len(params))]
    for name in sorted(params):
        value = params[name]
        arr = np.asarray(value.data if isinstance(value, DiffTensor) else value,
                         dtype=np.float32)
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.astype("<f4").tobytes(order="C"))
    with open(path, "wb") as fh:
        fh.write(b"".join(chunks))


class _Reader:
    def __init__(self, blob: bytes, path):
        self.blob = blob
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise UnsupportedFormatError(
                f"truncated checkpoint {self.path}: wanted {n} bytes at "
                f"offset {self.pos}, file has {len(self.blob)}"
            )
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def load_checkpoint(path) -> dict:
    """Read a checkpoint into a dict of float32 arrays keyed by name."""
    with open(path, "rb") as fh:
        blob = fh.read()
    rd = _Reader(blob, path)
    if rd.take(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
        raise UnsupportedFormatError(f"{path} is not a checkpoint (bad magic)")
    count = rd.u32()
    params = {}
    for _ in range(count):
        name = rd.take(rd.u32()).decode("utf-8")
        rank = rd.u32()
        dims = tuple(rd.u32() for _ in range(rank))
        n_values = 1
        for d in dims:
            n_values *= d
        values = np.frombuffer(rd.take(4 * n_values), dtype="<f4")
        params[name] = values.reshape(dims).astype(np.float32)
    if rd.pos != len(blob):
        raise UnsupportedFormatError(
            f"{path} has {len(blob) - rd.pos} trailing bytes after "
            f"{count} parameter records"
        )
    return params
