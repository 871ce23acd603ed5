"""Checkpoint format: flat binary of named tensors plus a JSON manifest.

Layout of a ``.ckpt`` file::

    magic "NRCK1\\n" | u64 manifest length | manifest JSON (utf-8) | raw data

The manifest maps each tensor name to ``{shape, dtype, offset, nbytes}``
with offsets into the raw data section; arrays are stored little-endian
in C order, so a save/load round trip is bit exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"NRCK1\n"


def save_checkpoint(path: str | Path, arrays: dict[str, np.ndarray]) -> None:
    manifest = {}
    blobs = []
    offset = 0
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        raw = le.tobytes()
        manifest[name] = {
            "shape": list(arr.shape),
            "dtype": arr.dtype.name,
            "offset": offset,
            "nbytes": len(raw),
        }
        blobs.append(raw)
        offset += len(raw)
    mjson = json.dumps(manifest, sort_keys=True).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(mjson)))
        f.write(mjson)
        for raw in blobs:
            f.write(raw)


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not a checkpoint file: {path}")
        (mlen,) = struct.unpack("<Q", f.read(8))
        manifest = json.loads(f.read(mlen).decode("utf-8"))
        data = f.read()
    out = {}
    for name, meta in manifest.items():
        raw = data[meta["offset"]: meta["offset"] + meta["nbytes"]]
        arr = np.frombuffer(raw, dtype=np.dtype(meta["dtype"]).newbyteorder("<"))
        out[name] = arr.reshape(meta["shape"]).astype(meta["dtype"])
    return out


@dataclass
class LoadReport:
    loaded: list[str]
    missing: list[str]
    ignored: list[str]


def load_into(bag, path: str | Path, strict: bool = False) -> LoadReport:
    """Copy checkpoint arrays into a :class:`ParameterBag` by name.

    Parameters absent from the file always raise (the model would run
    uninitialized). Extra names in the file are ignored and reported,
    which lets a late-fusion evaluator reuse an early-fusion checkpoint;
    ``strict=True`` rejects extras too.
    """
    arrays = load_checkpoint(path)
    loaded, missing, ignored = [], [], []
    for p in bag.parameters():
        if p.name in arrays:
            arr = arrays[p.name]
            if tuple(arr.shape) != p.shape:
                raise ValueError(
                    f"checkpoint shape mismatch for {p.name}: {arr.shape} vs {p.shape}")
            p.tensor.data = np.ascontiguousarray(arr, dtype=bag.dtype)
            loaded.append(p.name)
        else:
            missing.append(p.name)
    ignored = [n for n in arrays if n not in bag._params]
    if missing:
        raise ValueError(f"checkpoint {path} missing parameters: {missing[:5]}"
                         + ("..." if len(missing) > 5 else ""))
    if strict and ignored:
        raise ValueError(f"checkpoint {path} has unexpected parameters: {ignored[:5]}")
    return LoadReport(loaded, missing, ignored)
