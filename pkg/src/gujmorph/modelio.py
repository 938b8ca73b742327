"""Single-file model serialization.

Layout: magic line, 8-byte little-endian header length, UTF-8 JSON header
(kind, hyperparameters, vocabulary, class list, tensor manifest), then each
tensor's raw row-major little-endian float64 bytes in manifest order.
Round-trips are bit-exact.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import DataError
from .nn import Hyper, ModelParams, TENSOR_ORDER
from .script import Vocab

MAGIC = b"GMORPH1\n"


def save_model(params: ModelParams, path) -> None:
    params.check_consistent()
    manifest = [
        {"name": name, "shape": list(params.tensors[name].shape)}
        for name in TENSOR_ORDER
    ]
    header = {
        "kind": params.kind,
        "hyper": {
            "embed_dim": params.hyper.embed_dim,
            "hidden_dim": params.hyper.hidden_dim,
            "lr": params.hyper.lr,
            "epochs": params.hyper.epochs,
            "batch_size": params.hyper.batch_size,
            "seed": params.hyper.seed,
            "threshold": params.hyper.threshold,
            "clip_norm": params.hyper.clip_norm,
        },
        "vocab": list(params.vocab.id_to_unit[2:]),
        "classes": params.classes,
        "tensors": manifest,
    }
    blob = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<Q", len(blob)))
        handle.write(blob)
        for name in TENSOR_ORDER:
            tensor = np.ascontiguousarray(params.tensors[name], dtype="<f8")
            handle.write(tensor.tobytes())


def load_model(path) -> ModelParams:
    with open(path, "rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise DataError(f"{path}: not a gujmorph model file")
        (header_len,) = struct.unpack("<Q", handle.read(8))
        header = json.loads(handle.read(header_len).decode("utf-8"))
        tensors: dict[str, np.ndarray] = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = handle.read(count * 8)
            if len(raw) != count * 8:
                raise DataError(f"{path}: truncated tensor {entry['name']}")
            tensors[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        trailing = handle.read(1)
        if trailing:
            raise DataError(f"{path}: trailing bytes after tensors")

    units = header["vocab"]
    from .script import PAD_UNIT, UNK_UNIT

    vocab = Vocab(
        unit_to_id={u: i + 2 for i, u in enumerate(units)},
        id_to_unit=(PAD_UNIT, UNK_UNIT, *units),
    )
    params = ModelParams(
        kind=header["kind"],
        hyper=Hyper(**header["hyper"]),
        vocab=vocab,
        classes=header["classes"],
        tensors=tensors,
    )
    params.check_consistent()
    return params
