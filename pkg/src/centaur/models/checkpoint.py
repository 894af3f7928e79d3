"""Self-describing binary model container.

Layout: 8-byte magic, u64 little-endian header length, JSON header
(format version, model kind, hyperparameters, shape/dtype-tagged tensor
manifest), then the raw tensor payloads in manifest order.
"""

from __future__ import annotations

import json
import struct

import numpy as np
import torch

MAGIC = b"CENTMGR1"
FORMAT_VERSION = 1

_KINDS = {}


def _register(kind):
    def wrap(builder):
        _KINDS[kind] = builder
        return builder
    return wrap


@_register("transformer")
def _build_transformer(hyper):
    from centaur.models.transformer import TransformerConfig, TransformerManager
    return TransformerManager(TransformerConfig(**hyper))


@_register("feature_mlp")
def _build_feature_mlp(hyper):
    from centaur.models.feature_models import FeatureMLP, FeatureMLPConfig
    return FeatureMLP(FeatureMLPConfig(**hyper))


@_register("logistic")
def _build_logistic(hyper):
    from centaur.models.feature_models import LogisticConfig, LogisticManagerModel
    return LogisticManagerModel(LogisticConfig(**hyper))


def model_kind(model) -> str:
    name = type(model).__name__
    return {"TransformerManager": "transformer", "FeatureMLP": "feature_mlp",
            "LogisticManagerModel": "logistic"}[name]


class CheckpointError(ValueError):
    pass


def save_model(model, path):
    manifest = []
    payloads = []
    for name, tensor in model.state_dict().items():
        array = tensor.detach().cpu().contiguous().numpy()
        manifest.append({"name": name, "dtype": str(array.dtype),
                         "shape": list(array.shape)})
        payloads.append(array.astype(array.dtype, copy=False).tobytes())
    header = json.dumps({
        "format_version": FORMAT_VERSION,
        "kind": model_kind(model),
        "hyperparameters": model.hyperparameters(),
        "tensors": manifest,
    }, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for payload in payloads:
            fh.write(payload)


def load_model(path):
    """Rebuild a model from a container; any shape or kind mismatch fails
    here, never at decide time."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise CheckpointError(f"not a model container: bad magic {magic!r}")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode())
        if header.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(
                f"unsupported format version {header.get('format_version')}")
        kind = header.get("kind")
        if kind not in _KINDS:
            raise CheckpointError(f"unknown model kind {kind!r}")
        model = _KINDS[kind](header["hyperparameters"])
        state = {}
        for entry in header["tensors"]:
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            dtype = np.dtype(entry["dtype"])
            raw = fh.read(count * dtype.itemsize)
            if len(raw) != count * dtype.itemsize:
                raise CheckpointError(f"truncated tensor {entry['name']}")
            array = np.frombuffer(raw, dtype=dtype).reshape(entry["shape"])
            state[entry["name"]] = torch.from_numpy(array.copy())
        try:
            model.load_state_dict(state, strict=True)
        except RuntimeError as exc:
            raise CheckpointError(f"state mismatch: {exc}") from exc
    return model
