"""Network checkpoint container.

Binary layout (all integers little-endian):

    8 bytes   magic  b"GLABNET\\0"
    uint32    format version (1)
    uint32    header length in bytes
    header    UTF-8 JSON {"layer_sizes": [...], "activations": [...], "output_activation": "..."}
    payload   float64 little-endian parameters in order W0, b0, W1, b1, ... (row-major)

The JSON container holds the same header keys plus "parameters": nested lists in the same order.
Binary round trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from .network import HIDDEN_ACTIVATIONS, OUTPUT_ACTIVATIONS, Network
from ...core.exceptions import LabIOError, ShapeError

MAGIC = b"GLABNET\x00"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sII")


def _header(net: Network) -> Dict[str, Any]:
    return {
        "layer_sizes": list(net.layer_sizes),
        "activations": list(net.activations),
        "output_activation": net.output_activation,
    }


def _validated_header(document: Any) -> Dict[str, Any]:
    if not isinstance(document, dict) or not {"layer_sizes", "activations", "output_activation"} <= document.keys():
        raise LabIOError("Checkpoint header is missing architecture keys")
    sizes, hidden = document["layer_sizes"], document["activations"]
    if not isinstance(sizes, list) or len(sizes) < 2 or not all(isinstance(n, int) and n > 0 for n in sizes):
        raise LabIOError("Checkpoint layer sizes are invalid", payload={"layer_sizes": sizes})
    hidden_ok = isinstance(hidden, list) and len(hidden) == len(sizes) - 2
    if not hidden_ok or any(tag not in HIDDEN_ACTIVATIONS for tag in hidden):
        raise LabIOError("Checkpoint hidden activations are invalid", payload={"activations": hidden})
    if document["output_activation"] not in OUTPUT_ACTIVATIONS:
        raise LabIOError(
            "Checkpoint output activation is invalid", payload={"output_activation": document["output_activation"]}
        )
    return document


def _expected_shapes(layer_sizes: List[int]) -> List[tuple]:
    shapes: List[tuple] = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        shapes.extend(((fan_out, fan_in), (fan_out,)))
    return shapes


def _assemble(header: Dict[str, Any], arrays: List[np.ndarray]) -> Network:
    sizes = tuple(int(s) for s in header["layer_sizes"])
    return Network(
        layer_sizes=sizes,
        weights=arrays[0::2],
        biases=arrays[1::2],
        activations=tuple(header["activations"]),
        output_activation=header["output_activation"],
    )


def network_to_bytes(net: Network) -> bytes:
    header = json.dumps(_header(net), sort_keys=True).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in net.parameters())
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)) + header + payload


def network_from_bytes(blob: bytes) -> Network:
    if len(blob) < _PREFIX.size:
        raise LabIOError("Checkpoint too short")
    magic, version, header_len = _PREFIX.unpack_from(blob, 0)
    if magic != MAGIC:
        raise LabIOError("Not a network checkpoint (bad magic)")
    if version != FORMAT_VERSION:
        raise LabIOError("Unsupported checkpoint version", payload={"version": version})

    offset = _PREFIX.size
    try:
        header = _validated_header(json.loads(blob[offset : offset + header_len].decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise LabIOError("Corrupt checkpoint header", payload={"error": str(exc)}) from exc
    offset += header_len

    shapes = _expected_shapes(header["layer_sizes"])
    expected = offset + 8 * sum(int(np.prod(shape)) for shape in shapes)
    if expected != len(blob):
        raise ShapeError(
            "Checkpoint payload size does not match its header",
            payload={"expected_bytes": expected, "actual_bytes": len(blob)},
        )

    arrays: List[np.ndarray] = []
    for shape in shapes:
        count = int(np.prod(shape))
        chunk = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        arrays.append(chunk.astype(np.float64).reshape(shape).copy())
        offset += count * 8
    return _assemble(header, arrays)


def network_to_json(net: Network) -> Dict[str, Any]:
    document = _header(net)
    document["parameters"] = [p.tolist() for p in net.parameters()]
    return document


def network_from_json(document: Dict[str, Any]) -> Network:
    shapes = _expected_shapes(_validated_header(document)["layer_sizes"])
    parameters = document.get("parameters")
    if not isinstance(parameters, list) or len(parameters) != len(shapes):
        raise ShapeError("JSON checkpoint has the wrong number of parameter arrays")
    try:
        arrays = [np.asarray(values, dtype=np.float64).reshape(shape) for values, shape in zip(parameters, shapes)]
    except (TypeError, ValueError) as exc:
        raise ShapeError(
            "JSON checkpoint parameters do not match the layer sizes", payload={"error": str(exc)}
        ) from exc
    return _assemble(document, arrays)


def save_network(path: Path, net: Network) -> None:
    """Write `.json` as the JSON container, anything else as the binary container."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix == ".json":
            path.write_text(json.dumps(network_to_json(net)), encoding="utf-8")
        else:
            path.write_bytes(network_to_bytes(net))
    except OSError as exc:
        raise LabIOError(f"Cannot write checkpoint {path}", payload={"error": str(exc)}) from exc


def load_network(path: Path) -> Network:
    try:
        if path.suffix == ".json":
            return network_from_json(json.loads(path.read_text(encoding="utf-8")))
        return network_from_bytes(path.read_bytes())
    except OSError as exc:
        raise LabIOError(f"Cannot read checkpoint {path}", payload={"error": str(exc)}) from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise LabIOError(f"Corrupt checkpoint {path}", payload={"error": str(exc)}) from exc
