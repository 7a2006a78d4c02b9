# levy_sysid/models/array_codec.py
"""
JSON encoding of numpy arrays.

Arrays are written row-major with explicit dimensions. Complex arrays carry
separate real and imaginary parts::

    {"shape": [2, 2], "dtype": "float", "data": [1.0, 0.0, 0.0, 1.0]}
    {"shape": [3], "dtype": "complex", "real": [...], "imag": [...]}
"""
from typing import Annotated, Any, Dict, Optional

import numpy as np
from pydantic import BeforeValidator, PlainSerializer


def encode_array(value: Optional[np.ndarray]) -> Optional[Dict[str, Any]]:
    if value is None:
        return None
    arr = np.asarray(value)
    shape = list(arr.shape)
    if np.iscomplexobj(arr):
        flat = arr.ravel(order="C")
        return {
            "shape": shape,
            "dtype": "complex",
            "real": [float(v) for v in flat.real],
            "imag": [float(v) for v in flat.imag],
        }
    return {
        "shape": shape,
        "dtype": "float",
        "data": [float(v) for v in arr.ravel(order="C")],
    }


def decode_array(value: Any) -> Any:
    """Inverse of encode_array; arrays and plain lists pass through as ndarrays."""
    if value is None or isinstance(value, np.ndarray):
        return value
    if isinstance(value, dict) and "shape" in value:
        shape = tuple(value["shape"])
        if value.get("dtype") == "complex":
            flat = np.asarray(value["real"], dtype=float) + 1j * np.asarray(
                value["imag"], dtype=float
            )
        else:
            flat = np.asarray(value["data"], dtype=float)
        return flat.reshape(shape)
    return np.asarray(value)


NdArray = Annotated[
    np.ndarray,
    BeforeValidator(decode_array),
    PlainSerializer(encode_array, when_used="json"),
]
