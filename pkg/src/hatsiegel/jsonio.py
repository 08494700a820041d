"""JSON encoding of the package's value types.

Floats are written with 17 significant digits (``%.17g``), which round-trips
every double exactly; integers and booleans are written as such. Non-finite
floats become ``null``. Complex numbers are ``{"re": .., "im": ..}`` and
complex matrices are row-major nested lists of those.
"""

from __future__ import annotations

import json
import math
from dataclasses import fields, is_dataclass
from enum import Enum

import numpy as np

from .group import GHatElement, Sl2Pair
from .halfspace import HatPoint
from .numeric import DomainError
from .picard import DualPoint
from .polarization import FormKind, LatticeBasis, RiemannFormSpec


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    out = format(x, ".17g")
    # keep floats recognisable as floats after a round trip
    if all(c not in out for c in ".en"):
        out += ".0"
    return out


def to_jsonable(obj):
    """Convert ``obj`` to nested dicts/lists of int, float, str, bool and None."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, HatPoint):
        return {"tau": to_jsonable(obj.tau), "z": to_jsonable(obj.z)}
    if isinstance(obj, GHatElement):
        return {"matrix": to_jsonable(obj.matrix), "epsilon": int(obj.epsilon)}
    if isinstance(obj, Sl2Pair):
        return {"m1": to_jsonable(obj.m1), "m2": to_jsonable(obj.m2)}
    if isinstance(obj, RiemannFormSpec):
        return {"kind": obj.kind.value, "h": to_jsonable(obj.h), "omega": to_jsonable(obj.lattice.omega)}
    if isinstance(obj, DualPoint):
        return {"c": to_jsonable(obj.c)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _is_complex(v) -> bool:
    return isinstance(v, dict) and set(v) == {"re", "im"}


def _write(obj, out: list[str], indent: int | None, level: int):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, dict)):
        items = list(obj.items()) if isinstance(obj, dict) else list(obj)
        open_, close = ("{", "}") if isinstance(obj, dict) else ("[", "]")
        if not items:
            out.append(open_ + close)
            return
        # short lists of scalars stay on one line
        flat = indent is None or _is_complex(obj) or (isinstance(obj, list) and all(
            not isinstance(v, (list, dict)) or _is_complex(v) for v in items))
        sep = ", " if flat else ",\n" + " " * (indent * (level + 1))
        out.append(open_ if flat else open_ + "\n" + " " * (indent * (level + 1)))
        for i, item in enumerate(items):
            if i:
                out.append(sep)
            if isinstance(obj, dict):
                key, item = item
                out.append(json.dumps(key, ensure_ascii=False) + ": ")
            _write(item, out, None if flat else indent, level + 1)
        out.append(close if flat else "\n" + " " * (indent * level) + close)
    else:
        raise TypeError(f"not a JSON value: {obj!r}")


def dumps(obj, indent: int | None = 2) -> str:
    """Deterministic JSON text of ``obj`` with 17-significant-digit floats."""
    out: list[str] = []
    _write(to_jsonable(obj), out, indent, 0)
    return "".join(out)


# -- decoding -----------------------------------------------------------------------

def complex_from_json(v) -> complex:
    if isinstance(v, dict):
        if set(v) - {"re", "im"}:
            raise DomainError(f"complex number needs keys re/im, got {sorted(v)}")
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise DomainError(f"not a complex number: {v!r}")


def complex_array_from_json(v) -> np.ndarray:
    if isinstance(v, list):
        return np.array([complex_array_from_json(x) if isinstance(x, list) else complex_from_json(x) for x in v])
    raise DomainError("expected a (nested) list of complex numbers")


def real_matrix_from_json(v, shape: tuple[int, int]) -> np.ndarray:
    try:
        m = np.asarray(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError("matrix entries must be real numbers") from exc
    if m.shape != shape:
        raise DomainError(f"expected a {shape[0]}x{shape[1]} matrix, got shape {m.shape}")
    return m


def hatpoint_from_json(v) -> HatPoint:
    if not isinstance(v, dict):
        raise DomainError("point must be an object")
    if "matrix" in v:
        return HatPoint.from_matrix(complex_array_from_json(v["matrix"]))
    if "tau" not in v or "z" not in v:
        raise DomainError("point needs tau and z")
    return HatPoint(complex_from_json(v["tau"]), complex_from_json(v["z"]))


def ghat_from_json(v) -> GHatElement:
    if isinstance(v, list):
        return GHatElement.from_matrix(real_matrix_from_json(v, (4, 4)))
    if not isinstance(v, dict) or "matrix" not in v:
        raise DomainError("group element needs a matrix")
    m = real_matrix_from_json(v["matrix"], (4, 4))
    if "epsilon" in v:
        return GHatElement(m, int(v["epsilon"]))
    return GHatElement.from_matrix(m)


def sl2pair_from_json(v) -> Sl2Pair:
    if not isinstance(v, dict) or "m1" not in v or "m2" not in v:
        raise DomainError("SL(2) pair needs m1 and m2")
    return Sl2Pair(real_matrix_from_json(v["m1"], (2, 2)), real_matrix_from_json(v["m2"], (2, 2)))


def spec_from_json(v) -> RiemannFormSpec:
    if not isinstance(v, dict) or "omega" not in v:
        raise DomainError("Riemann form needs omega")
    pt = hatpoint_from_json(v["omega"])
    try:
        kind = FormKind(v.get("kind", "custom"))
    except ValueError as exc:
        raise DomainError(f"unknown kind {v.get('kind')!r}") from exc
    h = complex_array_from_json(v["h"]) if "h" in v else None
    spec = RiemannFormSpec.of_kind(kind, pt, h)
    if h is not None and not np.allclose(spec.h, h, rtol=1e-12, atol=1e-12):
        raise DomainError(f"h does not match kind {kind.value}")
    return spec


def dualpoint_from_json(v) -> DualPoint:
    if isinstance(v, dict) and "c" in v:
        v = v["c"]
    return DualPoint(complex_array_from_json(v))


def vector_from_json(v, n: int) -> np.ndarray:
    arr = complex_array_from_json(v)
    if arr.shape != (n,):
        raise DomainError(f"expected a vector of length {n}")
    return arr


def int_vector_from_json(v, n: int) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in v):
        raise DomainError(f"expected {n} integers")
    return np.array(v, dtype=np.int64)
