"""JSON, CSV and OBJ formats used by the command line.

Every JSON file carries ``"format_version": 1`` and stores complex numbers as
``[re, im]`` pairs.  Writers are deterministic so identical runs produce
identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import InputError
from .jets import RationalFunction
from .meron import MeronSpec
from .model import HolomorphicVectorSpec

FORMAT_VERSION = 1


def cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def cplx_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return cplx(a)
    return [cplx_array(x) for x in a]


def parse_cplx(value, where: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            z = complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            raise InputError(f"{where}: expected [re, im] numbers, got {value!r}") from None
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        z = complex(value)
    else:
        raise InputError(f"{where}: expected [re, im], got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{where}: coefficient is not finite")
    return z


def _rational_from_json(obj, where: str) -> RationalFunction:
    if not isinstance(obj, dict) or "numerator" not in obj:
        raise InputError(f"{where}: expected an object with 'numerator' (and optional 'denominator')")
    num = obj["numerator"]
    den = obj.get("denominator", [[1.0, 0.0]])
    if not isinstance(num, list) or not num:
        raise InputError(f"{where}.numerator: expected a non-empty list")
    if not isinstance(den, list) or not den:
        raise InputError(f"{where}.denominator: expected a non-empty list")
    n = tuple(parse_cplx(c, f"{where}.numerator[{i}]") for i, c in enumerate(num))
    d = tuple(parse_cplx(c, f"{where}.denominator[{i}]") for i, c in enumerate(den))
    if not any(d):
        raise InputError(f"{where}.denominator: identically zero")
    return RationalFunction(n, d)


@dataclass
class ModelSpecFile:
    f: HolomorphicVectorSpec
    k: int | None = None
    meron: MeronSpec | None = None

    @property
    def N(self) -> int:
        return self.f.N

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "N": self.N,
            "f": [c.to_json() for c in self.f.components],
        }
        if self.k is not None:
            out["k"] = self.k
        if self.meron is not None:
            out["meron"] = self.meron.to_json()
        return out

    @classmethod
    def from_json(cls, obj) -> "ModelSpecFile":
        if not isinstance(obj, dict):
            raise InputError("model spec: expected a JSON object")
        version = obj.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise InputError(f"format_version: unsupported value {version!r}")
        if "N" not in obj or not isinstance(obj["N"], int) or isinstance(obj["N"], bool):
            raise InputError("N: missing or not an integer")
        N = obj["N"]
        comps = obj.get("f")
        if not isinstance(comps, list):
            raise InputError("f: missing or not a list")
        if len(comps) != N:
            raise InputError(f"f: has {len(comps)} components but N = {N}")
        funcs = tuple(_rational_from_json(c, f"f[{i}]") for i, c in enumerate(comps))
        f = HolomorphicVectorSpec(funcs)
        k = obj.get("k")
        if k is not None and (not isinstance(k, int) or not 0 <= k < N):
            raise InputError(f"k: must be an integer in [0, {N - 1}], got {k!r}")
        meron = None
        if "meron" in obj:
            m = obj["meron"]
            if not isinstance(m, dict):
                raise InputError("meron: expected an object")
            F = _rational_from_json(m.get("F"), "meron.F")
            c = parse_cplx(m.get("c", [1.0, 0.0]), "meron.c")
            branch = m.get("branch", 1)
            if branch not in (1, -1):
                raise InputError(f"meron.branch: must be +1 or -1, got {branch!r}")
            if c == 0:
                raise InputError("meron.c: must be nonzero")
            meron = MeronSpec(F, c, branch)
        return cls(f, k, meron)


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_model(path: str | Path) -> ModelSpecFile:
    obj = read_json(path)
    try:
        return ModelSpecFile.from_json(obj)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    skipped: int = 0,
    notes: Sequence[str] = (),
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
            count += 1
        for note in notes:
            fh.write(f"# {note}\n")
        fh.write(f"# skipped_singular_points: {skipped}\n")
    return count


def write_obj(path: str | Path, vertices: np.ndarray, valid: np.ndarray) -> None:
    """Grid mesh: ``vertices`` has shape ``(ny, nx, 3)``; invalid nodes are dropped
    together with every quad touching them."""
    ny, nx = valid.shape
    index = -np.ones((ny, nx), dtype=int)
    lines = []
    n = 0
    for j in range(ny):
        for i in range(nx):
            if valid[j, i]:
                n += 1
                index[j, i] = n
                x, y, z = vertices[j, i]
                lines.append(f"v {fmt(x)} {fmt(y)} {fmt(z)}")
    for j in range(ny - 1):
        for i in range(nx - 1):
            quad = [index[j, i], index[j, i + 1], index[j + 1, i + 1], index[j + 1, i]]
            if min(quad) > 0:
                lines.append("f " + " ".join(str(q) for q in quad))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def veronese_spec_json(N: int) -> dict:
    from .model import veronese_vector

    return ModelSpecFile(veronese_vector(N)).to_json()
