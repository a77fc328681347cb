"""
This file is part of pureshift.
Copyright (c) 2026 the pureshift authors.

This program is free software: you can redistribute it and/or modify it under
the terms of the GNU General Public License as published by the Free Software
Foundation.
This program is distributed in the hope that it will be useful, but WITHOUT
ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with
this program. If not, see <http://www.gnu.org/licenses/>.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from algebra_core import (AlgebraElement, AlgebraSignature, ModuleOperator, ModuleVector, projection_residual,
                          unitary_residual)
from codec_base import CodecBase
from exceptions import FixtureParsingError, PureShiftException
from grid_model import FiberSpec, GridSpec, GridVector, IndexKind, random_module_unitary
from helpers import clean_pairs, to_pairs
from semigroup_base import AbstractSemigroup
from semigroups import disguised_shift
from wold_decomposition import BilateralPart, Part, ShiftPart, StructuredIsometry, UnitaryPart

# unitarity / idempotence residual accepted in fixtures
OPERATOR_TOL = 1e-8


def _field(data: Any, key: str, where: str) -> Any:
    if not isinstance(data, dict):
        raise FixtureParsingError(f"{where}: expected an object, got {type(data).__name__}")
    if key not in data:
        raise FixtureParsingError(f"{where}: missing field '{key}'")
    return data[key]


def _int(value: Any, where: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FixtureParsingError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise FixtureParsingError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _list(value: Any, where: str) -> List[Any]:
    if not isinstance(value, list):
        raise FixtureParsingError(f"{where}: expected an array, got {type(value).__name__}")
    return value


def _square(data: Any, sig: AlgebraSignature, rank: int, where: str) -> ModuleOperator:
    op = OperatorCodec.decode(data, where)
    if op.signature != sig or op.rows != rank or op.cols != rank:
        raise FixtureParsingError(f"{where}: matrix does not act on the part")
    return op


def _unitary(data: Any, sig: AlgebraSignature, rank: int, where: str) -> ModuleOperator:
    u = _square(data, sig, rank, where)
    residual = unitary_residual(u)
    if residual > OPERATOR_TOL:
        raise FixtureParsingError(f"{where}: matrix is not unitary (residual {residual:.3e})")
    return u


def _projection(data: Any, sig: AlgebraSignature, rank: int, where: str) -> ModuleOperator:
    p = _square(data, sig, rank, where)
    residual = projection_residual(p)
    if residual > OPERATOR_TOL:
        raise FixtureParsingError(f"{where}: matrix is not a projection (residual {residual:.3e})")
    return p


class SignatureCodec(CodecBase):
    @classmethod
    def encode(cls, obj: AlgebraSignature) -> List[int]:
        return list(obj.block_dims)

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> AlgebraSignature:
        dims = [_int(d, f"{where}[{i}]", 1) for i, d in enumerate(_list(data, where))]
        if not dims:
            raise FixtureParsingError(f"{where}: signature needs at least one block")
        return AlgebraSignature(tuple(dims))


class ElementCodec(CodecBase):
    @classmethod
    def encode(cls, obj: AlgebraElement) -> Dict[str, Any]:
        return {"signature": SignatureCodec.encode(obj.signature), "blocks": [to_pairs(b) for b in obj.blocks]}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> AlgebraElement:
        sig = SignatureCodec.decode(_field(data, "signature", where), f"{where}.signature")
        return AlgebraElement(sig, _blocks(_field(data, "blocks", where), sig, f"{where}.blocks"))


def _blocks(data: Any, sig: AlgebraSignature, where: str) -> List[np.ndarray]:
    blocks = _list(data, where)
    if len(blocks) != len(sig):
        raise FixtureParsingError(f"{where}: expected {len(sig)} blocks, got {len(blocks)}")
    out = []
    for i, (b, d) in enumerate(zip(blocks, sig)):
        arr = clean_pairs(b, f"{where}[{i}]")
        if arr.shape != (d, d):
            raise FixtureParsingError(f"{where}[{i}]: block of shape {arr.shape} does not fit M{d}")
        out.append(arr)
    return out


class VectorCodec(CodecBase):
    """{"signature", "entries": [entry blocks, ...]}"""

    @classmethod
    def encode(cls, obj: ModuleVector) -> Dict[str, Any]:
        return {"signature": SignatureCodec.encode(obj.signature),
                "entries": [[to_pairs(b) for b in e.blocks] for e in obj.entries]}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> ModuleVector:
        sig = SignatureCodec.decode(_field(data, "signature", where), f"{where}.signature")
        entries = _list(_field(data, "entries", where), f"{where}.entries")
        return ModuleVector.from_entries(
            sig, [AlgebraElement(sig, _blocks(e, sig, f"{where}.entries[{k}]")) for k, e in enumerate(entries)])


class OperatorCodec(CodecBase):
    """{"signature", "rows", "cols", "entries": matrix of entry blocks}"""

    @classmethod
    def encode(cls, obj: ModuleOperator) -> Dict[str, Any]:
        return {"signature": SignatureCodec.encode(obj.signature), "rows": obj.rows, "cols": obj.cols,
                "entries": [[[to_pairs(b) for b in e.blocks] for e in row] for row in obj.entries]}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> ModuleOperator:
        sig = SignatureCodec.decode(_field(data, "signature", where), f"{where}.signature")
        rows = _int(_field(data, "rows", where), f"{where}.rows", 0)
        cols = _int(_field(data, "cols", where), f"{where}.cols", 0)
        matrix = _list(_field(data, "entries", where), f"{where}.entries")
        if len(matrix) != rows:
            raise FixtureParsingError(f"{where}.entries: expected {rows} rows, got {len(matrix)}")
        decoded = []
        for j, row in enumerate(matrix):
            row = _list(row, f"{where}.entries[{j}]")
            if len(row) != cols:
                raise FixtureParsingError(f"{where}.entries[{j}]: expected {cols} columns, got {len(row)}")
            decoded.append([AlgebraElement(sig, _blocks(e, sig, f"{where}.entries[{j}][{k}]"))
                            for k, e in enumerate(row)])
        if not rows or not cols:
            return ModuleOperator.zero(sig, rows, cols)
        return ModuleOperator.from_entries(sig, decoded)


class FiberCodec(CodecBase):
    @classmethod
    def encode(cls, obj: FiberSpec) -> Dict[str, Any]:
        return {"signature": SignatureCodec.encode(obj.signature), "rank": obj.rank,
                "projection": None if obj.projection is None else OperatorCodec.encode(obj.projection)}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> FiberSpec:
        sig = SignatureCodec.decode(_field(data, "signature", where), f"{where}.signature")
        rank = _int(_field(data, "rank", where), f"{where}.rank", 0)
        projection = data.get("projection")
        if projection is not None:
            projection = _projection(projection, sig, rank, f"{where}.projection")
        try:
            return FiberSpec(sig, rank, projection)
        except PureShiftException as e:
            raise FixtureParsingError(f"{where}: {e}")


class GridSpecCodec(CodecBase):
    @classmethod
    def encode(cls, obj: GridSpec) -> Dict[str, Any]:
        return {"slots_per_unit": obj.slots_per_unit, "index_kind": obj.index_kind.value,
                "fiber": FiberCodec.encode(obj.fiber)}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> GridSpec:
        slots = _int(_field(data, "slots_per_unit", where), f"{where}.slots_per_unit", 1)
        kind = _field(data, "index_kind", where)
        try:
            kind = IndexKind(kind)
        except ValueError:
            raise FixtureParsingError(f"{where}.index_kind: unknown index kind {kind!r}")
        return GridSpec(slots, kind, FiberCodec.decode(_field(data, "fiber", where), f"{where}.fiber"))


class GridVectorCodec(CodecBase):
    """{"spec": GridSpec, "entries": [{"slot": j, "vector": ModuleVector}]}"""

    @classmethod
    def encode(cls, obj: GridVector) -> Dict[str, Any]:
        return {"spec": GridSpecCodec.encode(obj.spec),
                "entries": [{"slot": j, "vector": VectorCodec.encode(x)} for j, x in obj.items()]}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> GridVector:
        spec = GridSpecCodec.decode(_field(data, "spec", where), f"{where}.spec")
        slots = {}
        for k, entry in enumerate(_list(_field(data, "entries", where), f"{where}.entries")):
            at = f"{where}.entries[{k}]"
            j = _int(_field(entry, "slot", at), f"{at}.slot")
            if j in slots:
                raise FixtureParsingError(f"{at}.slot: slot {j} given twice")
            slots[j] = VectorCodec.decode(_field(entry, "vector", at), f"{at}.vector")
        try:
            return spec.from_slots(slots)
        except PureShiftException as e:
            raise FixtureParsingError(f"{where}.entries: {e}")


@dataclass
class ShiftFixture:
    """standard shift over ℬ^rank, disguised on the first disguise_units units"""
    signature: AlgebraSignature
    rank: int
    slots_per_unit: int = 8
    disguise_units: int = 4
    nonpure: bool = False
    projection: Optional[ModuleOperator] = None

    def build(self, rng: np.random.Generator, slots_per_unit: Optional[int] = None) -> AbstractSemigroup:
        return disguised_shift(self.signature, self.rank, slots_per_unit or self.slots_per_unit,
                               self.disguise_units, rng, nonpure=self.nonpure, projection=self.projection)


@dataclass
class WoldFixture:
    parts: List[Dict[str, Any]] = field(default_factory=list)
    signature: AlgebraSignature = AlgebraSignature((1,))
    disguise_window: int = 0

    def build(self, rng: np.random.Generator) -> StructuredIsometry:
        parts: List[Part] = []
        for p in self.parts:
            fiber = FiberSpec(self.signature, p["rank"])
            if p["type"] == "unitary":
                unitary = p.get("unitary") or random_module_unitary(self.signature, p["rank"], rng)
                parts.append(UnitaryPart(fiber, unitary))
            elif p["type"] == "shift":
                parts.append(ShiftPart(fiber))
            else:
                parts.append(BilateralPart(fiber))
        if self.disguise_window > 0:
            return StructuredIsometry.disguised(parts, rng, self.disguise_window)
        return StructuredIsometry(parts)


Fixture = Union[ShiftFixture, WoldFixture]


class FixtureCodec(CodecBase):
    PART_TYPES = ("unitary", "shift", "bilateral")

    @classmethod
    def encode(cls, obj: Fixture) -> Dict[str, Any]:
        if isinstance(obj, ShiftFixture):
            return {"kind": "shift", "signature": SignatureCodec.encode(obj.signature), "rank": obj.rank,
                    "slots_per_unit": obj.slots_per_unit, "disguise_units": obj.disguise_units,
                    "nonpure": obj.nonpure,
                    "projection": None if obj.projection is None else OperatorCodec.encode(obj.projection)}
        parts = []
        for p in obj.parts:
            entry = {"type": p["type"], "rank": p["rank"]}
            if p.get("unitary") is not None:
                entry["unitary"] = OperatorCodec.encode(p["unitary"])
            parts.append(entry)
        return {"kind": "wold", "signature": SignatureCodec.encode(obj.signature), "parts": parts,
                "disguise_window": obj.disguise_window}

    @classmethod
    def decode(cls, data: Any, where: str = "$") -> Fixture:
        kind = _field(data, "kind", where)
        sig = SignatureCodec.decode(_field(data, "signature", where), f"{where}.signature")
        if kind == "shift":
            rank = _int(_field(data, "rank", where), f"{where}.rank", 0)
            projection = data.get("projection")
            if projection is not None:
                projection = _projection(projection, sig, rank, f"{where}.projection")
            nonpure = data.get("nonpure", False)
            if not isinstance(nonpure, bool):
                raise FixtureParsingError(f"{where}.nonpure: expected a boolean, got {nonpure!r}")
            return ShiftFixture(sig, rank,
                                _int(data.get("slots_per_unit", 8), f"{where}.slots_per_unit", 1),
                                _int(data.get("disguise_units", 4), f"{where}.disguise_units", 0),
                                nonpure, projection)
        if kind == "wold":
            parts = []
            for k, p in enumerate(_list(_field(data, "parts", where), f"{where}.parts")):
                at = f"{where}.parts[{k}]"
                kind_ = _field(p, "type", at)
                if kind_ not in cls.PART_TYPES:
                    raise FixtureParsingError(f"{at}.type: expected one of {cls.PART_TYPES}, got {kind_!r}")
                entry = {"type": kind_, "rank": _int(_field(p, "rank", at), f"{at}.rank", 1)}
                if p.get("unitary") is not None:
                    if kind_ != "unitary":
                        raise FixtureParsingError(f"{at}.unitary: only unitary parts carry a matrix")
                    entry["unitary"] = _unitary(p["unitary"], sig, entry["rank"], f"{at}.unitary")
                parts.append(entry)
            if not parts:
                raise FixtureParsingError(f"{where}.parts: need at least one part")
            return WoldFixture(parts, sig, _int(data.get("disguise_window", 0), f"{where}.disguise_window", 0))
        raise FixtureParsingError(f"{where}.kind: expected 'shift' or 'wold', got {kind!r}")
