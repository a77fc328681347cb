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

import json

import pytest

from algebra_core import ModuleOperator, ModuleVector
from codec import (ElementCodec, FiberCodec, FixtureCodec, GridVectorCodec, OperatorCodec, ShiftFixture, SignatureCodec,
                   VectorCodec, WoldFixture)
from exceptions import FixtureParsingError
from grid_model import FiberSpec, GridSpec, IndexKind, distance
from reports import FIXTURES
from semigroups import DisguisedSemigroup
from wold_decomposition import BilateralPart, ShiftPart, UnitaryPart

from conftest import C, C_M2


def test_vector_and_operator_codecs(rng):
    x = ModuleVector.random(C_M2, 2, rng)
    back = VectorCodec.decode(json.loads(json.dumps(VectorCodec.encode(x))))
    assert (back - x).is_zero()

    t = ModuleOperator.random(C_M2, 2, 3, rng)
    assert (OperatorCodec.decode(OperatorCodec.encode(t)) - t).norm() == 0.0
    assert SignatureCodec.decode([1, 2]) == C_M2


def test_grid_vector_codec(rng):
    spec = GridSpec(4, IndexKind.BILATERAL, FiberSpec(C_M2, 1))
    v = spec.random(rng, -2, 3)
    back = GridVectorCodec.decode(GridVectorCodec.encode(v))
    assert back.spec == spec
    assert distance(back, v) == 0.0


@pytest.mark.parametrize("data, where", [
    ([1, 0], "$[1]"),
    ({"signature": [1], "blocks": [[[1.0]]]}, "$.blocks[0]"),
    ({"signature": [1, 2], "blocks": [[[[1.0, 0.0]]]]}, "$.blocks"),
    ({"blocks": []}, "$"),
])
def test_errors_name_the_location(data, where):
    codec = SignatureCodec if isinstance(data, list) else ElementCodec
    with pytest.raises(FixtureParsingError) as err:
        codec.decode(data)
    assert str(err.value).startswith(where)
    assert not codec.is_valid(data)


def test_grid_vector_duplicate_slot():
    entry = {"slot": 0, "vector": {"signature": [1], "entries": [[[[[1.0, 0.0]]]]]}}
    data = {"spec": {"slots_per_unit": 2, "index_kind": "unilateral", "fiber": {"signature": [1], "rank": 1}},
            "entries": [entry, entry]}
    with pytest.raises(FixtureParsingError, match=r"\$\.entries\[1\]\.slot"):
        GridVectorCodec.decode(data)
    data["spec"]["index_kind"] = "circle"
    with pytest.raises(FixtureParsingError, match="unknown index kind"):
        GridVectorCodec.decode(data)


def test_bundled_shift_fixtures(rng):
    fixture = FixtureCodec.decode(json.loads((FIXTURES / "disguised_shift_c_m2.json").read_text()))
    assert isinstance(fixture, ShiftFixture)
    assert fixture.signature == C_M2 and fixture.rank == 2
    s = fixture.build(rng, slots_per_unit=4)
    assert isinstance(s, DisguisedSemigroup)
    assert s.slots_per_unit == 4

    control = FixtureCodec.decode(json.loads((FIXTURES / "nonpure_control.json").read_text()))
    assert control.nonpure
    assert not control.build(rng).declared_pure


def test_bundled_wold_fixture(rng):
    fixture = FixtureCodec.decode(json.loads((FIXTURES / "wold_mixed.json").read_text()))
    assert isinstance(fixture, WoldFixture)
    s = fixture.build(rng)
    assert [type(p) for p in s.parts] == [UnitaryPart, ShiftPart, BilateralPart]
    assert s.disguise_window == 4
    assert s.parts[0].unitary.blocks[0][0, 0] == 1j
    again = FixtureCodec.decode(FixtureCodec.encode(fixture))
    assert again.parts[0]["unitary"].blocks[0][0, 0] == 1j


def test_fixture_errors():
    with pytest.raises(FixtureParsingError, match=r"\$\.kind"):
        FixtureCodec.decode({"kind": "cube", "signature": [1]})
    with pytest.raises(FixtureParsingError, match=r"\$\.parts\[0\]\.type"):
        FixtureCodec.decode({"kind": "wold", "signature": [1], "parts": [{"type": "spiral", "rank": 1}]})
    unitary = OperatorCodec.encode(ModuleOperator.identity(C, 2))
    with pytest.raises(FixtureParsingError, match="does not act on the part"):
        FixtureCodec.decode({"kind": "wold", "signature": [1],
                             "parts": [{"type": "unitary", "rank": 1, "unitary": unitary}]})
    with pytest.raises(FixtureParsingError, match=r"\$\.nonpure"):
        FixtureCodec.decode({"kind": "shift", "signature": [1], "rank": 1, "nonpure": "yes"})
    with pytest.raises(FixtureParsingError, match=r"\$\.rank"):
        FixtureCodec.decode({"kind": "shift", "signature": [1], "rank": 1.5})


def test_fixture_operators_must_be_unitary_or_projections():
    doubled = OperatorCodec.encode(ModuleOperator.identity(C, 1) * 2.0)
    with pytest.raises(FixtureParsingError, match=r"\$\.parts\[0\]\.unitary: matrix is not unitary"):
        FixtureCodec.decode({"kind": "wold", "signature": [1],
                             "parts": [{"type": "unitary", "rank": 1, "unitary": doubled}]})
    with pytest.raises(FixtureParsingError, match=r"\$\.projection: matrix is not a projection"):
        FixtureCodec.decode({"kind": "shift", "signature": [1], "rank": 1, "projection": doubled})
    with pytest.raises(FixtureParsingError, match=r"\$\.projection: matrix is not a projection"):
        FiberCodec.decode({"signature": [1], "rank": 1, "projection": doubled})

    one = OperatorCodec.encode(ModuleOperator.identity(C, 1))
    fixture = FixtureCodec.decode({"kind": "shift", "signature": [1], "rank": 1, "projection": one})
    assert fixture.projection.blocks[0][0, 0] == 1.0
