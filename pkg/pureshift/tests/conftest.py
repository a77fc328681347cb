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

import numpy as np
import pytest

from algebra_core import AlgebraSignature
from grid_model import FiberSpec, GridSpec, IndexKind

C = AlgebraSignature((1,))
C_M2 = AlgebraSignature((1, 2))
SIGNATURES = [C, AlgebraSignature((2,)), C_M2, AlgebraSignature((3, 1))]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[C, C_M2], ids=["C", "C+M2"])
def signature(request):
    return request.param


@pytest.fixture
def line(signature):
    return GridSpec(4, IndexKind.UNILATERAL, FiberSpec(signature, 1))


@pytest.fixture
def bilateral_line():
    return GridSpec(4, IndexKind.BILATERAL, FiberSpec(C, 1))
