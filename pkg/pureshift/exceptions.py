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

class PureShiftException(Exception):
    pass


class ShapeMismatchError(PureShiftException):
    pass


class GridSpecError(PureShiftException):
    pass


class GridAlignmentError(GridSpecError):
    pass


class HorizonError(GridSpecError):
    pass


class DivisibilityError(GridSpecError):
    pass


class GridResolutionError(GridSpecError):
    pass


class WindowMembershipError(PureShiftException):
    pass


class CheckFailure(PureShiftException):
    pass


class AdjointPairingError(CheckFailure):
    pass


class GroupLawError(CheckFailure):
    pass


class InterleaveLawError(CheckFailure):
    pass


class DegenerateMultiplicityError(CheckFailure):
    pass


class StabilizationError(CheckFailure):
    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class FixtureParsingError(PureShiftException):
    pass
