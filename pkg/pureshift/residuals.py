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

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from loguru import logger


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        # NaN never passes
        return bool(self.residual <= self.tol)

    def as_dict(self) -> Dict[str, Any]:
        residual = float(self.residual) if math.isfinite(self.residual) else None
        return {"name": self.name, "residual": residual, "tol": float(self.tol), "pass": self.passed}


@dataclass
class Stage:
    name: str
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def record(self, name: str, residual: float, tol: float) -> Check:
        check = Check(name, float(residual), float(tol))
        self.checks.append(check)
        if check.passed:
            logger.debug(f"[{self.name}] {name}: {check.residual:.3e} <= {tol:.1e}")
        else:
            logger.warning(f"[{self.name}] {name}: {check.residual:.3e} > {tol:.1e}")
        return check

    def fail(self, name: str, error: Exception) -> Check:
        """record an aborted check; the error text goes to the stage data"""
        logger.warning(f"[{self.name}] {name} aborted: {error}")
        self.data.setdefault("errors", []).append(f"{name}: {error}")
        check = Check(name, float("inf"), 0.0)
        self.checks.append(check)
        return check

    def extend(self, other: "Stage", prefix: Optional[str] = None):
        for c in other.checks:
            self.checks.append(Check(f"{prefix}.{c.name}" if prefix else c.name, c.residual, c.tol))
        self.data.update(other.data)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def worst(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def as_dict(self) -> Dict[str, Any]:
        return {"stage": self.name, "checks": [c.as_dict() for c in self.checks], "data": self.data}
