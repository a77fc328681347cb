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

from typing import Iterable, Sequence, Tuple

from colorconsole import terminal

from residuals import Check, Stage


class Color:
    def __init__(self, r: int, g: int, b: int):
        self.r = r
        self.g = g
        self.b = b

    def __repr__(self):
        return f"Color({self.r}, {self.g}, {self.b})"


PASS = Color(80, 200, 120)
FAIL = Color(230, 70, 70)
DIM = Color(150, 150, 150)


class Screen:
    def __init__(self, **kwargs):
        self.screen = terminal.get_terminal(conEmu=False)
        self.mark = kwargs.get("mark", "●")

    def print_color(self, color: Color, text: str):
        self.screen.xterm24bit_set_fg_color(color.r, color.g, color.b)
        print(text, end="")
        self.screen.reset()

    def print_check(self, check: Check):
        self.print_color(PASS if check.passed else FAIL, self.mark)
        print(f" {check.name:<24} {check.residual:10.3e}  (tol {check.tol:.1e})")

    def print_stage(self, stage: Stage):
        self.print_color(PASS if stage.passed else FAIL, f"[{stage.name}]")
        print()
        for check in stage.checks:
            print("  ", end="")
            self.print_check(check)

    def print_stages(self, stages: Iterable[Stage]):
        for stage in stages:
            self.print_stage(stage)

    def print_curve(self, title: str, rows: Sequence[Tuple[float, ...]]):
        self.print_color(DIM, title)
        print()
        for row in rows:
            print("  " + "  ".join("           -" if v is None else f"{v:12.6g}" for v in row))

    def print_verdict(self, passed: bool):
        self.print_color(PASS if passed else FAIL, "PASS" if passed else "FAIL")
        print()
