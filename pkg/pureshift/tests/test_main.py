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
import sys

from click.testing import CliRunner
from loguru import logger

from main import cli
from reports import FIXTURES


def invoke(*args):
    result = CliRunner().invoke(cli, list(args), obj={})
    # the cli sink points at the runner's captured stderr
    logger.remove()
    logger.add(sys.stderr)
    return result


def test_reconstruct_command(tmp_path):
    report = tmp_path / "report.json"
    result = invoke("reconstruct", "--grid", "4", "--horizon", "4", "--samples", "3", "--report", str(report))
    assert result.exit_code == 0, result.output
    assert "PASS" in result.output
    assert json.loads(report.read_text())["passed"] is True


def test_check_failure_exit_code():
    result = invoke("reconstruct", "--grid", "4", "--samples", "3",
                    "--fixture", str(FIXTURES / "nonpure_control.json"))
    assert result.exit_code == 1
    assert "FAIL" in result.output


def test_input_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("")
    assert invoke("reconstruct", "--fixture", str(bad)).exit_code == 2
    assert invoke("wold", "--fixture", str(FIXTURES / "disguised_shift.json")).exit_code == 2
    assert invoke("gallery", "teapot").exit_code == 2


def test_gallery_command_writes_csv(tmp_path):
    result = invoke("--debug", "gallery", "nondecex", "--truncation", "6", "--csv-dir", str(tmp_path))
    assert result.exit_code == 0, result.output
    assert (tmp_path / "nondecex.csv").exists()


def test_wold_command():
    result = invoke("wold", "--horizon", "3", "--with-timing")
    assert result.exit_code == 0, result.output
    assert "[classification]" in result.output


def test_failing_run_writes_report(tmp_path):
    report = tmp_path / "report.json"
    result = invoke("reconstruct", "--grid", "4", "--samples", "3", "--report", str(report),
                    "--fixture", str(FIXTURES / "nonpure_control.json"))
    assert result.exit_code == 1
    assert json.loads(report.read_text())["passed"] is False


def test_non_unitary_fixture_is_an_input_error(tmp_path):
    fixture = tmp_path / "wold.json"
    fixture.write_text(json.dumps({"kind": "wold", "signature": [1], "parts": [
        {"type": "unitary", "rank": 1,
         "unitary": {"signature": [1], "rows": 1, "cols": 1, "entries": [[[[[[2.0, 0.0]]]]]]}},
        {"type": "shift", "rank": 1}]}))
    report = tmp_path / "report.json"
    assert invoke("wold", "--fixture", str(fixture), "--report", str(report)).exit_code == 2
    assert not report.exists()
