from __future__ import annotations

import io
import json

import pytest

from trackhom import main as cli
from trackhom.services.config_service import ConfigService


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write_fixture(path, **overrides):
    doc = {
        "format": "trackhom.fixture/1",
        "name": "custom",
        "objects": ["0", "1"],
        "one_cells": [{"id": "u", "src": "0", "tgt": "1"}],
        "two_cells": [],
        "vertical": "groupoid-completion: auto",
        "module": {"kind": "constant", "group": [0]},
    }
    doc.update(overrides)
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_validate_shipped_fixture():
    code, out, _ = invoke("validate", "loop2")

    assert code == 0
    assert out.startswith("trackhom validate: loop2")
    assert out.rstrip().endswith("PASS")


def test_malformed_json_is_a_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": "broken",', encoding="utf-8")
    code, _, err = invoke("validate", str(path))

    assert code == 2
    assert "broken.json:1:" in err


def test_schema_violation_is_a_parse_error(tmp_path):
    code, _, err = invoke("validate", write_fixture(tmp_path / "bad.json", objects="0"))

    assert code == 2
    assert "objects" in err


def test_dangling_two_cell_is_a_validation_error(tmp_path):
    path = write_fixture(tmp_path / "dangling.json", two_cells=[{"id": "beta", "src": "u", "tgt": "w"}])
    code, _, err = invoke("validate", path)

    assert code == 3
    assert "'w'" in err


def test_gate_rejection(tmp_path):
    code, out, _ = invoke("gate", "bz2")
    assert code == 4
    assert "cycle witness" in out

    code, _, err = invoke("resolve", "bz2")
    assert code == 4
    assert "cycle witness" in err

    code, _, _ = invoke("gate", "rp2", "--max-generators", "100", "--max-degree", "1")
    assert code == 4


def test_les_report_is_deterministic():
    first = invoke("les", "loop2", "--max-degree", "1", "--format", "json")
    second = invoke("les", "loop2", "--max-degree", "1", "--format", "json")

    assert first[0] == 0
    assert first[1] == second[1]
    report = json.loads(first[1])
    assert report["report_format"] == "trackhom.report/1"
    assert report["les"]["connecting_choice_invariant"] is True
    assert "timing" not in report
    assert report["flags"] == {"strict": "False"}


def test_cohomology_text_table():
    code, out, _ = invoke("cohomology", "loop2", "--max-degree", "1", "--theory", "so_base")

    assert code == 0
    assert "  so_base:" in out
    assert "    H^0 = " in out
    assert "normalized complex agrees: yes" in out


def test_bw_on_a_cyclic_support_skips_the_resolution():
    code, out, _ = invoke("bw", "bz2", "--max-degree", "1")

    assert code == 0
    assert "gate: rejected" in out


def test_nerve_export(tmp_path):
    target = tmp_path / "rp2.sset"
    code, out, _ = invoke("nerve", "rp2", "--max-degree", "2", "--export", str(target))

    assert code == 0
    assert target.exists()
    assert "classifying space vs categorical nerve: agrees" in out


def test_resolution_levels_are_cached(tmp_path):
    cache_dir = tmp_path / "levels"
    assert invoke("resolve", "loop2", "--max-degree", "1", "--cache-dir", str(cache_dir))[0] == 0
    assert len(list(cache_dir.glob("*.sqlite"))) == 1
    assert invoke("resolve", "loop2", "--max-degree", "1", "--cache-dir", str(cache_dir))[0] == 0


@pytest.mark.parametrize("kind", ["fixture", "report"])
def test_schema(kind):
    code, out, _ = invoke("schema", kind)

    assert code == 0
    assert "properties" in json.loads(out)


def test_init_config(tmp_path, monkeypatch):
    service = ConfigService(tmp_path / ".env.local")
    monkeypatch.setattr(cli, "get_config_service", lambda: service)
    code, out, _ = invoke("init-config")

    assert code == 0
    assert "4 settings added" in out
    assert service.get("TRACKHOM_MAX_DEGREE") == "2"
    assert "0 settings added" in invoke("init-config")[1]


def test_unknown_fixture_is_a_parse_error():
    assert invoke("validate", "no-such-fixture")[0] == 2
