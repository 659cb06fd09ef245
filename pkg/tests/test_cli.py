import copy
import json
import shutil

import pytest

from chabauty.cli import (
    EXAMPLE_CONFIG,
    EXIT_FAILED,
    EXIT_INVARIANT,
    EXIT_MISSING,
    EXIT_OK,
    load_config,
    main,
    parse_disk_arg,
)
from chabauty.errors import InvariantViolation, MissingFixture, SchemaError

BASE = json.loads(EXAMPLE_CONFIG.read_text(encoding="utf-8"))
FIXTURES = EXAMPLE_CONFIG.parent / BASE["fixtures"]


def write_config(tmp_path, edit=None, with_fixtures=True):
    cfg = copy.deepcopy(BASE)
    if edit:
        edit(cfg)
    if with_fixtures:
        shutil.copy(FIXTURES, tmp_path / BASE["fixtures"])
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_parse_disk_arg():
    assert parse_disk_arg("0,6") == (0, 6)
    assert parse_disk_arg(" 4 , -3 ") == (4, -3)
    for bad in ("0", "a,b", "1,2,3"):
        with pytest.raises(SchemaError):
            parse_disk_arg(bad)


def test_round_trip_is_the_identity(example):
    assert example.to_json() == BASE
    assert example.fixtures_json() == json.loads(FIXTURES.read_text(encoding="utf-8"))


def test_schema_version_is_checked(tmp_path):
    with pytest.raises(SchemaError):
        load_config(write_config(tmp_path, lambda c: c.update(schema_version=2)))


def test_bad_reduction_is_rejected(tmp_path):
    with pytest.raises(InvariantViolation, match="divides the discriminant"):
        load_config(write_config(tmp_path, lambda c: c.update(p=67)))
    with pytest.raises(InvariantViolation, match="odd prime"):
        load_config(write_config(tmp_path, lambda c: c.update(p=9)))


def test_rank_condition_boundary(tmp_path):
    # without an endomorphism rho = 1 and r = 2 = g + rho - 1
    with pytest.raises(InvariantViolation, match="r < g"):
        load_config(write_config(tmp_path, lambda c: c.update(endomorphisms=[], normalization={})))


def test_trace_condition(tmp_path):
    def edit(c):
        c["endomorphisms"][0]["differential"] = [[1, 0], [0, 1]]

    with pytest.raises(InvariantViolation, match="trace"):
        load_config(write_config(tmp_path, edit))


def test_missing_fixture_bundle(tmp_path):
    with pytest.raises(MissingFixture):
        load_config(write_config(tmp_path, with_fixtures=False))


def test_exit_codes(tmp_path, capsys):
    assert main(["solve-disk", "--disk", "0,6"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mod_p_solutions"] == [[0, 0], [1, 3]]
    assert main(["solve-disk", "--disk", "4,4"]) == EXIT_MISSING
    assert "4, 4" in capsys.readouterr().err
    assert main(["solve-disk", "--config", str(write_config(tmp_path, lambda c: c.update(p=67)))]) == EXIT_INVARIANT
    # a finer embedding needs sections at nu = 2 that the bundle does not carry
    assert main(["embed-disk", "--disk", "0,6", "--precision", "3"]) == EXIT_MISSING
    assert "nu = 2" in capsys.readouterr().err
    singular = write_config(tmp_path, lambda c: c.update(curve={"h": [], "f": [0, 0, 0, 0, 0, 1]}))
    assert main(["solve-disk", "--config", str(singular)]) == EXIT_INVARIANT
    too_small = write_config(tmp_path, lambda c: c["curve"].update(f=[0, 1]))
    assert main(["solve-disk", "--config", str(too_small)]) == EXIT_FAILED
    assert "curve" in capsys.readouterr().err


def test_check_invariants_passes_on_the_example(capsys):
    assert main(["check-invariants"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True


def test_verify_example_is_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify-example", "--output", str(out1)]) == EXIT_OK
    err = capsys.readouterr().err
    assert main(["verify-example", "--output", str(out2)]) == EXIT_OK

    def strip(path):
        data = json.loads(path.read_text(encoding="utf-8"))
        for c in data["checks"]:
            c.pop("seconds")
        return data

    first = strip(out1)
    assert first == strip(out2)
    assert (first["passed"], first["failed"], first["unavailable"]) == (9, 0, 3)
    assert len(err.strip().splitlines()) == 12


def test_solve_all_accounts_for_every_disk(capsys):
    assert main(["solve-all"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    seen = set(report["reports"]) | set(report["partners"]) | set(report["unprocessed"]) | set(report["skipped"])
    assert seen == {"0,0", "0,6", "1,0", "1,4", "4,4", "6,0", "6,1", "inf,0", "inf,6"}
