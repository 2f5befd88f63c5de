import csv
import json

import pytest

from wucb.cli import EXIT_DOMAIN, EXIT_IO, EXIT_SCHEMA, EXIT_VALIDATION, main
from wucb.config import parse_config, serialize_config
from wucb.env import build_synthetic, summarize
from wucb.errors import ConfigValidationError, SchemaError
from wucb.experiments import CSV_COLUMNS, emit_curves, run_preset
from wucb.sim import run_experiment

MINIMAL = '{"instance":{"kind":"synthetic","k_total":5},"run":{"horizon":100000}}'


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.instance.gamma == 1.0
    assert cfg.instance.active_preferences == [1, 2, 3, 4, 5]
    assert cfg.run.paths == 20 and cfg.run.checkpoint_stride == 100
    assert cfg.policies == ["wucb"]


def test_gamma_out_of_range_names_field():
    with pytest.raises(ConfigValidationError, match="gamma"):
        parse_config('{"instance":{"kind":"synthetic","k_total":5,"gamma":1.5},"run":{"horizon":10}}')


@pytest.mark.parametrize("doc,field", [
    ('{"instance":{"kind":"synthetic"},"run":{"horizon":10}}', "k_total"),
    ('{"instance":{"kind":"synthetic","k_total":5},"run":{"horizon":10},"colour":1}', "colour"),
    ('{"instance":{"kind":"synthetic","k_total":"five"},"run":{"horizon":10}}', "k_total"),
    ('{"instance":{"kind":"synthetic","k_total":5}}', "run"),
    ('[1, 2', "<root>"),
])
def test_schema_errors_carry_field_path(doc, field):
    with pytest.raises(SchemaError, match=field):
        parse_config(doc)


@pytest.mark.parametrize("doc,field", [
    ('{"instance":{"kind":"synthetic","k_total":10},"run":{"horizon":9}}', "horizon"),
    ('{"instance":{"kind":"synthetic","k_total":5},"run":{"horizon":10,"paths":0}}', "paths"),
    ('{"instance":{"kind":"synthetic","k_total":5},"run":{"horizon":10},"policies":["thompson"]}', "policies"),
    ('{"instance":{"kind":"synthetic","k_total":5,"active_preferences":[0,6]},"run":{"horizon":10}}',
     "active_preferences"),
])
def test_validation_errors(doc, field):
    with pytest.raises(ConfigValidationError, match=field):
        parse_config(doc)


def test_round_trip():
    cfg = parse_config(MINIMAL)
    again = parse_config(serialize_config(cfg))
    assert again == cfg
    assert serialize_config(again) == serialize_config(cfg)


def test_explicit_instance_round_trip():
    inst = build_synthetic(7, 0.8)
    doc = {"instance": {"kind": "explicit", **inst.to_dict()}, "run": {"horizon": 50}}
    cfg = parse_config(json.dumps(doc))
    built = cfg.instance.build()
    assert summarize(built).optimal_arm_of == summarize(inst).optimal_arm_of
    assert parse_config(serialize_config(cfg)) == cfg


def test_explicit_instance_invalid():
    doc = {"instance": {"kind": "explicit", "arms": [{"kind": "shifted_uniform", "base_index": 0}],
                        "preferences": {"support": [[0.5, 0.5]], "probabilities": [1.0]}},
           "run": {"horizon": 50}}
    with pytest.raises(ConfigValidationError, match="dimension"):
        parse_config(json.dumps(doc))


def test_emit_curves_layout(tmp_path):
    inst = build_synthetic(10)
    res = run_experiment(inst, ["wucb"], 300, n_paths=2, checkpoint_stride=100)
    path = emit_curves(res, tmp_path / "c.csv", 10, 1.0, 5)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 4
    assert [r[4] for r in rows[1:]] == ["100", "200", "300"]


def test_emit_curves_sorted_by_policy(tmp_path):
    res = run_experiment(build_synthetic(5), ["wucb", "oracle", "random"], 200, n_paths=2)
    rows = list(csv.DictReader(emit_curves(res, tmp_path / "c.csv", 5, 1.0, 5).open()))
    keys = [(r["policy"], int(r["t"])) for r in rows]
    assert keys == sorted(keys)


def _write(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_simulate_command(tmp_path):
    cfg = _write(tmp_path, {
        "instance": {"kind": "synthetic", "k_total": 5},
        "run": {"horizon": 500, "paths": 3, "checkpoint_stride": 250},
        "policies": ["wucb", "oracle"],
    })
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "curves.csv").read_bytes()
    assert first == (tmp_path / "b" / "curves.csv").read_bytes()
    assert len(first.decode().strip().splitlines()) == 1 + 2 * 2

    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["bounds"]["s2"] == [] and summary["bounds"]["theorem1_leading"] == 0.0
    assert summary["seeds"] == [0, 1, 2]
    assert summary["policies"]["wucb"]["counter_identities_hold"] is True
    assert len(summary["policies"]["wucb"]["paths"]) == 3


def test_bounds_command(tmp_path, capsys):
    cfg = _write(tmp_path, {"instance": {"kind": "synthetic", "k_total": 10}, "run": {"horizon": 100000}})
    assert main(["bounds", "--config", cfg]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["s2"] == [5, 6, 7, 8, 9]
    assert report["theorem1_leading"] == pytest.approx(85280.93, rel=1e-5)
    assert report["lemma34_rhs"] == pytest.approx(45498.16, rel=1e-6)


def test_exit_codes_are_distinct(tmp_path):
    bad_value = _write(tmp_path, {"instance": {"kind": "synthetic", "k_total": 5, "gamma": 1.5},
                                  "run": {"horizon": 10}})
    assert main(["bounds", "--config", bad_value]) == EXIT_VALIDATION
    bad_shape = _write(tmp_path, {"instance": {"kind": "synthetic"}, "run": {"horizon": 10}})
    assert main(["bounds", "--config", bad_shape]) == EXIT_SCHEMA
    assert main(["bounds", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
    assert len({EXIT_VALIDATION, EXIT_SCHEMA, EXIT_IO, EXIT_DOMAIN, 0}) == 5
    with pytest.raises(SystemExit) as exc:
        main(["preset", "--name", "fig9", "--out-dir", str(tmp_path)])
    assert exc.value.code == 2


def test_preset_small(tmp_path):
    out = run_preset("fig1b", 5, tmp_path, horizon=2000, paths=2)
    names = sorted(p.name for p in out["files"])
    assert names == ["fig1b_gamma0.5.csv", "fig1b_gamma0.7.csv", "fig1b_gamma1.0.csv", "fig1b_summary.json"]
    summary = json.loads((tmp_path / "fig1b_summary.json").read_text())
    assert summary["seeds"] == [5, 6]
    assert set(summary["configurations"]) == {"gamma1.0", "gamma0.7", "gamma0.5"}
    rows = list(csv.DictReader((tmp_path / "fig1b_gamma0.5.csv").open()))
    assert rows[-1]["gamma"] == "0.5" and rows[-1]["K"] == "10" and rows[-1]["s1_size"] == "5"


def test_preset_command(tmp_path):
    args = ["preset", "--name", "fig1c", "--seed", "1", "--out-dir", str(tmp_path), "--horizon", "1000",
            "--paths", "2"]
    assert main(args) == 0
    assert len(list(tmp_path.glob("fig1c_*.csv"))) == 4
