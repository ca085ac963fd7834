import json
import math
import os

import numpy as np
import pytest

import gaugemc as g
from gaugemc.config import (
    load_sample_series,
    load_summary,
    run_config,
    save_sample_series,
    summary_to_dict,
)


def _config(**kw):
    base = dict(
        kind="rcpgm",
        noise={"type": "depolarizing", "p": 0.06},
        rows=(g.RunRow(lsize=12, n_sweep=1000, n_met=100, t_step=32,
                       t_min=0.9, t_max=1.6),),
        n_samples=4,
        seed=11,
        out_dir="out",
    )
    base.update(kw)
    return g.RunConfig(**base)


def test_roundtrip_is_identity():
    cfg = _config()
    text = cfg.to_json()
    again = g.parse_config(text)
    assert again == cfg
    assert again.to_json() == text
    assert again.config_hash() == cfg.config_hash()


def test_json_uses_model_key():
    data = json.loads(_config().to_json())
    assert data["model"] == "rcpgm"
    assert "kind" not in data
    # both spellings parse
    data["kind"] = data.pop("model")
    assert g.RunConfig.from_dict(data) == _config()


def test_defaults():
    cfg = g.RunConfig(kind="rbim", noise={"type": "none"},
                      rows=(g.RunRow(8, 100, 10, 4, 1.0, 2.0),))
    assert cfg.n_samples == 50
    assert cfg.seed == 0
    assert cfg.therm_units == 10000
    assert cfg.convention == "normalized"
    assert cfg.bin_interval == 1
    params = cfg.params(cfg.rows[0])
    assert params.therm_units == 10000
    assert params.ladder().n_steps == 4


def _error_field(fn):
    with pytest.raises(g.ConfigError) as err:
        fn()
    return err.value.field


def test_errors_name_the_field():
    assert _error_field(lambda: _config(kind="xyz")) == "model"
    assert _error_field(lambda: _config(noise={"type": "weird"})) == "noise.type"
    assert _error_field(lambda: _config(noise="депол")) == "noise"
    assert _error_field(lambda: _config(noise={"type": "depolarizing"})) == "noise.p"
    assert _error_field(
        lambda: _config(noise={"type": "depolarizing", "p": 0.9})) == "noise.p"
    assert _error_field(lambda: _config(rows=())) == "rows"
    assert _error_field(lambda: _config(n_samples=0)) == "n_samples"
    assert _error_field(lambda: _config(convention="other")) == "convention"

    bad_row = g.RunRow(12, 1000, 100, 32, t_min=1.6, t_max=0.9)
    err = _error_field(lambda: _config(rows=(bad_row,)))
    assert err == "rows[0].t_min"

    dup = (g.RunRow(8, 100, 10, 4, 1.0, 2.0), g.RunRow(8, 100, 10, 4, 1.2, 2.0))
    assert _error_field(lambda: _config(rows=dup)) == "rows"

    assert _error_field(
        lambda: _config(noise={"type": "circuit", "p": 0.01},
                        kind="rbim")) == "noise.type"
    assert _error_field(
        lambda: _config(noise={"type": "rates", "px_h": 0.1, "zz": 1})) == "noise.zz"


def test_parse_errors_name_the_field():
    text = _config().to_json()
    data = json.loads(text)
    data["extra_knob"] = 1
    assert _error_field(lambda: g.RunConfig.from_dict(data)) == "extra_knob"

    data = json.loads(text)
    del data["rows"][0]["t_max"]
    assert _error_field(
        lambda: g.RunConfig.from_dict(data)) == "rows[0].t_max"

    data = json.loads(text)
    data["rows"][0]["t_min"] = "cold"
    assert _error_field(
        lambda: g.RunConfig.from_dict(data)) == "rows[0].t_min"

    data = json.loads(text)
    data["rows"][0]["whatever"] = 3
    assert _error_field(
        lambda: g.RunConfig.from_dict(data)) == "rows[0].whatever"

    data = json.loads(text)
    data["seed"] = True
    assert _error_field(lambda: g.RunConfig.from_dict(data)) == "seed"

    assert _error_field(lambda: g.parse_config("{not json")) == "config"


def test_rates_mapping():
    assert _config(noise={"type": "none"}).rates() == g.NoiseRates()
    r = _config().rates()
    assert r.px_h == pytest.approx(0.02)
    assert r.q == pytest.approx(0.06)
    r = _config(noise={"type": "circuit", "p": 0.0015}).rates()
    assert r.px_h == pytest.approx(0.0015 * 52 / 15)
    assert r.q == pytest.approx(0.0015 * 88 / 15)
    r = _config(noise={"type": "rates", "px_h": 0.03, "q": 0.01}).rates()
    assert r.px_h == 0.03 and r.py_h == 0.0 and r.q == 0.01


def test_couplings_mapping():
    cs = _config(noise={"type": "none"}).couplings()
    assert all(cs[k] == 1.0 for k in g.TERM_KEYS[g.ModelKind.RCPGM])

    cs = _config().couplings()
    assert cs["jx_x"] == 1.0
    assert cs["jq_s"] == pytest.approx(2.0 - 0.5 * math.log(3.0), abs=1e-12)

    cs = _config(convention="unnormalized").couplings()
    assert cs["jx_x"] == pytest.approx(0.9625369004275146, abs=1e-12)

    cs = _config(kind="rbim", noise={"type": "depolarizing", "p": 0.06},
                 convention="unnormalized").couplings()
    assert cs["jx_x"] == pytest.approx(g.nishimori_bond_coupling(0.04),
                                       abs=1e-12)


def test_config_hash_tracks_content():
    cfg = _config()
    h = cfg.config_hash()
    assert len(h) == 16 and int(h, 16) >= 0
    assert cfg.with_seed(12).config_hash() != h
    assert cfg.with_seed(12).with_seed(11).config_hash() == h


def test_row_dir_layout():
    cfg = _config()
    assert cfg.row_dir(cfg.rows[0]) == os.path.join("out", "rcpgm_p0.06_L12")
    pure = _config(noise={"type": "none"})
    assert pure.row_dir(pure.rows[0]).endswith("rcpgm_p0_L12")


def test_save_and_load_file(tmp_path):
    cfg = _config()
    path = tmp_path / "run.json"
    cfg.save(path)
    assert g.RunConfig.load(path) == cfg


def _tiny_config(out_dir, **kw):
    base = dict(
        kind="rbim",
        noise={"type": "depolarizing", "p": 0.08},
        rows=(g.RunRow(lsize=4, n_sweep=12, n_met=2, t_step=3,
                       t_min=1.5, t_max=3.0),),
        n_samples=3,
        seed=7,
        out_dir=str(out_dir),
        therm_units=4,
        bin_interval=2,
    )
    base.update(kw)
    return g.RunConfig(**base)


def test_sample_series_roundtrip(tmp_path):
    cfg = _tiny_config(tmp_path)
    row = cfg.rows[0]
    disorder = g.sample_disorder(cfg.model, cfg.rates(), cfg.couplings(),
                                 row.lsize, g.disorder_seed(cfg.seed, 0))
    result = g.run_disorder_sample(disorder, cfg.params(row), cfg.seed, 0)
    path = tmp_path / "sample0000.npz"
    save_sample_series(result, path, cfg.config_hash(), cfg.seed)
    back = load_sample_series(path, cfg.config_hash())
    assert back.sample_index == 0
    assert back.finished
    assert np.array_equal(back.temperatures, result.temperatures)
    for a, b in zip(result.series, back.series):
        assert np.array_equal(a.order_param, b.order_param)
        assert np.array_equal(a.energy, b.energy)
        assert a.bin_interval == b.bin_interval
    with pytest.raises(ValueError):
        load_sample_series(path, "0badc0de0badc0de")


def test_run_config_writes_and_reuses_series(tmp_path):
    cfg = _tiny_config(tmp_path / "res")
    results = run_config(cfg)
    assert len(results) == 1
    row_dir = cfg.row_dir(cfg.rows[0])
    names = sorted(os.listdir(row_dir))
    assert names == ["sample0000.npz", "sample0001.npz", "sample0002.npz",
                     "summary.json"]
    with open(os.path.join(row_dir, "summary.json")) as handle:
        first = handle.read()

    # deleting one series file and rerunning recomputes only that sample
    # and reproduces the summary byte for byte
    os.remove(os.path.join(row_dir, "sample0001.npz"))
    kept = os.path.getmtime(os.path.join(row_dir, "sample0000.npz"))
    run_config(cfg)
    assert os.path.getmtime(os.path.join(row_dir, "sample0000.npz")) == kept
    with open(os.path.join(row_dir, "summary.json")) as handle:
        assert handle.read() == first

    record = load_summary(os.path.join(row_dir, "summary.json"))
    assert record["config_hash"] == cfg.config_hash()
    assert record["master_seed"] == cfg.seed
    assert record["n_samples"] == 3
    assert set(record["table"]) == {"order", "order_err", "energy",
                                    "energy_err", "chi", "chi_err",
                                    "b3", "b3_err"}
    assert record["temperatures"].shape == (3,)


def test_run_config_rejects_stale_series(tmp_path):
    cfg = _tiny_config(tmp_path / "res")
    run_config(cfg)
    other = _tiny_config(tmp_path / "res", seed=8)
    with pytest.raises(ValueError):
        run_config(other)


def test_summary_to_dict_embeds_config():
    cfg = _tiny_config("unused")
    params = cfg.params(cfg.rows[0])
    temps = params.ladder().temperatures
    table = {"order": np.zeros(3)}
    res = g.ExperimentResult(cfg.model, 4, params, cfg.seed, 3, temps, table)
    record = summary_to_dict(res, cfg, cfg.rows[0])
    assert record["config"]["kind"] == "rbim"
    assert record["row"]["lsize"] == 4
    assert record["config_hash"] == cfg.config_hash()


def test_find_summaries(tmp_path):
    cfg = _tiny_config(tmp_path / "res")
    run_config(cfg)
    hits = g.find_summaries([str(tmp_path / "res")])
    assert len(hits) == 1
    assert hits[0].endswith("summary.json")
    assert g.find_summaries(hits) == hits
