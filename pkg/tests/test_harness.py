import json
import subprocess
import sys

import numpy as np
import pytest

from iafeedback.harness import (
    CSV_COLUMNS,
    ScenarioConfig,
    Scheme,
    link_quant_stats,
    records_to_csv,
    run_trial,
    sweep,
    table1_experiment,
    toy_network,
    write_records,
    _prepare_trial,
    _scheme_allocation,
)
from iafeedback.ia import IaOptions
from iafeedback.rng import substream
from iafeedback.topology import SystemDims, sample_random_itp


DIMS = SystemDims(k=3, nt=3, nr=2, d=1)


def small_itp(seed=0):
    return sample_random_itp(DIMS, 0.6, 1.0, np.random.default_rng(seed))


def tiny_config(**kw):
    defaults = dict(dims=DIMS, snr_db=(10.0,), budgets=(18,), trials=12,
                    schemes=("DFS", "CVQ"), seed=3, n_jobs=1, chunk_size=6)
    defaults.update(kw)
    return ScenarioConfig(**defaults)


class TestScheme:
    def test_families(self):
        assert Scheme.spatial("DFS") and Scheme.spatial("HDS1")
        assert not Scheme.spatial("CVQ") and not Scheme.spatial("HDS2")
        assert Scheme.dynamic_bits("DFS") and Scheme.dynamic_bits("HDS2")
        assert not Scheme.uses_feedback("RB")

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            Scheme.validate("XYZ")


class TestRunTrial:
    def test_returns_sample(self):
        s = run_trial(small_itp(), "DFS", 15, 10.0, substream(1, "t", 0))
        assert len(s.rates) == 3 and len(s.rinrs) == 3
        assert all(r >= 0 for r in s.rates)

    def test_deterministic(self):
        a = run_trial(small_itp(), "CVQ", 15, 10.0, substream(1, "t", 0))
        b = run_trial(small_itp(), "CVQ", 15, 10.0, substream(1, "t", 0))
        assert a == b

    def test_rb_ignores_budget(self):
        a = run_trial(small_itp(), "RB", 0, 10.0, substream(1, "t", 0))
        b = run_trial(small_itp(), "RB", 999, 10.0, substream(1, "t", 0))
        assert a == b

    def test_infeasible_rejected(self):
        from iafeedback.errors import DimensionMismatchError

        itp = sample_random_itp(SystemDims(5, 2, 2, 1), 0.5, 1.0,
                                np.random.default_rng(0))
        with pytest.raises(DimensionMismatchError):
            run_trial(itp, "DFS", 10, 10.0, substream(1, "t", 0))

    def test_high_budget_small_residual(self):
        # 80 bits per cross link leaves residual interference orders of
        # magnitude under the transmit power.
        itp = small_itp(4)
        nlinks = 6
        s = run_trial(itp, "DFS", 80 * nlinks, 10.0, substream(2, "t", 0),
                      cap_bits=12)
        assert max(s.rinrs) < 1e-3 * 10.0


class TestSchemeConsistency:
    def test_codebook_sharing(self):
        # With homogeneous gains the water-filled split equals the uniform
        # split, so schemes from the same codebook family must produce
        # identical quantized channels from the same stream.
        itp = sample_random_itp(DIMS, 0.6, 0.0, np.random.default_rng(1))
        p = 10.0
        out = {}
        for scheme in ("DFS", "HDS1", "HDS2", "CVQ"):
            rng = substream(9, "trial", 0)
            _, hq, _, _ = _prepare_trial(itp, scheme, 24, p, rng, 12, 2000)
            out[scheme] = hq
        stats = link_quant_stats(itp, 2000)
        assert _scheme_allocation("DFS", stats, 24).bits == \
            _scheme_allocation("CVQ", stats, 24).bits
        assert np.array_equal(out["DFS"], out["HDS1"])  # spatial family
        assert np.array_equal(out["HDS2"], out["CVQ"])  # base family
        assert not np.array_equal(out["DFS"], out["CVQ"])  # families differ

    def test_allocation_sharing(self):
        itp = small_itp(2)
        stats = link_quant_stats(itp, 2000)
        assert _scheme_allocation("DFS", stats, 30).bits == \
            _scheme_allocation("HDS2", stats, 30).bits
        assert _scheme_allocation("CVQ", stats, 30).bits == \
            _scheme_allocation("HDS1", stats, 30).bits


class TestConfig:
    def test_json_round_trip(self):
        cfg = tiny_config(itp=small_itp(5), axis_values=(0.2, 0.8))
        back = ScenarioConfig.from_json(cfg.to_json())
        assert back.dims == cfg.dims
        assert back.snr_db == cfg.snr_db
        assert back.budgets == cfg.budgets
        assert back.axis_values == (0.2, 0.8)
        assert back.itp.links[0][1].gain == cfg.itp.links[0][1].gain

    def test_invalid_rejected(self):
        with pytest.raises(ValueError):
            tiny_config(trials=0)
        with pytest.raises(ValueError):
            tiny_config(snr_db=())
        with pytest.raises(ValueError):
            tiny_config(schemes=("DFS", "NOPE"))


class TestSweep:
    def test_bits_axis_grid(self):
        cfg = tiny_config(budgets=(6, 18))
        recs = sweep(cfg, "bits")
        assert len(recs) == 4  # 2 schemes x 2 budgets
        assert {r.budget for r in recs} == {6, 18}
        assert all(r.trials == 12 for r in recs)

    def test_correlation_axis_uses_config_values(self):
        cfg = tiny_config(schemes=("CVQ",), axis_values=(0.2, 0.8), trials=6)
        recs = sweep(cfg, "correlation")
        assert [r.eps for r in recs] == [0.2, 0.8]

    def test_snr_scaled_budget_grows(self):
        cfg = tiny_config(schemes=("CVQ",), snr_db=(10.0, 20.0), trials=4)
        recs = sweep(cfg, "snr-scaled")
        assert recs[1].budget > recs[0].budget

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            sweep(tiny_config(), "frequency")

    def test_every_mean_has_half_width(self):
        recs = sweep(tiny_config(trials=8), "bits")
        for r in recs:
            assert r.rinr_half_width >= 0 and r.rlim_half_width >= 0


class TestPersistence:
    def test_csv_schema(self):
        recs = sweep(tiny_config(trials=4, bounds=False), "bits")
        text = records_to_csv(recs)
        header = text.splitlines()[0].split(",")
        assert tuple(header) == CSV_COLUMNS

    def test_byte_identical_reruns(self):
        cfg = tiny_config(trials=6)
        a = records_to_csv(sweep(cfg, "bits"))
        b = records_to_csv(sweep(cfg, "bits"))
        assert a == b

    def test_seed_changes_output(self):
        a = records_to_csv(sweep(tiny_config(trials=6, seed=1), "bits"))
        b = records_to_csv(sweep(tiny_config(trials=6, seed=2), "bits"))
        assert a != b

    def test_sidecar_written(self, tmp_path):
        cfg = tiny_config(trials=4, bounds=False)
        recs = sweep(cfg, "bits")
        out = tmp_path / "r.csv"
        write_records(recs, str(out), cfg)
        meta = json.loads((out.parent / "r.csv.meta.json").read_text())
        assert meta["seed"] == cfg.seed
        assert meta["columns"] == list(CSV_COLUMNS)
        assert meta["config"]["trials"] == 4


class TestToyExperiment:
    def test_structure_and_ordering_smoke(self):
        res = table1_experiment(trials=150, budgets=(4,), seed=2, n_jobs=1,
                                chunk_size=75)
        m_conv, _ = res.cells[("conventional", 4)]
        m_dyn, _ = res.cells[("dynamic", 4)]
        assert m_dyn < m_conv
        assert res.trials == 150

    def test_toy_network_shape(self):
        itp = toy_network()
        assert itp.dims == SystemDims(4, 3, 2, 1)
        assert itp.links[0][2].m_t == 3
        assert itp.links[0][3].gain == pytest.approx(0.1)
        assert np.allclose(np.trace(itp.links[0][2].phi_t), 3.0)


class TestCli:
    def run_cli(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "iafeedback.cli", *args],
            capture_output=True, text=True,
        )

    def test_table1_smoke(self):
        r = self.run_cli("table1", "--trials", "40", "--seed", "1",
                         "--jobs", "1")
        assert r.returncode == 0
        assert "conventional" in r.stdout and "dynamic" in r.stdout

    def test_sweep_writes_csv(self, tmp_path):
        cfg = tiny_config(trials=4, bounds=False)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(cfg.to_json())
        out = tmp_path / "out.csv"
        r = self.run_cli("sweep", str(cfg_path), "--axis", "bits",
                         "--out", str(out))
        assert r.returncode in (0, 2)
        lines = out.read_text().splitlines()
        assert lines[0].split(",")[0] == "scheme"
        assert len(lines) == 1 + 2  # header + 2 schemes x 1 budget

    def test_alloc_command(self, tmp_path):
        stats = [
            {"rx": 0, "tx": 1, "beta": 5.0, "gain": 1.0, "m_r": 2, "m_t": 3},
            {"rx": 0, "tx": 2, "beta": 5.0, "gain": 0.1, "m_r": 2, "m_t": 3},
        ]
        f = tmp_path / "stats.json"
        f.write_text(json.dumps(stats))
        r = self.run_cli("alloc", str(f), "--budget", "20")
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert sum(doc["bits"].values()) == 20

    def test_beta_command(self, tmp_path):
        doc = {
            "phi_r": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            "phi_t": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            "n_samples": 20000,
        }
        f = tmp_path / "link.json"
        f.write_text(json.dumps(doc))
        r = self.run_cli("beta", str(f))
        assert r.returncode == 0
        out = json.loads(r.stdout)
        assert abs(out["beta"] - 3.0) < 10 * out["stderr"]

    def test_missing_subcommand_fails(self):
        r = self.run_cli()
        assert r.returncode != 0
