import json
import pathlib

import numpy as np
import pytest

from adaptvqe.cli import (
    RunConfig,
    cmd_compare,
    cmd_landscape,
    cmd_run,
    landscape_study,
    main,
    parse_config_file,
)

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
H4 = str(FIXTURES / "h4_3.0.fcidump")
H4_EQ = str(FIXTURES / "h4_1.5.fcidump")


def test_parse_config_file():
    doc = parse_config_file(
        "fixture = a.fcidump, b.fcidump\npool = qe  # comment\nmax_layers = 7\n\nseed = 3\n"
    )
    assert doc == {
        "fixture": "a.fcidump, b.fcidump",
        "pool": "qe",
        "max_layers": "7",
        "seed": "3",
    }
    with pytest.raises(ValueError):
        parse_config_file("not a pair\n")


def test_cmd_run_stall_flagged(tmp_path, capsys):
    cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["adapt"],
                    max_layers=10, out_dir=str(tmp_path))
    status = cmd_run(cfg)
    out = capsys.readouterr().out
    assert status == 0
    assert "stalled-at-eigenstate" in out
    trace_file = tmp_path / "trace_h4_3.0_qubit_adapt.csv"
    assert trace_file.exists()
    assert (tmp_path / "trace_h4_3.0_qubit_adapt.json").exists()
    assert (tmp_path / "checkpoint_h4_3.0_qubit_adapt.json").exists()


def test_cmd_run_missing_fixture(tmp_path):
    cfg = RunConfig(fixtures=["nope.fcidump"], out_dir=str(tmp_path))
    assert cmd_run(cfg) != 0


def test_cmd_run_nonconvergence_status(tmp_path):
    cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["tetris"],
                    max_layers=1, out_dir=str(tmp_path))
    assert cmd_run(cfg) == 1  # max-layers exhausted


def test_cmd_run_empty_pool_clean_exit(tmp_path):
    doc = {
        "qubit_count": 2,
        "terms": [{"coeff": 0.5, "string": "Z0"}],
        "constant": 0.0,
        "hf_reference": "10",
    }
    fixture = tmp_path / "tiny.json"
    fixture.write_text(json.dumps(doc))
    cfg = RunConfig(fixtures=[str(fixture)], pool="qubit", variants=["adapt"],
                    out_dir=str(tmp_path))
    assert cmd_run(cfg) == 0
    text = (tmp_path / "trace_tiny_qubit_adapt.csv").read_text()
    assert len(text.splitlines()) == 1  # header only


def test_cmd_run_reproducible(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["tetris"],
                        max_layers=3, out_dir=str(out), seed=5)
        cmd_run(cfg)
    name = "trace_h4_3.0_qubit_tetris.csv"
    assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cmd_compare_exclusion_and_tables(tmp_path):
    # at 3.0 A the single-operator variant stalls at an excited state, so the
    # geometry must be excluded; 1.5 A converges for both variants
    cfg = RunConfig(fixtures=[H4_EQ, H4], pool="qubit", variants=["adapt", "tetris"],
                    max_layers=40, out_dir=str(tmp_path))
    status = cmd_compare(cfg)
    assert status == 0
    table1 = (tmp_path / "table1.csv").read_text().splitlines()
    assert table1[0] == "molecule,pool,geometries,depth_ratio"
    row = table1[1].split(",")
    assert row[0] == "h4" and int(row[2]) == 1  # only 1.5 A used
    assert float(row[3]) > 1.0
    table2 = (tmp_path / "table2.csv").read_text().splitlines()
    assert float(table2[1].split(",")[4]) > 1.0


def test_cmd_compare_no_valid_pairs(tmp_path):
    cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["adapt", "tetris"],
                    max_layers=6, out_dir=str(tmp_path))
    assert cmd_compare(cfg) == 1


def test_landscape_rows_and_reproducibility(tmp_path):
    cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["tetris"],
                    max_layers=1, samples=3, out_dir=str(tmp_path), seed=11)
    assert cmd_landscape(cfg) == 0
    path = tmp_path / "landscape_h4_3.0_layer1.csv"
    lines = path.read_text().splitlines()
    assert lines[0] == "layer,mode,sample,energy,function_evaluations,gradient_evaluations,converged"
    modes = [ln.split(",")[1] for ln in lines[1:]]
    assert modes.count("warm") == 1 and modes.count("cold") == 1
    assert modes.count("random") == 3
    again = landscape_study(cfg, H4, "tetris")
    rows = again[0][1]
    file_energies = [float(ln.split(",")[3]) for ln in lines[1:]]
    assert np.allclose(file_energies, [r[3] for r in rows])


def test_landscape_one_parameter_layer_unimodal(tmp_path):
    # layer 1 of the single-operator variant has one parameter; every random
    # start lands in the same global 1-D minimum
    cfg = RunConfig(fixtures=[H4], pool="qubit", variants=["adapt"],
                    max_layers=1, samples=5, out_dir=str(tmp_path), seed=2)
    results = landscape_study(cfg, H4, "adapt")
    layer, rows = results[0]
    energies = [r[3] for r in rows]
    assert np.allclose(energies, energies[0], atol=1e-8)


def test_main_cli_round_trip(tmp_path):
    status = main([
        "run", "--fixture", H4, "--pool", "qubit", "--variant", "adapt",
        "--max-layers", "5", "--out", str(tmp_path), "--seed", "1",
    ])
    assert status == 0
    assert (tmp_path / "trace_h4_3.0_qubit_adapt.csv").exists()


def test_main_with_config_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        f"fixture = {H4}\npool = qubit\nvariant = adapt\nmax_layers = 4\nout = {tmp_path}\n"
    )
    status = main(["run", "--config", str(cfg_file)])
    assert status == 0
