import importlib.util
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod  # dataclasses look their module up here
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture(scope="module")
def tables():
    return load("reproduce_tables")


def test_presets_build_valid_configs(tables):
    for name, preset in tables.PRESETS.items():
        configs = preset.configs(10 ** 9)
        assert configs, name
        assert all(cfg.sizes for cfg in configs)


def test_size_cap_filters(tables):
    configs = tables.PRESETS["table5"].configs(1000)
    assert {cfg.sizes for cfg in configs} == {(31,)}


def test_epsilon_table_printout(tables, capsys):
    assert tables.main(["table4"]) == 0
    out = capsys.readouterr().out
    assert "0.42 / 0.42" in out


def test_small_table_run(tables, tmp_path, capsys):
    assert tables.main(["table5", "--max-n", "1000", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "table5.csv").exists()
    assert "minres/mg-ar" in capsys.readouterr().out


def test_figure_export(tmp_path):
    assert load("export_figures").main(["--n", "64", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("ex1_*.txt"))) == 4
