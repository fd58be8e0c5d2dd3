import pytest

from pdm2d.export import clean, csv_text, json_text, write_atomic
from pdm2d.model import ModelParams
from pdm2d.suites import SUITES, coeff_rows, lattice_path_count, run_suite


def test_row_shape_and_unknown_suite():
    rows = list(coeff_rows(ks=(1.0,), n_max=3))
    for r in rows:
        assert {"identity", "probe", "residual_L2", "residual_sup", "pass", "mode", "threshold"} <= set(r)
    with pytest.raises(ValueError):
        run_suite("everything")
    assert "all" in SUITES


def test_massgen_suite_passes():
    rows = run_suite("massgen", ModelParams(2.0, 1.5, -3.0))
    assert rows and all(r["pass"] for r in rows)


def test_lattice_path_small_values():
    assert lattice_path_count(0, 2, 1) == 1
    assert lattice_path_count(0, 4, 2) == 2
    assert lattice_path_count(3, 3, 0) == 1


def test_export_helpers(tmp_path):
    import numpy as np
    assert clean({"a": np.float64(1.5), "b": [np.int64(2), float("nan")]}) == {"a": 1.5, "b": [2, None]}
    assert json_text({"z": 1, "a": 2}).index('"z"') < json_text({"z": 1, "a": 2}).index('"a"')
    text = csv_text(["x", "y"], [(0.1, 1 / 3)], {"m": 1})
    assert text == '# {"m": 1}\nx,y\n0.1,0.333333333333\n'
    target = tmp_path / "f.txt"
    write_atomic(str(target), "hello\n")
    assert target.read_text() == "hello\n"
