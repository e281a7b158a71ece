import numpy as np
import pytest
from numpy.testing import assert_array_equal

from fodgmm import (
    DgpConfig,
    DimensionError,
    PanelData,
    PanelFormatError,
    read_panel_csv,
    simulate,
    write_panel_csv,
)


def test_panel_validation():
    with pytest.raises(DimensionError):
        PanelData(y=np.zeros(5))
    with pytest.raises(DimensionError):
        PanelData(y=np.zeros((0, 4)))
    with pytest.raises(DimensionError):
        PanelData(y=np.zeros((3, 2)))  # T = 1
    with pytest.raises(ValueError, match="finite"):
        PanelData(y=np.array([[1.0, np.nan, 2.0]]))


def test_panel_is_immutable():
    panel = PanelData(y=np.ones((2, 3)))
    with pytest.raises(ValueError):
        panel.y[0, 0] = 4.0


def test_csv_round_trip_is_exact(tmp_path):
    panel = simulate(DgpConfig(delta=0.5, T=4, N=9, seed=3))
    path = tmp_path / "panel.csv"
    write_panel_csv(panel, path)
    back = read_panel_csv(path)
    assert_array_equal(back.y, panel.y)
    lines = path.read_text().splitlines()
    assert lines[0] == "unit,time,y"
    assert len(lines) == 1 + 9 * 5


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,t,value\n1,0,1.0\n")
    with pytest.raises(PanelFormatError, match="line 1"):
        read_panel_csv(path)


def test_csv_names_malformed_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("unit,time,y\n1,0,1.0\n1,1\n")
    with pytest.raises(PanelFormatError, match="line 3") as excinfo:
        read_panel_csv(path)
    assert excinfo.value.line == 3


def test_csv_names_non_numeric_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("unit,time,y\n1,0,1.0\n1,one,2.0\n")
    with pytest.raises(PanelFormatError, match="line 3"):
        read_panel_csv(path)


def test_csv_rejects_duplicates_and_imbalance(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("unit,time,y\n1,0,1.0\n1,0,2.0\n")
    with pytest.raises(PanelFormatError, match="duplicate"):
        read_panel_csv(path)
    path2 = tmp_path / "ragged.csv"
    path2.write_text("unit,time,y\n1,0,1.0\n1,1,2.0\n1,2,3.0\n2,0,1.0\n")
    with pytest.raises(PanelFormatError, match="unbalanced"):
        read_panel_csv(path2)


def test_csv_rejects_bad_indices(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("unit,time,y\n0,0,1.0\n")
    with pytest.raises(PanelFormatError, match="unit"):
        read_panel_csv(path)


def test_csv_rejects_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("unit,time,y\n")
    with pytest.raises(PanelFormatError, match="no data"):
        read_panel_csv(path)
