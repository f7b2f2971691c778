import numpy as np
import pytest

from causalweb.core import (AnalysisSpec, Dataset, DriverSpec, ProcessSeries, ValidationError,
                            build_design, parse_drivers)


def make_dataset(n=20):
    t = np.arange(n, dtype=float)
    return Dataset.from_dict({"x": t, "y": 100 + t, "z": 200 + t})


def test_series_is_read_only_and_finite():
    s = ProcessSeries("a", [1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    with pytest.raises(ValidationError):
        ProcessSeries("a", [1.0, np.nan])
    with pytest.raises(ValidationError):
        ProcessSeries("a", np.zeros((2, 2)))


def test_dataset_validation():
    with pytest.raises(ValidationError, match="duplicate"):
        Dataset((ProcessSeries("a", [1.0]), ProcessSeries("a", [2.0])))
    with pytest.raises(ValidationError, match="lengths"):
        Dataset.from_dict({"a": [1.0, 2.0], "b": [1.0]})
    d = make_dataset()
    assert d.names == ["x", "y", "z"]
    assert d.length == 20
    with pytest.raises(ValidationError, match="unknown"):
        d["nope"]


def test_parse_drivers_grammar():
    drivers = parse_drivers("y:1,2; z ; x_d=x:2,1")
    assert [d.process for d in drivers] == ["y", "z", "x"]
    assert drivers[0].lags == (1, 2)
    assert drivers[1].lags == (1,)
    assert drivers[2].lags == (1, 2)
    assert drivers[2].label == "x_d"


def test_parse_drivers_repeated_process_gets_unique_labels():
    labels = [d.label for d in parse_drivers("x:1;x:3,4")]
    assert labels == ["x@1", "x@3,4"]


@pytest.mark.parametrize("text", ["", "y:a", ":1", "y:0", "y:1,1"])
def test_parse_drivers_rejects(text):
    with pytest.raises(ValidationError):
        parse_drivers(text)


def test_spec_validation():
    with pytest.raises(ValidationError, match="lead"):
        AnalysisSpec("x", (DriverSpec("y"),), lead=0)
    with pytest.raises(ValidationError, match="unique"):
        AnalysisSpec("x", (DriverSpec("y"), DriverSpec("y", (2,))))
    with pytest.raises(ValidationError):
        AnalysisSpec("x", ())
    with pytest.raises(ValidationError):
        AnalysisSpec("x", (DriverSpec("y"),), reference="laplace")


def test_spec_round_trip():
    spec = AnalysisSpec("x", tuple(parse_drivers("y:1,2;x_d=x:1")), lead=2, k=6,
                        reference="uniform")
    assert AnalysisSpec.from_dict(spec.to_dict()) == spec


def test_design_alignment():
    # target x[t] with lead 1: lag l of a driver uses index t - l
    d = make_dataset()
    spec = AnalysisSpec("x", tuple(parse_drivers("y:1,2;z:1")))
    design = build_design(d, spec)
    assert spec.depth == 2
    assert design.n_rows == 18
    np.testing.assert_array_equal(design.target, np.arange(2, 20))
    np.testing.assert_array_equal(design.blocks[0][:, 0], 100 + np.arange(1, 19))
    np.testing.assert_array_equal(design.blocks[0][:, 1], 100 + np.arange(0, 18))
    np.testing.assert_array_equal(design.blocks[1][:, 0], 200 + np.arange(1, 19))


def test_design_alignment_with_lead():
    d = make_dataset()
    spec = AnalysisSpec("x", tuple(parse_drivers("y:1")), lead=3)
    design = build_design(d, spec)
    assert design.n_rows == 20 - 3
    np.testing.assert_array_equal(design.target - design.blocks[0][:, 0], 3 - 100)


def test_design_columns_by_mask():
    d = make_dataset()
    design = build_design(d, AnalysisSpec("x", tuple(parse_drivers("y:1,2;z:1"))))
    assert design.columns(0b01).shape == (18, 2)
    assert design.columns(0b11).shape == (18, 3)
    assert design.columns(0).shape == (18, 0)


def test_design_too_short():
    d = make_dataset(6)
    with pytest.raises(ValidationError, match="rows"):
        build_design(d, AnalysisSpec("x", tuple(parse_drivers("y:2"))))
