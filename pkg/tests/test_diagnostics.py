import numpy as np
import pytest

from causalweb.certainty import fit_reference
from causalweb.core import AnalysisSpec, Dataset, ValidationError, parse_drivers
from causalweb.decomposition import DecompositionResult, MlinkTable, full_decomposition
from causalweb.diagnostics import (INCONCLUSIVE, MISSING_LIKELY, NO_MISSING, MissingProcessReport,
                                   confounder_scan, missing_process_test)
from causalweb.simulators import simulate_model


def fake_result(pure, totals, labels=("y", "z")):
    spec = AnalysisSpec("x", tuple(parse_drivers(";".join(labels))))
    n = len(labels)
    return DecompositionResult(
        spec=spec, mlinks=MlinkTable(n, dict(pure), dict(pure)), totals=list(totals),
        i_full=sum(totals), w_x=0.3, w_total=0.3 + sum(totals), cs=[0.0] * n, cs_noise=0.0,
        reference=fit_reference([0.0, 1.0]), n_rows=100,
    )


def test_confounder_scan_flags_vanishing_1link():
    # y: the direct link vanishes but a 2link carries it
    res = fake_result({0b01: 0.001, 0b10: 0.5, 0b11: 0.4}, [0.201, 0.7])
    assert confounder_scan(res) == ["y"]


def test_confounder_scan_ignores_irrelevant_driver():
    res = fake_result({0b01: 0.0, 0b10: 2.3, 0b11: 0.0}, [0.0, 2.3])
    assert confounder_scan(res) == []


def test_confounder_scan_independent_drivers():
    rng = np.random.default_rng(0)
    y, z, e = rng.standard_normal((3, 1500))
    x = np.r_[0.0, y[:-1] + z[:-1]] + 0.3 * e
    res = full_decomposition(Dataset.from_dict({"x": x, "y": y, "z": z}),
                             AnalysisSpec("x", tuple(parse_drivers("y;z"))))
    assert confounder_scan(res) == []


@pytest.fixture(scope="module")
def confounder_data():
    return simulate_model("confounder", 3000, seed=2)


def test_missing_process_is_deterministic(confounder_data):
    spec = AnalysisSpec("x", tuple(parse_drivers("y")))
    a = missing_process_test(confounder_data, spec, 0.01, n_reps=3, seed=4, threads=1)
    b = missing_process_test(confounder_data, spec, 0.01, n_reps=3, seed=4, threads=3)
    assert a == b
    assert a.verdict in (MISSING_LIKELY, NO_MISSING)
    assert MissingProcessReport.from_dict(a.to_dict()) == a


def test_missing_process_verdicts(confounder_data):
    without_z = AnalysisSpec("x", tuple(parse_drivers("y")))
    with_z = AnalysisSpec("x", tuple(parse_drivers("y;z")))
    rep = missing_process_test(confounder_data, without_z, 0.01, n_reps=3, seed=1)
    assert rep.missing_process_likely
    rep = missing_process_test(confounder_data, with_z, 0.01, n_reps=3, seed=1)
    assert rep.verdict == NO_MISSING


def test_larger_perturbation_raises_noise_share(confounder_data):
    spec = AnalysisSpec("x", tuple(parse_drivers("y;z")))
    small = missing_process_test(confounder_data, spec, 0.005, n_reps=3, seed=1)
    large = missing_process_test(confounder_data, spec, 0.02, n_reps=3, seed=1)
    assert large.cs_noise_perturbed_mean >= small.cs_noise_perturbed_mean - small.cs_noise_perturbed_std


def test_tiny_perturbation_is_inconclusive(confounder_data):
    spec = AnalysisSpec("x", tuple(parse_drivers("y;z")))
    rep = missing_process_test(confounder_data, spec, 1e-9, n_reps=2, seed=0)
    assert rep.verdict == INCONCLUSIVE
    assert rep.rel_change < 0.05


def test_missing_process_preconditions(confounder_data):
    spec = AnalysisSpec("x", tuple(parse_drivers("y")))
    with pytest.raises(ValidationError):
        missing_process_test(confounder_data, spec, 0.0)
    with pytest.raises(ValidationError):
        missing_process_test(confounder_data, spec, 0.01, n_reps=1)
