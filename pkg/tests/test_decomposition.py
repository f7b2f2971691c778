import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalweb.core import (AnalysisSpec, Dataset, NumericalError, ValidationError, build_design,
                            parse_drivers)
from causalweb.decomposition import (causal_strengths, compute_raw_table, driver_totals,
                                     full_decomposition, members, parse_subset_key, pure_mlinks,
                                     raw_cmi_for_subset, resolve_threads, subset_key, subset_masks)
from causalweb.estimators import EstimatorParams

from .test_estimators import gaussian_cmi, gaussian_mi


def test_subset_order():
    assert subset_masks(3) == [0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111]
    assert len(subset_masks(5)) == 31
    assert members(0b101) == [0, 2]


def test_subset_keys_round_trip():
    labels = ["y", "z", "x_d"]
    for mask in subset_masks(3):
        assert parse_subset_key(subset_key(mask, labels), labels) == mask
    with pytest.raises(ValidationError):
        parse_subset_key("y+q", labels)


def mobius_pure(raw, n):
    """Independent oracle: inclusion-exclusion over all subsets of S."""
    out = {}
    for mask in subset_masks(n):
        idx = members(mask)
        total = 0.0
        for size in range(1, len(idx) + 1):
            for sub in combinations(idx, size):
                total += (-1) ** (len(idx) - size) * raw[sum(1 << i for i in sub)]
        out[mask] = total
    return out


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 31))
def test_pure_mlinks_match_inclusion_exclusion(n, seed):
    rng = np.random.default_rng(seed)
    raw = {m: float(rng.uniform(-1, 3)) for m in subset_masks(n)}
    pure = pure_mlinks(raw, n)
    oracle = mobius_pure(raw, n)
    for m in raw:
        assert pure[m] == pytest.approx(oracle[m], abs=1e-9)


def test_two_driver_pure_link_is_interaction_information():
    # raw: I(x;y|z), I(x;z|y), I(x;y,z); with I(x;y) = I(x;yz) - I(x;z|y)
    raw = {0b01: 2.99, 0b10: 2.30, 0b11: 3.10}
    pure = pure_mlinks(raw, 2)
    i_xy = raw[0b11] - raw[0b10]
    interaction = i_xy - raw[0b01]
    # I(x;y;z) = I(x;y) - I(x;y|z): -2.19 for these Model-1-like numbers
    assert pure[0b11] == pytest.approx(interaction)
    assert pure[0b11] == pytest.approx(-2.19)
    assert driver_totals(pure, 2)[0] == pytest.approx(2.99 - 2.19 / 2)


def test_missing_raw_entry():
    with pytest.raises(ValidationError, match="missing"):
        pure_mlinks({1: 0.1, 2: 0.2}, 2)


def test_causal_strengths_normalise():
    cs, noise = causal_strengths([1.0, 2.0], 3.0, 1.0)
    assert cs == [0.25, 0.5] and noise == 0.25
    with pytest.raises(NumericalError):
        causal_strengths([1.0], -2.0, 1.0)


def gaussian_dataset(n=3000, seed=0):
    rng = np.random.default_rng(seed)
    cov = np.array([[1.0, 0.5, 0.3, 0.2],
                    [0.5, 1.0, 0.1, 0.0],
                    [0.3, 0.1, 1.0, 0.4],
                    [0.2, 0.0, 0.4, 1.0]])
    s = rng.multivariate_normal(np.zeros(4), cov, size=n)
    # drivers at time t-1 carry the joint structure with the target at t
    series = {"x": s[:, 0], "a": np.roll(s[:, 1], -1), "b": np.roll(s[:, 2], -1),
              "c": np.roll(s[:, 3], -1)}
    return Dataset.from_dict(series), cov


def test_subset_cmis_against_gaussian_covariance():
    data, cov = gaussian_dataset()
    spec = AnalysisSpec("x", tuple(parse_drivers("a;b;c")), transform=False)
    design = build_design(data, spec)
    params = EstimatorParams()
    for mask in subset_masks(3):
        inside = [1 + i for i in members(mask)]
        rest = [1 + i for i in range(3) if not mask >> i & 1]
        expected = gaussian_cmi(cov, [0], inside, rest) if rest else gaussian_mi(cov, [0], inside)
        assert raw_cmi_for_subset(design, mask, params) == pytest.approx(expected, abs=0.04), mask


def test_thread_count_does_not_change_results():
    data, _ = gaussian_dataset(1500)
    spec = AnalysisSpec("x", tuple(parse_drivers("a;b;c")))
    design = build_design(data, spec)
    a = compute_raw_table(design, EstimatorParams(), threads=1)
    b = compute_raw_table(design, EstimatorParams(), threads=4)
    assert a == b


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("CAUSALWEB_THREADS", "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2
    monkeypatch.setenv("CAUSALWEB_THREADS", "many")
    with pytest.raises(ValidationError):
        resolve_threads()
    monkeypatch.delenv("CAUSALWEB_THREADS")
    assert resolve_threads() >= 1
    with pytest.raises(ValidationError):
        resolve_threads(0)


def test_full_decomposition_identities():
    data, _ = gaussian_dataset(1500)
    res = full_decomposition(data, AnalysisSpec("x", tuple(parse_drivers("a;b;c"))))
    assert math.fsum(res.mlinks.pure.values()) == pytest.approx(res.i_full, abs=1e-12)
    assert math.fsum(res.totals) == pytest.approx(res.i_full, abs=1e-12)
    assert math.fsum(res.cs) + res.cs_noise == pytest.approx(1.0, abs=1e-12)
    assert res.w_total == pytest.approx(res.w_x + res.i_full)
    assert "certainty_space:raw" in res.flags
    rows = res.order_contributions()
    for label, cs in res.cs_by_label().items():
        assert math.fsum(rows[label].values()) == pytest.approx(cs, abs=1e-12)


def test_driver_cap():
    data = Dataset.from_dict({f"s{i}": np.random.default_rng(i).standard_normal(50)
                              for i in range(4)})
    spec = AnalysisSpec("s0", tuple(parse_drivers("s1;s2;s3")))
    with pytest.raises(ValidationError, match="cap"):
        full_decomposition(data, spec, max_drivers=2)


def test_totals_simple_case():
    pure = {0b01: 1.0, 0b10: 0.5, 0b11: 0.4}
    assert driver_totals(pure, 2) == [1.2, 0.7]
