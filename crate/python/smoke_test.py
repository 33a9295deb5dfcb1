"""Smoke test for the pysnipe extension.

Build and install first:  pip install --no-build-isolation ./crates/py
Then run:                 python -m pytest python/smoke_test.py
"""

import math

import pytest

import pysnipe


def test_graph_basics():
    g = pysnipe.Graph(4, [(0, 1), (1, 2), (2, 2), (1, 0)])
    assert g.n == 4 and len(g) == 4
    assert g.edge_count == 2
    assert g.closed_neighborhood(1) == [0, 1, 2]
    assert g.closed_neighborhood(3) == [3]


def test_three_node_example():
    # path 0-1-2, p = 1/2, z = (1, 0, 1), y = (1, 2, 3)
    g = pysnipe.Graph(3, [(0, 1), (1, 2)])
    y = [1.0, 2.0, 3.0]
    z = [True, False, True]
    # D = (2, -2, 2); only M_1 has a nonzero sum: (1/3) * 2 * 2
    assert pysnipe.pseudo_inverse(g, y, z, 0.5) == pytest.approx(4.0 / 3.0)
    dim = pysnipe.difference_in_means(y, z, 0.5)
    contrast = pysnipe.interference_contrast(g, y, z, 0.5)
    assert contrast == pytest.approx(pysnipe.pseudo_inverse(g, y, z, 0.5) - dim)


def test_simulated_instance_and_report():
    g = pysnipe.Graph.erdos_renyi(2000, 6.0, 11)
    model = pysnipe.generate_instance(g, 1.0, 0.5, "sqrt", 12)
    z = pysnipe.bernoulli_assign(g.n, 0.5, 13)
    y = model.outcomes(z)
    assert 0.0 < model.tte() < 1.0

    value, raw, clipped = pysnipe.variance_estimate(g, y, z, 0.5)
    assert value >= 0.0 and (clipped or value == raw)

    report = pysnipe.analyze(g, y, z, 0.5)
    pi = report["pseudo_inverse"]
    assert pi["point"] == pytest.approx(pysnipe.pseudo_inverse(g, y, z, 0.5))
    assert pi["ci_low"] <= pi["point"] <= pi["ci_high"]
    assert report["dim"]["d_max"] == 1
    assert math.isfinite(report["contrast"]["p_normal"])


def test_errors_raise_value_error():
    g = pysnipe.Graph.ring(10, 2)
    with pytest.raises(ValueError):
        pysnipe.pseudo_inverse(g, [1.0] * 10, [True] * 10, 1.5)
    with pytest.raises(ValueError):
        pysnipe.pseudo_inverse(g, [1.0] * 9, [True] * 10, 0.5)
    with pytest.raises(ValueError):
        pysnipe.run_experiment([("experiment", "normality"), ("nodes", "10")])


def test_run_experiment(tmp_path):
    out = pysnipe.run_experiment(
        [
            ("experiment", "var_estimator_eval"),
            ("n", "300"),
            ("d_bar_list", "4"),
            ("replications", "10"),
            ("output_dir", str(tmp_path)),
        ]
    )
    assert any(p.endswith("manifest.json") for p in out)
    assert (tmp_path / "var_estimator_eval.csv").exists()
