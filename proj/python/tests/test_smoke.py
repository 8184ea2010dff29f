import math
import os
from pathlib import Path

import numpy as np
import pytest

import gridtopo

DATA = Path(os.environ.get("GRIDTOPO_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture(scope="module")
def case8():
    return gridtopo.load(DATA / "case8_18.json")


def triangle(b=1.0):
    edges = [gridtopo.Edge(0, 1, b), gridtopo.Edge(1, 2, b), gridtopo.Edge(0, 2, b)]
    return gridtopo.Network([1.0, 1.0, 1.0], 1.0, edges)


def test_triangle_consensus_values():
    net = triangle()
    ev = gridtopo.evaluate(net, [0, 1, 2])
    assert ev["cost"] == pytest.approx(2.0, rel=1e-13)
    assert ev["h2_squared"] == pytest.approx(1.0, rel=1e-13)
    assert gridtopo.evaluate(net, [0, 1])["cost"] == pytest.approx(4.0, rel=1e-13)


def test_verify_matches_closed_form():
    report = gridtopo.verify(triangle(2.0), [0, 1, 2])
    assert report["passed"]
    assert report["h2_gramian"] == pytest.approx(report["h2_closed_form"], rel=1e-9)
    q = report["gramian"]
    assert q.shape == (6, 6)
    assert np.allclose(q, q.T)


def test_load_and_round_trip(case8):
    assert case8.network.node_count == 8
    assert case8.network.edge_count == 18
    assert case8.generator_seed == 8
    again = gridtopo.loads(case8.dumps())
    assert again.dumps() == case8.dumps()


def test_generate_matches_committed_case(case8):
    base = gridtopo.load(DATA / "case8_base.json")
    assert gridtopo.generate_case(base, 10, 8).dumps() == case8.dumps()


def test_design_pipeline(case8):
    net = case8.network
    tree = gridtopo.design_tree(net)
    best = gridtopo.brute_tree(net)
    assert len(tree["edges"]) == 7
    assert best["cost"] <= tree["cost"] <= 2.0 * best["cost"]
    assert tree["cost"] <= tree["gap_bound"] * best["cost"]

    mesh = gridtopo.design_mesh(net, 10)
    costs = [tree["cost"]] + [c for _, c in mesh["trace"]]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    optimal = gridtopo.brute_mesh(net, 10, seed_tree=tree["edges"])
    assert optimal["cost"] <= mesh["cost"] * (1 + 1e-12)


def test_costs_and_errors(case8):
    net = case8.network
    ranked = gridtopo.CostSpec("ranked_consensus", ranks=[1.0] * 4 + [2.0] * 4)
    assert gridtopo.gap_bound(net) == pytest.approx(1.75)
    assert gridtopo.evaluate(net, gridtopo.design_tree(net, ranked)["edges"], ranked)["cost"] > 0
    w = np.ones((8, 8)) - np.eye(8)
    custom = gridtopo.CostSpec("custom", weights=w)
    tree = gridtopo.design_tree(net)["edges"]
    assert gridtopo.evaluate(net, tree, custom)["cost"] == pytest.approx(
        gridtopo.evaluate(net, tree)["cost"], rel=1e-12)

    with pytest.raises(gridtopo.GridTopoError, match="infeasible"):
        gridtopo.gap_bound(net, gridtopo.CostSpec("frequency"))
    with pytest.raises(gridtopo.GridTopoError, match="disconnected"):
        gridtopo.evaluate(net, [0, 1])
    with pytest.raises(gridtopo.GridTopoError):
        gridtopo.loads("{")


def test_simulation_tracks_closed_form():
    f = gridtopo.load(DATA / "fixture5.json")
    edges = list(range(f.network.edge_count))
    mean, se = gridtopo.simulate(f.network, edges, horizon=500.0, seed=3)
    target = gridtopo.evaluate(f.network, edges)["h2_squared"]
    assert math.isfinite(se) and se > 0
    assert abs(mean - target) < 5 * se + 0.1 * target


def test_gap_table_csv(case8):
    csv = gridtopo.gap_table(case8.network, [7, 8])
    lines = csv.strip().splitlines()
    assert lines[1].startswith("cost_kind,k,method")
    assert len(lines) == 2 + 10
