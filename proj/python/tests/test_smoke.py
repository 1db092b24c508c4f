import json
import math
import pathlib

import pytest

import pmforecast as pm

GAMES = pathlib.Path(__file__).resolve().parents[2] / "games"


@pytest.fixture(scope="module")
def example():
    return pm.load_game(str(GAMES / "example1_eps05.json"))


def test_game_attributes(example):
    assert example.n_actions == 2
    assert example.n_outcomes == 3
    assert example.outcome_only
    assert not example.deterministic


def test_rho_matches_closed_form(example):
    # At Delta = (1/2, 1/2) the feasible q satisfy q_a + q_b/2 = 1/2.
    assert math.isclose(pm.rho(example, [1.0, 0.0], [0.5, 0.5]), 0.0, abs_tol=1e-9)
    assert math.isclose(pm.rho(example, [0.0, 1.0], [0.5, 0.5]), 0.5, abs_tol=1e-9)
    value, argmax = pm.max_rho(example, [0.5, 0.5])
    assert math.isclose(value, 0.5, abs_tol=1e-9)
    assert len(argmax) == 2


def test_infeasible_delta_raises():
    g = pm.load_game(str(GAMES / "example1_eps01.json"))
    with pytest.raises(pm.InfeasibleSignalError):
        # Outcome-only feedback forces equal components.
        pm.rho(g, [0.5, 0.5], [1.0, 0.0, 0.0, 1.0])


def test_constants(example):
    c = pm.constants(example)
    assert 0.0 < c["K_bound"] <= 1.0
    assert c["L_component"] is not None


def test_episode_reproducible(example):
    a = pm.run_episode(example, "rand-outcome", 500, seed=7)
    b = pm.run_episode(example, "rand-outcome", 500, seed=7)
    assert a["actions"] == b["actions"]
    assert len(a["rewards"]) == 500
    assert a["regret"]["bound"]["total"] > 0.0


def test_parse_game_rejects_bad_rewards():
    text = json.dumps(
        {
            "name": "bad",
            "signals": ["x"],
            "rewards": [[1.5]],
            "feedback": {"type": "deterministic", "outcome_only": True, "table": ["x"]},
        }
    )
    with pytest.raises(pm.ValidationError):
        pm.parse_game(text)


def test_project_hull():
    point, dist = pm.project_hull([2.0, 0.0], [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert math.isclose(point[0], 1.0, abs_tol=1e-9)
    assert math.isclose(dist, 1.0, abs_tol=1e-9)
