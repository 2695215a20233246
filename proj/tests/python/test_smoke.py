import json
import math

import pytest

import hrlkit


def small_config(mode, seed=1):
    cfg = hrlkit.default_config("BM", mode, seed)
    cfg["sample_limit"] = 2000
    cfg["ppo"]["hidden"] = [8]
    cfg["eval_episodes"] = 3
    return cfg


def test_default_config_matches_documented_values():
    cfg = hrlkit.default_config("BM", "curriculum", 7)
    assert cfg["seed"] == 7
    assert cfg["ppo"]["learning_rate"] == 0.0007
    assert cfg["ppo"]["trajectory_length"] == 40
    assert cfg["dqn"]["batch_size"] == 32
    assert cfg["curriculum"]["thresholds"] == [7, 7, 7, 2]
    assert cfg["eval_episodes"] == 30
    cmag = hrlkit.default_config("CMAG", "curriculum", 0)
    assert cmag["curriculum"]["thresholds"] == [300, 5, 5, 5, 500]


def test_invalid_config_raises():
    cfg = hrlkit.default_config("BM", "flat", 1)
    cfg["ppo"]["learning_rate"] = -1.0
    with pytest.raises(ValueError):
        hrlkit.validate_config(cfg)
    with pytest.raises(hrlkit.ValidationError):
        hrlkit.validate_config({"task": "BM"})


def test_train_evaluate_roundtrip(tmp_path):
    report, ckpt = hrlkit.train(small_config("curriculum"), tmp_path / "run")
    assert report["total_samples"] <= 2000
    assert (tmp_path / "run" / "report.json").exists()
    ev = hrlkit.evaluate(ckpt, episodes=3)
    assert ev["episodes"] == 3
    assert ev["mean_reward"] == pytest.approx(sum(ev["rewards"]) / 3)
    assert ev["mean_reward"] == report["final_eval"]["mean_reward"]


def test_training_is_deterministic():
    a, _ = hrlkit.train(small_config("flat", 4))
    b, _ = hrlkit.train(small_config("flat", 4))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_compare_rows():
    cur, _ = hrlkit.train(small_config("curriculum", 2))
    flat, _ = hrlkit.train(small_config("flat", 2))
    summary = hrlkit.compare([cur], [flat])
    row = summary["rows"][0]
    assert row["delta_mean"] == pytest.approx(row["curriculum_mean"] - row["flat_mean"])


def test_gridnav_qstar_matches_closed_form():
    states, q, v = hrlkit.gridnav_qstar(4, 0.9)
    assert len(states) == 16
    start = states.index([0.0, 0.0])
    # Six moves to the corner, -1 for each of the first five.
    expected = -sum(0.9**i for i in range(5))
    assert v[start] == pytest.approx(expected, abs=1e-7)
    assert all(math.isclose(v[s], max(q[s]), abs_tol=1e-12) for s in range(len(states)))


def test_minibuild_random_episode_keeps_invariants():
    env = hrlkit.MiniBuild("CollectAll", horizon=50, seed=3)
    env.reset()
    total, done, steps = 0.0, False, 0
    while not done:
        state, reward, terminal, truncated = env.step(steps % env.action_count)
        env.check_invariants()
        total += reward
        steps += 1
        done = terminal or truncated
    assert steps == 50
    assert total >= 0
    with pytest.raises(ValueError):
        env.step(99)


def test_outputs_match_schemas(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    from pathlib import Path

    root = Path(__file__).resolve().parents[2] / "schemas"
    load = lambda name: json.loads((root / name).read_text())
    referencing = pytest.importorskip("referencing")
    eval_schema = load("eval.schema.json")
    registry = referencing.Registry().with_resource(
        "eval.schema.json", referencing.Resource.from_contents(eval_schema)
    )

    for task in ("BM", "CMAG", "GridNav"):
        for mode in ("curriculum", "flat"):
            jsonschema.validate(hrlkit.default_config(task, mode, 1), load("config.schema.json"))
    for path in sorted((root.parent / "configs").glob("*.json")):
        jsonschema.validate(json.loads(path.read_text()), load("config.schema.json"))

    for mode in ("curriculum", "flat"):
        report, ckpt = hrlkit.train(small_config(mode))
        jsonschema.Draft202012Validator(load("report.schema.json"), registry=registry).validate(report)
        jsonschema.validate(hrlkit.evaluate(ckpt, episodes=2), eval_schema)
