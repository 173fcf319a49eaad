import json
import math
import random

import pytest

from evasion_kit.scenario import (
    BUILTIN_NAMES,
    Scenario,
    ScenarioError,
    SensorTrack,
    builtin_scenario,
    canonical_json,
    load_scenario,
    positions_at,
    random_interval_scenario,
    save_scenario,
    scenario_from_document,
    scenario_to_document,
    sensor_position,
    validate_scenario,
)


def _plain(dimension=2, time_base="interval", tracks=()):
    return Scenario(
        dimension=dimension,
        center=(0.0,) * dimension,
        radius=1.0,
        sensing_radius=0.2,
        fence_width=0.1,
        time_base=time_base,
        tracks=tuple(tracks),
    )


def _track(*waypoints):
    return SensorTrack(tuple((t, tuple(p)) for t, p in waypoints))


def test_builtin_names():
    assert BUILTIN_NAMES == ("split", "close", "annuli", "empty", "full", "random")
    for name in BUILTIN_NAMES:
        s = builtin_scenario(name, seed=3)
        assert s.dimension == 2
        assert s.time_base == "interval"


def test_builtin_unknown_name():
    with pytest.raises(ScenarioError):
        builtin_scenario("nonesuch")


def test_builtin_is_pure():
    for name in BUILTIN_NAMES:
        a = canonical_json(scenario_to_document(builtin_scenario(name, seed=7)))
        b = canonical_json(scenario_to_document(builtin_scenario(name, seed=7)))
        assert a == b


def test_random_seeds_differ():
    docs = {canonical_json(scenario_to_document(builtin_scenario("random", seed=k)))
            for k in range(6)}
    assert len(docs) == 6


def test_document_round_trip():
    for name in BUILTIN_NAMES:
        s = builtin_scenario(name, seed=5)
        doc = scenario_to_document(s)
        again = scenario_to_document(scenario_from_document(doc))
        assert doc == again


def test_document_rejects_garbage():
    with pytest.raises(ScenarioError):
        scenario_from_document([1, 2, 3])
    doc = scenario_to_document(builtin_scenario("split"))
    del doc["tracks"]
    with pytest.raises(ScenarioError):
        scenario_from_document(doc)


def test_canonical_json_is_sorted_and_stable():
    text = canonical_json({"b": 1, "a": [2, 3]})
    assert text.index('"a"') < text.index('"b"')
    assert text == canonical_json(json.loads(text))


def test_save_and_load(tmp_path):
    s = builtin_scenario("annuli")
    path = tmp_path / "scene.json"
    save_scenario(s, str(path))
    loaded = load_scenario(str(path))
    assert scenario_to_document(loaded) == scenario_to_document(s)
    loaded_text = load_scenario(path.read_text(), is_text=True)
    assert scenario_to_document(loaded_text) == scenario_to_document(s)


def test_validate_rejects_bad_scenarios():
    ok = _track((0.0, (0.0, 0.0)), (1.0, (0.5, 0.0)))
    with pytest.raises(ScenarioError):
        validate_scenario(_plain(dimension=3))
    with pytest.raises(ScenarioError):
        validate_scenario(_plain(tracks=[_track((0.0, (0.0, 0.0)),)]))
    with pytest.raises(ScenarioError):
        validate_scenario(_plain(tracks=[_track((0.2, (0.0, 0.0)), (1.0, (0.0, 0.0)))]))
    with pytest.raises(ScenarioError):
        validate_scenario(_plain(tracks=[_track((0.0, (0.0, 0.0)), (1.0, (2.0, 0.0)))]))
    with pytest.raises(ScenarioError):
        validate_scenario(_plain(time_base="circle", tracks=[ok]))
    assert validate_scenario(_plain(tracks=[ok])) is not None


def test_positions_interpolate_linearly():
    s = validate_scenario(_plain(tracks=[
        _track((0.0, (0.0, 0.0)), (0.5, (0.4, 0.0)), (1.0, (0.4, 0.4))),
    ]))
    assert sensor_position(s, 0, 0.25) == pytest.approx((0.2, 0.0))
    assert sensor_position(s, 0, 0.75) == pytest.approx((0.4, 0.2))
    # interval bases clamp queries outside the span
    assert sensor_position(s, 0, -1.0) == pytest.approx((0.0, 0.0))
    assert sensor_position(s, 0, 2.0) == pytest.approx((0.4, 0.4))


def test_positions_wrap_on_circle():
    s = validate_scenario(_plain(time_base="circle", tracks=[
        _track((0.0, (0.0, 0.0)), (0.5, (0.4, 0.0)), (1.0, (0.0, 0.0))),
    ]))
    assert sensor_position(s, 0, 1.25) == pytest.approx(sensor_position(s, 0, 0.25))
    assert sensor_position(s, 0, -0.25) == pytest.approx(sensor_position(s, 0, 0.75))


def test_positions_at_shape():
    s = builtin_scenario("split")
    out = positions_at(s, [0.0, 0.5, 1.0])
    assert out.shape == (len(s.tracks), 3, 2)


def test_random_scenario_geometry():
    # no sensor may leave the domain disk at any waypoint
    for seed in range(10):
        s = builtin_scenario("random", seed=seed)
        for track in s.tracks:
            for _, p in track.waypoints:
                assert math.hypot(*p) <= s.radius + 1e-12
        assert s.sensing_radius == pytest.approx(0.16)


def test_random_interval_scenario_is_pure_and_1d():
    rng = random.Random(0)
    for seed in [rng.randrange(1000) for _ in range(5)]:
        a = random_interval_scenario(seed)
        b = random_interval_scenario(seed)
        assert a.dimension == 1
        assert scenario_to_document(a) == scenario_to_document(b)
        for track in a.tracks:
            for _, p in track.waypoints:
                assert abs(p[0]) <= a.radius
