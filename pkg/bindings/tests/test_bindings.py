import json

import numpy as np
import pytest

import thermorl_bindings as tb
from thermorl import IngestionError, LifecycleError, context_from_dict, env_config_from_dict
from thermorl.env import BuildingEnv


def open_handle(asset_files, seed=0):
    config_path, context_path = asset_files
    return tb.make_env(config_path, context_path, seed)


class TestMakeEnv:
    def test_two_zone_dimensions(self, asset_files):
        handle = open_handle(asset_files)
        assert handle.action_dim == 2
        assert handle.observation_dim == 12
        assert handle.num_objectives == 2
        assert tb.action_dim(handle) == 2
        assert tb.observation_dim(handle) == 12
        assert tb.num_objectives(handle) == 2
        tb.close(handle)

    def test_missing_config_file_allocates_no_handle(self, asset_files, tmp_path):
        _, context_path = asset_files
        before = dict(tb._registry)
        with pytest.raises(IngestionError, match="not found"):
            tb.make_env(tmp_path / "absent.json", context_path, 0)
        assert tb._registry == before

    def test_missing_context_file_allocates_no_handle(self, asset_files, tmp_path):
        config_path, _ = asset_files
        before = dict(tb._registry)
        with pytest.raises(IngestionError, match="not found"):
            tb.make_env(config_path, tmp_path / "absent.json", 0)
        assert tb._registry == before

    def test_native_config_errors_pass_through(self, asset_files, tmp_path):
        _, context_path = asset_files
        bad = tmp_path / "bad_config.json"
        bad.write_text(json.dumps({"no_such_field": 1}))
        with pytest.raises(IngestionError, match="malformed environment config"):
            tb.make_env(bad, context_path, 0)

    def test_handles_do_not_share_state(self, asset_files):
        first = open_handle(asset_files, seed=3)
        second = open_handle(asset_files, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(3):
            tb.step(first, rng.uniform(-1.0, 1.0, size=2))
        fresh = open_handle(asset_files, seed=3)
        probe = np.array([0.25, -0.5])
        obs_second = tb.step(second, probe)[0]
        obs_fresh = tb.step(fresh, probe)[0]
        np.testing.assert_array_equal(obs_second, obs_fresh)
        for handle in (first, second, fresh):
            tb.close(handle)

    def test_handle_ids_are_unique(self, asset_files):
        first = open_handle(asset_files)
        second = open_handle(asset_files)
        assert first.handle_id != second.handle_id
        tb.close(first)
        tb.close(second)


class TestReset:
    def test_returns_observation_vector(self, asset_files):
        handle = open_handle(asset_files)
        obs = tb.reset(handle, 5)
        assert obs.shape == (12,)
        assert np.all(np.isfinite(obs))
        tb.close(handle)

    def test_seeded_and_repeatable(self, asset_files):
        handle = open_handle(asset_files)
        first = tb.reset(handle, 5)
        second = tb.reset(handle, 5)
        other = tb.reset(handle, 6)
        np.testing.assert_array_equal(first, second)
        assert not np.array_equal(first, other)
        tb.close(handle)

    def test_construction_seed_matches_explicit_reset(self, asset_files):
        built = open_handle(asset_files, seed=3)
        reset_after = open_handle(asset_files, seed=9)
        tb.reset(reset_after, 3)
        probe = np.zeros(2)
        np.testing.assert_array_equal(
            tb.step(built, probe)[0], tb.step(reset_after, probe)[0]
        )
        tb.close(built)
        tb.close(reset_after)


class TestStep:
    def test_return_tuple_shape(self, asset_files):
        handle = open_handle(asset_files)
        obs, reward, done, info = tb.step(handle, np.zeros(2))
        assert obs.shape == (12,)
        assert reward.shape == (2,)
        assert done is False
        assert info == {}
        tb.close(handle)

    def test_reward_slot_carries_full_vector(self, asset_files):
        # the reward slot holds every configured objective, untouched
        handle = open_handle(asset_files)
        _, reward, _, info = tb.step(handle, np.array([1.0, -1.0]))
        assert len(reward) == tb.num_objectives(handle)
        assert info == {}
        tb.close(handle)

    def test_done_at_horizon_and_finished_episode_rejected(self, asset_files, tmp_path):
        _, context_path = asset_files
        short = tmp_path / "short_config.json"
        short.write_text(json.dumps({"horizon": 3}))
        handle = tb.make_env(short, context_path, 0)
        flags = [tb.step(handle, np.zeros(2))[2] for _ in range(3)]
        assert flags == [False, False, True]
        with pytest.raises(LifecycleError, match="finished"):
            tb.step(handle, np.zeros(2))
        tb.close(handle)


class TestClose:
    def test_step_after_close(self, asset_files):
        handle = open_handle(asset_files)
        tb.close(handle)
        with pytest.raises(LifecycleError, match="closed"):
            tb.step(handle, np.zeros(2))

    def test_reset_after_close(self, asset_files):
        handle = open_handle(asset_files)
        tb.close(handle)
        with pytest.raises(LifecycleError, match="closed"):
            tb.reset(handle, 0)

    def test_accessors_after_close(self, asset_files):
        handle = open_handle(asset_files)
        tb.close(handle)
        for accessor in (tb.observation_dim, tb.action_dim, tb.num_objectives):
            with pytest.raises(LifecycleError, match="closed"):
                accessor(handle)

    def test_double_close(self, asset_files):
        handle = open_handle(asset_files)
        tb.close(handle)
        with pytest.raises(LifecycleError, match="closed"):
            tb.close(handle)

    def test_closing_one_handle_leaves_others_usable(self, asset_files):
        kept = open_handle(asset_files)
        dropped = open_handle(asset_files)
        tb.close(dropped)
        obs, reward, done, _ = tb.step(kept, np.zeros(2))
        assert obs.shape == (12,) and reward.shape == (2,) and done is False
        tb.close(kept)


@pytest.mark.acceptance("bindings trajectory parity")
def test_trajectory_matches_native_env(asset_files):
    config_path, context_path = asset_files
    handle = tb.make_env(config_path, context_path, 42)

    config = env_config_from_dict(json.loads(config_path.read_text()))
    context = context_from_dict(json.loads(context_path.read_text()))
    native = BuildingEnv(config)

    obs_bound = tb.reset(handle, 1234)
    obs_native = native.reset(context, rng_seed=1234).vector()
    assert np.max(np.abs(obs_bound - obs_native)) <= 1e-12

    rng = np.random.default_rng(99)
    actions = rng.uniform(-1.0, 1.0, size=(100, 2))
    for k, action in enumerate(actions):
        obs_bound, reward_bound, done_bound, info = tb.step(handle, action)
        obs_nat, reward_nat, done_nat = native.step(action)
        assert np.max(np.abs(obs_bound - obs_nat.vector())) <= 1e-12, f"step {k}"
        assert len(reward_bound) == 2
        assert np.array_equal(reward_bound, np.asarray(reward_nat, dtype=float))
        assert done_bound == done_nat
        assert info == {}
    assert done_bound is True
    tb.close(handle)
