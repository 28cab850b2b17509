"""Handle-based surface over the thermorl environment.

External RL agents talk to the environment through opaque handles:
``make_env`` builds one native instance per handle, ``reset``/``step``
delegate to it unchanged, ``close`` tears it down. The step return is
the standard episodic 4-tuple (observation, reward, done, info) with
the full reward vector in the reward slot; rewards are never
scalarized at this boundary and nothing is smuggled through info.

A handle must be used from one thread at a time. Distinct handles are
fully independent, including two handles built from the same files.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from thermorl import (
    IngestionError,
    LifecycleError,
    context_from_dict,
    env_config_from_dict,
)
from thermorl.env import BuildingEnv

__version__ = "0.1.0"

__all__ = [
    "EnvHandle",
    "action_dim",
    "close",
    "make_env",
    "num_objectives",
    "observation_dim",
    "reset",
    "step",
]


@dataclass(frozen=True)
class EnvHandle:
    """Opaque ticket for one native environment instance.

    Dimensions are cached at construction; the instance itself lives in
    a module registry keyed by handle_id and is destroyed by close().
    """

    handle_id: int
    observation_dim: int
    action_dim: int
    num_objectives: int


class _Instance:
    __slots__ = ("env", "context")

    def __init__(self, env, context):
        self.env = env
        self.context = context


# registry guards creation/close only; per-handle calls are not locked
_registry: dict[int, _Instance] = {}
_registry_lock = threading.Lock()
_next_id = itertools.count(1)


def _read_json(path, kind: str):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise IngestionError(f"{kind} file not found: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{kind} file {path} is not valid JSON: {exc}") from exc


def _instance(handle: EnvHandle) -> _Instance:
    # closed handles reject every call, accessors included
    with _registry_lock:
        instance = _registry.get(handle.handle_id)
    if instance is None:
        raise LifecycleError(
            f"handle {handle.handle_id} is closed or was never opened"
        )
    return instance


def make_env(config_path, context_path, seed: int) -> EnvHandle:
    """Build one environment instance and return its handle.

    config_path holds an environment-config JSON object, context_path a
    single context object (transmittances, climate_id, layout_id).
    The instance comes up already reset with the given seed; native
    validation errors (bad config, unknown assets, unstable substep)
    propagate unchanged, and no handle is allocated on failure.
    """
    config = env_config_from_dict(_read_json(config_path, "environment config"))
    context = context_from_dict(_read_json(context_path, "context"))
    env = BuildingEnv(config)
    env.reset(context, rng_seed=seed)
    handle = EnvHandle(
        handle_id=next(_next_id),
        observation_dim=env.obs_dim,
        action_dim=env.num_zones,
        num_objectives=env.num_objectives,
    )
    with _registry_lock:
        _registry[handle.handle_id] = _Instance(env, context)
    return handle


def reset(handle: EnvHandle, seed: int) -> np.ndarray:
    """Start a fresh episode; returns the observation vector."""
    instance = _instance(handle)
    return instance.env.reset(instance.context, rng_seed=seed).vector()


def step(handle: EnvHandle, action) -> tuple[np.ndarray, np.ndarray, bool, dict]:
    """Advance one control step.

    Returns (observation vector, reward vector, done, info). The reward
    slot carries all configured objectives as an n-array.
    """
    instance = _instance(handle)
    obs, reward, done = instance.env.step(action)
    return obs.vector(), np.asarray(reward, dtype=float), bool(done), {}


def close(handle: EnvHandle) -> None:
    """Destroy the handle's instance; every later call on it raises."""
    with _registry_lock:
        instance = _registry.pop(handle.handle_id, None)
    if instance is None:
        raise LifecycleError(
            f"handle {handle.handle_id} is closed or was never opened"
        )


def observation_dim(handle: EnvHandle) -> int:
    _instance(handle)
    return handle.observation_dim


def action_dim(handle: EnvHandle) -> int:
    _instance(handle)
    return handle.action_dim


def num_objectives(handle: EnvHandle) -> int:
    _instance(handle)
    return handle.num_objectives
