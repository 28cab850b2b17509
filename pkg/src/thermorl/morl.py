"""Multi-policy trainer: scalarized initialization plus constrained extension.

The trainer builds a buffer of affine feedback policies in two stages.
Initialization runs a derivative-free optimizer (cross-entropy method) once
per preference vector on a small grid. Extension then takes selected
non-dominated policies and pushes each objective in turn, constrained to
retain a configured fraction of the parent's other objectives, via an
adaptive quadratic penalty.

All stochasticity flows from one master seed through labeled paths, so a
full training run is bitwise reproducible.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .context import ContextSpec, context_from_dict, context_sampler
from .env import BuildingEnv, episode_return, scalarize, validate_preference
from .errors import ConfigurationError, IngestionError, ValidationError
from .metrics import ParetoFront, pareto_filter
from .seeding import derive_rng

logger = logging.getLogger(__name__)


class _DivergenceError(Exception):
    """Raised when an optimizer population produces non-finite returns."""


@dataclass(frozen=True)
class ObsNormalizer:
    """Maps raw observation vectors into [-1, 1] per dimension."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValidationError("normalizer bounds must be equal-length vectors")
        if np.any(hi < lo):
            raise ValidationError("normalizer upper bounds below lower bounds")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        return np.clip(2.0 * (x - self.lo) / safe - 1.0, -1.0, 1.0)


@dataclass(frozen=True)
class Policy:
    """Deterministic affine controller a = clip(W @ normalize(obs) + b)."""

    weights: np.ndarray
    bias: np.ndarray
    normalizer: ObsNormalizer
    policy_id: int = -1
    origin: str = "init"
    preference: tuple[float, ...] | None = None
    target: int | None = None
    parent_id: int | None = None

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        bias = np.asarray(self.bias, dtype=float)
        if weights.ndim != 2 or bias.shape != (weights.shape[0],):
            raise ValidationError(
                f"weights {weights.shape} and bias {bias.shape} are inconsistent"
            )
        if weights.shape[1] != self.normalizer.lo.shape[0]:
            raise ValidationError("weights do not match the normalizer dimension")
        weights.setflags(write=False)
        bias.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def param_count(self) -> int:
        return self.weights.size + self.bias.size

    def act(self, obs_vector: np.ndarray) -> np.ndarray:
        z = self.normalizer.normalize(np.asarray(obs_vector, dtype=float))
        return np.clip(self.weights @ z + self.bias, -1.0, 1.0)

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.weights.ravel(), self.bias])

    def with_params(self, theta: np.ndarray, **meta) -> "Policy":
        """Same shape and normalizer, new parameters and metadata."""
        theta = np.asarray(theta, dtype=float)
        n_act, n_obs = self.weights.shape
        if theta.shape != (n_act * n_obs + n_act,):
            raise ValidationError(
                f"parameter vector length {theta.shape[0]}, "
                f"expected {n_act * n_obs + n_act}"
            )
        return replace(
            self,
            weights=theta[: n_act * n_obs].reshape(n_act, n_obs),
            bias=theta[n_act * n_obs :],
            **meta,
        )


def zero_policy(num_zones: int, normalizer: ObsNormalizer) -> Policy:
    return Policy(
        weights=np.zeros((num_zones, normalizer.lo.shape[0])),
        bias=np.zeros(num_zones),
        normalizer=normalizer,
    )


def rollout(
    env: BuildingEnv,
    policy: Policy,
    context: ContextSpec,
    seed: int,
    record: bool = False,
):
    """One episode under a fixed policy; returns the discounted return vector.

    With record=True also returns (times, temps, actions, rewards) arrays.
    """
    obs = env.reset(context, seed)
    rewards = []
    log = ([], [], [], rewards) if record else None
    done = False
    while not done:
        action = policy.act(obs.vector())
        if record:
            log[0].append(obs.time_index)
            log[1].append(obs.zone_temps)
            log[2].append(action)
        obs, reward, done = env.step(action)
        rewards.append(reward)
    returns = episode_return(np.array(rewards), env.config.gamma)
    if record:
        return returns, (
            np.array(log[0]),
            np.array(log[1]),
            np.array(log[2]),
            np.array(rewards),
        )
    return returns


def evaluate_policy(
    env: BuildingEnv,
    policy: Policy,
    contexts,
    seeds,
    episodes: int = 1,
) -> np.ndarray:
    """Mean discounted return vector over contexts x seeds x episodes."""
    if episodes < 1:
        raise ValidationError("episodes must be >= 1")
    total = None
    count = 0
    for context in contexts:
        for seed in seeds:
            for _ in range(episodes):
                g = rollout(env, policy, context, int(seed))
                total = g if total is None else total + g
                count += 1
    if total is None:
        raise ValidationError("need at least one context and one seed")
    return total / count


def fit_normalizer(
    env: BuildingEnv,
    contexts,
    rng: np.random.Generator,
    episodes_per_context: int = 2,
    pad_frac: float = 0.05,
) -> ObsNormalizer:
    """Observation ranges from uniform-random-action rollouts."""
    vectors = []
    for context in contexts:
        for episode in range(episodes_per_context):
            obs = env.reset(context, int(rng.integers(2**31)))
            done = False
            vectors.append(obs.vector())
            while not done:
                action = rng.uniform(-1.0, 1.0, size=env.num_zones)
                obs, _, done = env.step(action)
                vectors.append(obs.vector())
    stacked = np.array(vectors)
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    pad = pad_frac * (hi - lo) + 1e-6
    return ObsNormalizer(lo=lo - pad, hi=hi + pad)


@dataclass(frozen=True)
class TrainerConfig:
    preference_grid: tuple[tuple[float, ...], ...] = (
        (1.0, 0.0),
        (0.5, 0.5),
        (0.0, 1.0),
    )
    population: int = 16
    elite_frac: float = 0.25
    iterations: int = 30
    init_sigma: float = 0.5
    extension_sigma: float = 0.1
    retention_frac: float = 0.9
    n_extension_rounds: int = 1
    max_selected: int = 6
    max_penalty_rounds: int = 3
    eval_seeds: tuple[int, ...] = (0,)
    eval_episodes: int = 1
    n_eval_contexts: int = 3

    def __post_init__(self):
        if self.population < 4:
            raise ConfigurationError("population must be >= 4")
        if not (0.0 < self.elite_frac < 1.0):
            raise ConfigurationError("elite_frac must lie in (0, 1)")
        if not (0.0 < self.retention_frac < 1.0):
            raise ConfigurationError("retention_frac must lie in (0, 1)")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.n_extension_rounds < 0:
            raise ConfigurationError("n_extension_rounds must be >= 0")
        if self.init_sigma <= 0 or self.extension_sigma <= 0:
            raise ConfigurationError("sigma values must be > 0")
        if self.max_selected < 1 or self.max_penalty_rounds < 1:
            raise ConfigurationError("max_selected and max_penalty_rounds must be >= 1")
        if self.eval_episodes < 1 or not self.eval_seeds:
            raise ConfigurationError("need at least one eval seed and episode")
        if self.n_eval_contexts < 1:
            raise ConfigurationError("n_eval_contexts must be >= 1")
        grid = tuple(tuple(float(w) for w in pref) for pref in self.preference_grid)
        if not grid:
            raise ConfigurationError("preference grid must be non-empty")
        for pref in grid:
            validate_preference(np.array(pref))
        object.__setattr__(self, "preference_grid", grid)
        object.__setattr__(self, "eval_seeds", tuple(int(s) for s in self.eval_seeds))

    @property
    def n_elite(self) -> int:
        return max(1, int(self.population * self.elite_frac))


@dataclass(frozen=True)
class BufferEntry:
    policy: Policy
    returns: np.ndarray

    def __post_init__(self):
        returns = np.asarray(self.returns, dtype=float)
        returns.setflags(write=False)
        object.__setattr__(self, "returns", returns)


class PolicyBuffer:
    """Append-only store of evaluated policies under one fixed protocol."""

    def __init__(self, eval_contexts, eval_seeds, eval_episodes: int):
        self.eval_contexts = tuple(eval_contexts)
        self.eval_seeds = tuple(int(s) for s in eval_seeds)
        self.eval_episodes = int(eval_episodes)
        self._entries: list[BufferEntry] = []

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> tuple[BufferEntry, ...]:
        return tuple(self._entries)

    def append(self, policy: Policy, returns: np.ndarray) -> Policy:
        """Stamp the next id onto the policy and store it."""
        stamped = replace(policy, policy_id=len(self._entries))
        self._entries.append(BufferEntry(policy=stamped, returns=returns))
        return stamped

    def returns_array(self) -> np.ndarray:
        return np.array([e.returns for e in self._entries])

    def front(self) -> ParetoFront:
        return pareto_filter(
            self.returns_array(),
            policy_ids=tuple(e.policy.policy_id for e in self._entries),
        )

    def entry(self, policy_id: int) -> BufferEntry:
        return self._entries[policy_id]


def _crowding_distance(points: np.ndarray) -> np.ndarray:
    k, n = points.shape
    dist = np.zeros(k)
    for j in range(n):
        order = np.argsort(points[:, j], kind="stable")
        column = points[order, j]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = column[-1] - column[0]
        if span > 0:
            for pos in range(1, k - 1):
                if not np.isinf(dist[order[pos]]):
                    dist[order[pos]] += (column[pos + 1] - column[pos - 1]) / span
    return dist


def select_policies(buffer: PolicyBuffer, k: int) -> list[BufferEntry]:
    """Non-dominated entries, thinned to k by crowding distance.

    Boundary points carry infinite distance so they always survive; ties
    break on the lower policy id.
    """
    if len(buffer) == 0:
        raise ValidationError("cannot select from an empty buffer")
    front = buffer.front()
    ids = list(front.policy_ids)
    if len(ids) <= k:
        return [buffer.entry(pid) for pid in sorted(ids)]
    dist = _crowding_distance(front.points)
    ranked = sorted(range(len(ids)), key=lambda i: (-dist[i], ids[i]))
    chosen = sorted(ids[i] for i in ranked[:k])
    return [buffer.entry(pid) for pid in chosen]


def constrained_objective(
    returns: np.ndarray,
    target: int,
    parent_returns: np.ndarray,
    retention_frac: float,
    penalty: float,
) -> float:
    """Target objective minus a quadratic penalty on retention shortfalls."""
    returns = np.asarray(returns, dtype=float)
    parent_returns = np.asarray(parent_returns, dtype=float)
    shortfall = np.maximum(0.0, retention_frac * parent_returns - returns)
    shortfall[target] = 0.0
    return float(returns[target] - penalty * np.sum(shortfall**2))


def _cem_maximize(objective, theta0, sigma0, config: TrainerConfig,
                  rng: np.random.Generator, on_iteration=None):
    """Cross-entropy method with best-so-far elitism.

    objective(theta) -> scalar. Raises _DivergenceError on non-finite
    population values. on_iteration(best_theta_of_iter) fires once per
    iteration with the iteration's best candidate.
    """
    dim = theta0.shape[0]
    mean = theta0.astype(float).copy()
    sigma = np.full(dim, float(sigma0))
    best_theta = theta0.copy()
    best_value = objective(theta0)
    if not np.isfinite(best_value):
        raise _DivergenceError("starting point produced a non-finite objective")
    for _ in range(config.iterations):
        population = mean + sigma * rng.standard_normal((config.population, dim))
        values = np.array([objective(theta) for theta in population])
        if not np.all(np.isfinite(values)):
            raise _DivergenceError("population produced non-finite objectives")
        elite_idx = np.argsort(values, kind="stable")[-config.n_elite :]
        elite = population[elite_idx]
        mean = elite.mean(axis=0)
        sigma = np.maximum(elite.std(axis=0), 1e-3)
        iter_best = int(elite_idx[-1])
        if values[iter_best] > best_value:
            best_value = float(values[iter_best])
            best_theta = population[iter_best].copy()
        if on_iteration is not None:
            on_iteration(population[iter_best])
    return best_theta, best_value


class Trainer:
    """Coordinates initialization, selection, and extension on one buffer."""

    def __init__(
        self,
        config: TrainerConfig,
        env_factory,
        base_context: ContextSpec,
        mode: str = "static",
        master_seed: int = 0,
        climates: tuple[str, ...] | None = None,
    ):
        if mode not in ("static", "dynamic"):
            raise ValidationError(f"mode must be 'static' or 'dynamic', got {mode!r}")
        self.config = config
        self.env = env_factory()
        self.base_context = base_context
        self.mode = mode
        self.master_seed = int(master_seed)
        self.climates = climates
        self.n_objectives = self.env.config.num_objectives
        for pref in config.preference_grid:
            if len(pref) != self.n_objectives:
                raise ConfigurationError(
                    f"preference {pref} does not match {self.n_objectives} objectives"
                )
        self.eval_contexts = self._make_eval_contexts()
        self.buffer = PolicyBuffer(
            self.eval_contexts, config.eval_seeds, config.eval_episodes
        )
        norm_rng = derive_rng(self.master_seed, "normalizer")
        self.normalizer = fit_normalizer(self.env, self.eval_contexts, norm_rng)
        self._template = zero_policy(self._num_zones(), self.normalizer)

    def _num_zones(self) -> int:
        self.env.reset(self.base_context, 0)
        return self.env.num_zones

    def _make_eval_contexts(self) -> tuple[ContextSpec, ...]:
        if self.mode == "static":
            return (self.base_context,)
        sampler = context_sampler(
            "dynamic",
            self.base_context,
            derive_rng(self.master_seed, "eval-contexts"),
            climates=self.climates,
        )
        return tuple(next(sampler) for _ in range(self.config.n_eval_contexts))

    def _train_contexts(self, sampler) -> tuple[ContextSpec, ...]:
        """Contexts used inside one optimizer iteration (common for the
        whole population, so candidates face identical conditions)."""
        if self.mode == "static":
            return (self.base_context,)
        return tuple(next(sampler) for _ in range(self.config.n_eval_contexts))

    def _canonical_eval(self, policy: Policy) -> np.ndarray:
        return evaluate_policy(
            self.env,
            policy,
            self.buffer.eval_contexts,
            self.buffer.eval_seeds,
            self.buffer.eval_episodes,
        )

    def _stage_returns(self, policy: Policy, contexts) -> np.ndarray:
        return evaluate_policy(
            self.env, policy, contexts, self.config.eval_seeds,
            self.config.eval_episodes,
        )

    def pareto_initialization(self) -> PolicyBuffer:
        """One optimizer run per preference vector; iteration bests and the
        final best of every run are evaluated and stored."""
        theta_dim = self._template.param_count
        for p_idx, pref in enumerate(self.config.preference_grid):
            pref_arr = np.array(pref)
            rng = derive_rng(self.master_seed, "init", p_idx)
            sampler = context_sampler(
                "dynamic",
                self.base_context,
                derive_rng(self.master_seed, "init-contexts", p_idx),
                climates=self.climates,
            )
            contexts_box = {"current": (self.base_context,)}

            def objective(theta):
                policy = self._template.with_params(theta)
                g = self._stage_returns(policy, contexts_box["current"])
                return scalarize(pref_arr, g)

            iteration_bests: list[np.ndarray] = []

            def remember(theta):
                iteration_bests.append(theta.copy())

            try:
                best_theta, _ = self._run_cem_with_refresh(
                    objective, np.zeros(theta_dim), self.config.init_sigma,
                    rng, contexts_box, sampler, remember,
                )
            except _DivergenceError as exc:
                logger.warning("initialization for preference %s aborted: %s",
                               pref, exc)
                continue
            for theta in iteration_bests:
                self._append_evaluated(theta, origin="init", preference=pref)
            self._append_evaluated(best_theta, origin="init", preference=pref)
        if len(self.buffer) == 0:
            raise ValidationError("every initialization run diverged")
        return self.buffer

    def _run_cem_with_refresh(self, objective, theta0, sigma0, rng,
                              contexts_box, sampler, on_iteration):
        def wrapped_on_iteration(theta):
            on_iteration(theta)
            contexts_box["current"] = self._train_contexts(sampler)

        contexts_box["current"] = self._train_contexts(sampler)
        return _cem_maximize(objective, theta0, sigma0, self.config, rng,
                             on_iteration=wrapped_on_iteration)

    def _append_evaluated(self, theta: np.ndarray, **meta) -> Policy:
        policy = self._template.with_params(theta, **meta)
        returns = self._canonical_eval(policy)
        return self.buffer.append(policy, returns)

    def pareto_extension(self, selected: list[BufferEntry]) -> PolicyBuffer:
        """Push each objective of each selected policy, keeping the rest
        above the retention fraction of the parent's values."""
        if not selected:
            raise ValidationError("extension needs at least one selected policy")
        tol = 1e-6
        for entry in selected:
            parent = entry.policy
            parent_g = entry.returns
            for target in range(self.n_objectives):
                rng = derive_rng(
                    self.master_seed, "extend", parent.policy_id, target
                )
                sampler = context_sampler(
                    "dynamic",
                    self.base_context,
                    derive_rng(self.master_seed, "extend-contexts",
                               parent.policy_id, target),
                    climates=self.climates,
                )
                contexts_box = {"current": (self.base_context,)}
                accepted = False
                penalty = 1.0
                for _ in range(self.config.max_penalty_rounds):

                    def objective(theta):
                        policy = self._template.with_params(theta)
                        g = self._stage_returns(policy, contexts_box["current"])
                        return constrained_objective(
                            g, target, parent_g,
                            self.config.retention_frac, penalty,
                        )

                    try:
                        best_theta, _ = self._run_cem_with_refresh(
                            objective, parent.to_flat(),
                            self.config.extension_sigma, rng, contexts_box,
                            sampler, lambda theta: None,
                        )
                    except _DivergenceError as exc:
                        logger.warning(
                            "extension of policy %d toward objective %d "
                            "aborted: %s", parent.policy_id, target, exc)
                        break
                    candidate = self._template.with_params(best_theta)
                    g = self._canonical_eval(candidate)
                    if self._meets_constraints(g, parent_g, target, tol):
                        self._append_evaluated(
                            best_theta, origin="extension", target=target,
                            parent_id=parent.policy_id,
                        )
                        accepted = True
                        break
                    penalty *= 2.0
                if not accepted:
                    logger.warning(
                        "extension of policy %d toward objective %d discarded "
                        "after %d penalty rounds", parent.policy_id, target,
                        self.config.max_penalty_rounds)
        return self.buffer

    def _meets_constraints(self, g, parent_g, target, tol) -> bool:
        for i in range(self.n_objectives):
            if i == target:
                continue
            floor = self.config.retention_frac * parent_g[i]
            if g[i] < floor - tol * abs(parent_g[i]):
                return False
        return True

    def train(self) -> tuple[PolicyBuffer, ParetoFront]:
        self.pareto_initialization()
        for _ in range(self.config.n_extension_rounds):
            selected = select_policies(self.buffer, self.config.max_selected)
            self.pareto_extension(selected)
        return self.buffer, self.buffer.front()


def train(
    config: TrainerConfig,
    env_factory,
    mode: str,
    base_context: ContextSpec,
    master_seed: int = 0,
    climates: tuple[str, ...] | None = None,
) -> tuple[PolicyBuffer, ParetoFront]:
    trainer = Trainer(config, env_factory, base_context, mode=mode,
                      master_seed=master_seed, climates=climates)
    return trainer.train()


def save_checkpoint(buffer: PolicyBuffer, path: str | Path) -> None:
    """Buffer as JSON: protocol, then one record per entry."""
    payload = {
        "eval_protocol": {
            "contexts": [c.to_dict() for c in buffer.eval_contexts],
            "seeds": list(buffer.eval_seeds),
            "episodes": buffer.eval_episodes,
        },
        "entries": [
            {
                "policy_id": e.policy.policy_id,
                "origin": e.policy.origin,
                "preference": list(e.policy.preference) if e.policy.preference else None,
                "target": e.policy.target,
                "parent_id": e.policy.parent_id,
                "weights": [[float(x) for x in row] for row in e.policy.weights],
                "bias": [float(x) for x in e.policy.bias],
                "normalizer": {
                    "lo": [float(x) for x in e.policy.normalizer.lo],
                    "hi": [float(x) for x in e.policy.normalizer.hi],
                },
                "returns": [float(x) for x in e.returns],
            }
            for e in buffer.entries
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_checkpoint(path: str | Path) -> PolicyBuffer:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise IngestionError(f"checkpoint file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestionError(
            f"checkpoint file {path} is not valid JSON: {exc}"
        ) from exc
    try:
        protocol = data["eval_protocol"]
        entries = data["entries"]
    except (KeyError, TypeError) as exc:
        raise IngestionError(f"malformed checkpoint {path}: {exc}") from exc
    buffer = PolicyBuffer(
        eval_contexts=tuple(
            context_from_dict(c) for c in protocol["contexts"]
        ),
        eval_seeds=tuple(protocol["seeds"]),
        eval_episodes=int(protocol["episodes"]),
    )
    for record in entries:
        normalizer = ObsNormalizer(
            lo=np.array(record["normalizer"]["lo"]),
            hi=np.array(record["normalizer"]["hi"]),
        )
        policy = Policy(
            weights=np.array(record["weights"]),
            bias=np.array(record["bias"]),
            normalizer=normalizer,
            origin=record["origin"],
            preference=tuple(record["preference"]) if record["preference"] else None,
            target=record["target"],
            parent_id=record["parent_id"],
        )
        buffer.append(policy, np.array(record["returns"]))
    return buffer
