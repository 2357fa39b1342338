"""Structural causal model simulators and interventional datasets.

Three mechanism families are supported: linear, random-Fourier-feature
(smooth nonlinear) and one-hidden-layer neural networks. Data generation is
fully determined by the passed RNG; every node draws its noise from its own
spawned substream, so intervening on one variable leaves the sampled values
of its non-descendants bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateColumnError, InvariantError
from .graph import Dag, topological_order

__all__ = [
    "LinearMechanism",
    "RffMechanism",
    "NnMechanism",
    "NoiseSpec",
    "ScmInstance",
    "InterventionalDataset",
    "sample_scm",
    "simulate",
    "generate_dataset",
    "standardize",
    "sample_intervention_targets",
    "select_targets_by_policy",
]

DOMAINS = ("linear", "rff", "nn")
NOISE_KINDS = ("gaussian", "heteroscedastic", "laplace")

RFF_FEATURES = 100
HIDDEN_UNITS = 10


def _signed_uniform(lo: float, hi: float, size, rng: np.random.Generator):
    sign = rng.choice([-1.0, 1.0], size=size)
    return sign * rng.uniform(lo, hi, size=size)


@dataclass(frozen=True)
class LinearMechanism:
    weights: np.ndarray
    bias: float

    def __call__(self, parents: np.ndarray) -> np.ndarray:
        return parents @ self.weights + self.bias


@dataclass(frozen=True)
class RffMechanism:
    """Random-feature approximation of a Gaussian-process draw."""

    alpha: np.ndarray  # (M,)
    omega: np.ndarray  # (M, p)
    delta: np.ndarray  # (M,)
    length_scale: float
    out_scale: float
    bias: float

    def __call__(self, parents: np.ndarray) -> np.ndarray:
        m = self.alpha.size
        phases = parents @ self.omega.T / self.length_scale + self.delta
        return self.bias + self.out_scale * np.sqrt(2.0 / m) * (np.cos(phases) @ self.alpha)


@dataclass(frozen=True)
class NnMechanism:
    """One-hidden-layer ReLU network giving the conditional mean."""

    w1: np.ndarray  # (H, p)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (H,)
    b2: float

    def __call__(self, parents: np.ndarray) -> np.ndarray:
        hidden = np.maximum(parents @ self.w1.T + self.b1, 0.0)
        return hidden @ self.w2 + self.b2


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise for one node: constant-scale Gaussian or Laplace, or
    Gaussian with a parent-dependent softplus scale."""

    kind: str
    scale: float = 1.0
    scale_fn: RffMechanism | None = None

    def sample(self, parents: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian":
            return self.scale * rng.standard_normal(n)
        if self.kind == "laplace":
            return rng.laplace(0.0, self.scale, n)
        if self.kind == "heteroscedastic":
            # softplus keeps the scale strictly positive everywhere
            scale = np.logaddexp(0.0, self.scale_fn(parents))
            return scale * rng.standard_normal(n)
        raise ValueError(f"unknown noise kind {self.kind!r}")


@dataclass(frozen=True)
class ScmInstance:
    """A sampled SCM: graph, per-node mechanisms and per-node noise."""

    dag: Dag
    domain: str
    mechanisms: tuple
    noises: tuple[NoiseSpec, ...]
    noise_scale: float = 1.0

    @property
    def d(self) -> int:
        return self.dag.d

    def config(self) -> dict:
        """Echo of the sampling scheme, for dataset metadata."""
        return {
            "domain": self.domain,
            "noise_kinds": [n.kind for n in self.noises],
            "noise_scale": self.noise_scale,
            "rff_features": RFF_FEATURES,
            "hidden_units": HIDDEN_UNITS,
            "nn_weight_init": "normal(0, 1/sqrt(fan_in)), biases normal(0, 1)",
        }


def _sample_rff(p: int, length_scale, out_scale, bias, rng: np.random.Generator) -> RffMechanism:
    return RffMechanism(
        alpha=rng.standard_normal(RFF_FEATURES),
        omega=rng.standard_normal((RFF_FEATURES, p)),
        delta=rng.uniform(0.0, 2.0 * np.pi, RFF_FEATURES),
        length_scale=float(length_scale),
        out_scale=float(out_scale),
        bias=float(bias),
    )


def sample_scm(
    dag: Dag,
    domain: str,
    rng: np.random.Generator,
    noise_policy: str = "mixed",
    noise_scale: float = 1.0,
) -> ScmInstance:
    """Draw mechanism and noise parameters for every node.

    Parameters
    ----------
    domain : {"linear", "rff", "nn"}
        Mechanism family. Linear weights are signed-uniform on [1, 3] with
        bias uniform on [-3, 3]. RFF mechanisms use 100 features, length
        scale uniform on [7, 10], output scale uniform on [10, 20] and the
        same bias law. NN mechanisms have 10 ReLU hidden units and force
        unit-variance Gaussian noise.
    noise_policy : {"mixed", "gaussian", "heteroscedastic", "laplace"}
        "mixed" picks one of the three families per node uniformly at
        random (linear/rff only). The heteroscedastic scale is the softplus
        of an independent RFF function with length scale 10, output scale 2.
    noise_scale : float
        Scale of the constant-scale Gaussian/Laplace noise.
    """
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")
    if noise_policy != "mixed" and noise_policy not in NOISE_KINDS:
        raise ValueError(f"unknown noise policy {noise_policy!r}")
    mechanisms = []
    noises = []
    for j in range(dag.d):
        p = len(dag.parents(j))
        if domain == "linear":
            mech = LinearMechanism(
                weights=_signed_uniform(1.0, 3.0, p, rng),
                bias=float(rng.uniform(-3.0, 3.0)),
            )
        elif domain == "rff":
            mech = _sample_rff(
                p,
                length_scale=rng.uniform(7.0, 10.0),
                out_scale=rng.uniform(10.0, 20.0),
                bias=rng.uniform(-3.0, 3.0),
                rng=rng,
            )
        else:
            w1 = rng.standard_normal((HIDDEN_UNITS, p)) / np.sqrt(max(p, 1))
            mech = NnMechanism(
                w1=w1,
                b1=rng.standard_normal(HIDDEN_UNITS),
                w2=rng.standard_normal(HIDDEN_UNITS) / np.sqrt(HIDDEN_UNITS),
                b2=float(rng.standard_normal()),
            )
        mechanisms.append(mech)

        if domain == "nn":
            noises.append(NoiseSpec("gaussian", 1.0))
            continue
        kind = noise_policy if noise_policy != "mixed" else NOISE_KINDS[rng.integers(3)]
        if kind == "heteroscedastic":
            scale_fn = _sample_rff(p, length_scale=10.0, out_scale=2.0, bias=0.0, rng=rng)
            noises.append(NoiseSpec(kind, scale_fn=scale_fn))
        else:
            noises.append(NoiseSpec(kind, noise_scale))
    return ScmInstance(dag, domain, tuple(mechanisms), tuple(noises), noise_scale)


def simulate(
    scm: ScmInstance,
    n: int,
    intervention: int | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Draw ``n`` joint samples, optionally under a single-node intervention.

    Nodes are evaluated in topological order; each node's noise comes from
    its own substream of ``rng``. Interventions replace the target's
    assignment: linear/rff domains pin it to one signed-uniform [1, 5]
    constant per call, the nn domain redraws it from Normal(2, 1) per
    sample.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rng is None:
        raise ValueError("an explicit RNG is required")
    d = scm.d
    if intervention is not None and not 0 <= intervention < d:
        raise IndexError(f"intervention target {intervention} out of range")
    streams = rng.spawn(d)
    parent_idx = [np.fromiter(sorted(scm.dag.parents(j)), dtype=np.intp) for j in range(d)]
    x = np.zeros((n, d))
    for j in topological_order(scm.dag).sequence():
        j = int(j)
        if j == intervention:
            if scm.domain == "nn":
                x[:, j] = streams[j].normal(2.0, 1.0, n)
            else:
                x[:, j] = float(_signed_uniform(1.0, 5.0, None, streams[j]))
            continue
        parents = x[:, parent_idx[j]]
        x[:, j] = scm.mechanisms[j](parents) + scm.noises[j].sample(parents, n, streams[j])
    return x


@dataclass(frozen=True)
class InterventionalDataset:
    """An observational block plus one block per intervened variable."""

    obs: np.ndarray
    interventions: Mapping[int, np.ndarray] = field(default_factory=dict)
    standardized: bool = False
    ground_truth: Dag | None = None
    seed: int | None = None
    scm_config: dict | None = None

    def __post_init__(self):
        obs = np.asarray(self.obs, dtype=float)
        if obs.ndim != 2:
            raise InvariantError("obs must be a 2-D sample matrix")
        if obs.shape[0] < 2:
            raise InvariantError("need at least 2 observational samples")
        d = obs.shape[1]
        blocks = {}
        for k, block in dict(self.interventions).items():
            k = int(k)
            if not 0 <= k < d:
                raise InvariantError(f"target {k} out of range for d={d}")
            block = np.asarray(block, dtype=float)
            if block.ndim != 2 or block.shape[1] != d:
                raise InvariantError(f"block for target {k} must have {d} columns")
            if block.shape[0] < 2:
                raise InvariantError(f"need at least 2 samples for target {k}")
            block.flags.writeable = False
            blocks[k] = block
        obs.flags.writeable = False
        object.__setattr__(self, "obs", obs)
        object.__setattr__(self, "interventions", MappingProxyType(blocks))
        if self.ground_truth is not None and self.ground_truth.d != d:
            raise InvariantError("ground-truth graph dimension mismatch")

    @property
    def d(self) -> int:
        return self.obs.shape[1]

    @property
    def n_obs(self) -> int:
        return self.obs.shape[0]

    @property
    def targets(self) -> frozenset[int]:
        return frozenset(self.interventions)


def generate_dataset(
    scm: ScmInstance,
    n_obs: int,
    n_int: int,
    targets: Iterable[int],
    rng: np.random.Generator,
) -> InterventionalDataset:
    """One observational block of ``n_obs`` rows plus an ``n_int``-row block
    per target, each from an independent substream."""
    targets = sorted({int(t) for t in targets})
    for t in targets:
        if not 0 <= t < scm.d:
            raise InvariantError(f"target {t} out of range for d={scm.d}")
    streams = rng.spawn(1 + len(targets))
    obs = simulate(scm, n_obs, None, streams[0])
    blocks = {t: simulate(scm, n_int, t, streams[i + 1]) for i, t in enumerate(targets)}
    return InterventionalDataset(
        obs, blocks, ground_truth=scm.dag, scm_config=scm.config()
    )


def standardize(ds: InterventionalDataset) -> InterventionalDataset:
    """Shift and scale every block by the observational mean and std.

    Idempotent up to float rounding. Raises
    :class:`~causalorder.errors.DegenerateColumnError` when an observational
    column is constant.
    """
    mu = ds.obs.mean(axis=0)
    sd = ds.obs.std(axis=0)
    degenerate = np.nonzero(sd == 0.0)[0]
    if degenerate.size:
        raise DegenerateColumnError(
            f"observational column(s) {degenerate.tolist()} are constant"
        )
    blocks = {k: (block - mu) / sd for k, block in ds.interventions.items()}
    return replace(
        ds,
        obs=(ds.obs - mu) / sd,
        interventions=blocks,
        standardized=True,
    )


def sample_intervention_targets(d: int, p_int: float, rng: np.random.Generator) -> set[int]:
    """Include each variable independently with probability ``p_int``."""
    if not 0.0 <= p_int <= 1.0:
        raise ValueError(f"p_int must be in [0, 1], got {p_int}")
    return set(np.nonzero(rng.random(d) < p_int)[0].tolist())


def select_targets_by_policy(
    dag: Dag, budget: int, policy: str, rng: np.random.Generator
) -> set[int]:
    """Pick ``budget`` targets at random or by child count (ties by index)."""
    if not 0 <= budget <= dag.d:
        raise ValueError(f"budget must be in [0, {dag.d}], got {budget}")
    if policy == "random":
        return set(rng.choice(dag.d, size=budget, replace=False).tolist())
    counts = dag.adjacency.sum(axis=1).astype(int)
    if policy == "most_children":
        ranked = sorted(range(dag.d), key=lambda i: (-counts[i], i))
    elif policy == "fewest_children":
        ranked = sorted(range(dag.d), key=lambda i: (counts[i], i))
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return set(ranked[:budget])
