"""Random network geometry and channel generation.

A deployment places single-antenna APs and users uniformly at random in a
disk. The channel between user k and AP l factors into a large-scale
amplitude gain (distance-based path loss, optionally log-normal shadowed)
and an i.i.d. unit-variance circularly-symmetric Gaussian small-scale
coefficient.

All randomness is seeded. ``derive_seed`` turns a master seed plus a
(purpose, index) pair into an independent sub-seed, so every layout of a
Monte Carlo run is reproducible on its own, regardless of execution order.
"""

from dataclasses import dataclass

import numpy as np

# Sub-seed purposes used by the experiment harness.
PURPOSE_DEPLOYMENT = 0
PURPOSE_SHADOWING = 1
PURPOSE_FADING = 2
PURPOSE_ALGORITHM = 3


def derive_seed(master_seed: int, purpose: int, index: int) -> int:
    """Deterministic 64-bit sub-seed for (purpose, index) under a master seed."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(int(purpose), int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Deployment:
    """AP and user coordinates inside a disk of radius ``radius_d`` meters."""

    ap_positions: np.ndarray      # (L, 2)
    user_positions: np.ndarray    # (K, 2)
    radius_d: float
    seed: int

    @property
    def num_aps(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]


@dataclass(frozen=True)
class ChannelParams:
    """Path-loss, shadowing and noise parameters.

    ``sigma_sh_db = 0`` disables shadowing. Distances are clamped from below
    at ``min_distance_m`` so the path-loss law stays finite as d -> 0.
    """

    alpha: float = 4.0
    sigma_sh_db: float = 0.0
    noise_power_dbm: float = -104.0
    min_distance_m: float = 1.0

    def __post_init__(self):
        if self.alpha <= 2:
            raise ValueError("path-loss exponent must exceed 2")
        if self.sigma_sh_db < 0:
            raise ValueError("shadowing standard deviation must be >= 0")
        if self.min_distance_m <= 0:
            raise ValueError("distance clamp must be positive")

    @property
    def noise_power_watts(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)


@dataclass(frozen=True)
class ChannelRealization:
    """Large-scale gains plus one or more small-scale fading draws."""

    large_scale: np.ndarray        # (K, L) positive amplitude gains
    small_scale_draws: np.ndarray  # (n_draws, K, L) complex
    deployment: Deployment


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _sample_disk(rng, n, radius):
    # Uniform over the disk: radius = R * sqrt(u), angle uniform on [0, 2pi).
    r = radius * np.sqrt(rng.random(n))
    theta = rng.random(n) * 2.0 * np.pi
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_deployment(K: int, L: int, D: float, seed: int) -> Deployment:
    """Drop K users and L APs independently and uniformly in a disk of radius D.

    AP positions are drawn first, then user positions, from a single
    generator seeded with ``seed``.
    """
    if K < 1 or L < 1:
        raise ValueError("need at least one user and one AP")
    if D <= 0:
        raise ValueError("disk radius must be positive")
    rng = np.random.default_rng(seed)
    aps = _sample_disk(rng, L, D)
    users = _sample_disk(rng, K, D)
    return Deployment(ap_positions=aps, user_positions=users,
                      radius_d=float(D), seed=int(seed))


def distance_matrix(dep: Deployment) -> np.ndarray:
    """K x L matrix of user-to-AP distances in meters."""
    diff = dep.user_positions[:, None, :] - dep.ap_positions[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def large_scale_matrix(dep: Deployment, params: ChannelParams, seed: int = 0) -> np.ndarray:
    """K x L amplitude gains d^(-alpha/2), optionally log-normal shadowed.

    Without shadowing the result is a pure function of the geometry and no
    RNG is consumed. With shadowing, entry (k, l) becomes
    sqrt(d^(-alpha) * 10^(c/10)) with c ~ Normal(0, sigma_sh_db^2), drawn
    deterministically from ``seed``.
    """
    d = np.maximum(distance_matrix(dep), params.min_distance_m)
    if params.sigma_sh_db == 0:
        return d ** (-params.alpha / 2.0)
    rng = np.random.default_rng(seed)
    shadow_db = rng.normal(0.0, params.sigma_sh_db, size=d.shape)
    return np.sqrt(d ** (-params.alpha) * 10.0 ** (shadow_db / 10.0))


def sample_small_scale(K: int, L: int, n_draws: int, seed: int) -> np.ndarray:
    """(n_draws, K, L) i.i.d. CN(0, 1) fading draws, deterministic per seed."""
    if n_draws < 1:
        raise ValueError("need at least one fading draw")
    rng = np.random.default_rng(seed)
    re = rng.standard_normal((n_draws, K, L))
    im = rng.standard_normal((n_draws, K, L))
    return (re + 1j * im) / np.sqrt(2.0)


def channel_matrix(large_scale: np.ndarray, small_scale: np.ndarray) -> np.ndarray:
    """Entrywise product of amplitude gains and fading coefficients."""
    large_scale = np.asarray(large_scale)
    small_scale = np.asarray(small_scale)
    if large_scale.shape != small_scale.shape:
        raise ValueError(
            f"shape mismatch: {large_scale.shape} vs {small_scale.shape}")
    return large_scale * small_scale
