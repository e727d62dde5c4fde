import numpy as np
from scipy.stats import unitary_group


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def gaussian_effective_channel(rng, dim=6, users=4) -> np.ndarray:
    """Generic full-rank effective channel with i.i.d. CN(0,1) entries."""
    return (
        rng.standard_normal((dim, users)) + 1j * rng.standard_normal((dim, users))
    ) / np.sqrt(2.0)


def pipeline_channel(rng, num_antennas=64, num_paths=20, effective_dim=6, users=4):
    """One realistic channel through the full inner-precoder pipeline."""
    from d2dcoop import (
        analytic_covariance,
        draw_environment,
        effective_channel,
        inner_precoder,
        sample_channel,
    )

    env = draw_environment(num_antennas, num_paths, rng)
    h = sample_channel(env, users, rng)
    w = inner_precoder(analytic_covariance(env), effective_dim)
    return env, h, w, effective_channel(w, h)
