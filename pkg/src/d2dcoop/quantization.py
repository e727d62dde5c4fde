"""Quantized sharing of received samples over a rate-limited link.

Users exchange their raw received samples so the group can decode
jointly. On a real device-to-device link the samples are uniformly
quantized first: ``c/2`` bits for the real part and ``c/2`` for the
imaginary part, both midrise on [-tau, tau]. The quantization error acts
as extra additive noise at every user except on its own sample, and the
sharing link's bandwidth and SNR budget how many bits ``c`` each sample
can carry.
"""

import math
from dataclasses import dataclass

import numpy as np

from .precoding import gram_inverse, noncooperative_baseline_snr, snr_denominators


@dataclass(frozen=True)
class QuantizerConfig:
    """Uniform midrise quantizer for one complex sample.

    ``total_bits`` is split evenly between the real and imaginary parts,
    so it must be even and at least 2. ``clip_level`` is the assumed
    amplitude range of either part; inputs beyond it saturate.
    """

    total_bits: int
    clip_level: float

    def __post_init__(self):
        if self.total_bits < 2 or self.total_bits % 2 != 0:
            raise ValueError("total_bits must be an even integer >= 2")
        if not (self.clip_level > 0) or not math.isfinite(self.clip_level):
            raise ValueError("clip_level must be positive and finite")

    @property
    def step(self) -> float:
        """Cell width of the per-component quantizer."""
        return 2.0 * self.clip_level / (1 << (self.total_bits // 2))


@dataclass(frozen=True)
class CooperationLink:
    """Rate budget of the sample-sharing link.

    ``bandwidth_ratio`` is the cooperation bandwidth over the downlink
    bandwidth; ``link_snr`` is the linear SNR of the sharing link.
    """

    bandwidth_ratio: float
    link_snr: float

    def __post_init__(self):
        for name in ("bandwidth_ratio", "link_snr"):
            value = getattr(self, name)
            if not (value > 0) or not math.isfinite(value):
                raise ValueError(f"{name} must be positive and finite")


def uniform_quantize(samples, config: QuantizerConfig):
    """Midrise uniform quantization of real and imaginary parts.

    Out-of-range components saturate at the extreme reconstruction level;
    use :func:`overload_count` to audit how often that happens.
    """
    y = np.asarray(samples)
    step = config.step
    top = config.clip_level - step / 2.0

    def _component(x):
        levels = (np.floor(x / step) + 0.5) * step
        return np.clip(levels, -top, top)

    return _component(y.real) + 1j * _component(y.imag)


def overload_count(samples, config: QuantizerConfig) -> int:
    """Number of real components falling outside [-tau, tau]."""
    y = np.asarray(samples)
    tau = config.clip_level
    return int(
        np.count_nonzero(np.abs(y.real) > tau) + np.count_nonzero(np.abs(y.imag) > tau)
    )


def overload_fraction(samples, config: QuantizerConfig) -> float:
    """Overloaded fraction of the 2 * samples.size real components."""
    y = np.asarray(samples)
    if y.size == 0:
        return 0.0
    return overload_count(y, config) / (2.0 * y.size)


def quantization_noise_variance(config: QuantizerConfig) -> float:
    """Variance of the complex quantization error, 2 tau^2 / (3 * 2^c).

    Standard uniform-error model: each component error is uniform over a
    cell of width ``2 tau / 2^(c/2)``, real and imaginary independent.
    """
    return 2.0 * config.clip_level**2 / (3.0 * 2.0**config.total_bits)


def rate_budget_bits(link: CooperationLink) -> float:
    """Unrounded bits per shared sample the link can carry."""
    return link.bandwidth_ratio * math.log2(1.0 + link.link_snr)


def bits_from_bandwidth(link: CooperationLink) -> int:
    """Largest even bit count the sharing link supports per sample.

    Zero means the budget cannot carry even one bit per component and
    cooperation is infeasible at this operating point.
    """
    return 2 * int(math.floor(rate_budget_bits(link) / 2.0))


def effective_noise_power(
    noise_power: float, quant_variance: float, decoding_vector: np.ndarray, user: int
) -> float:
    """Total noise seen by one user decoding from pooled quantized samples.

    The user's own sample is never quantized, so the extra term is scaled
    by the decoding weight mass on everyone else's samples:
    ``N0 + (1 - |q_p[p]|^2) * sigma_q^2`` (exact form).
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    if quant_variance < 0:
        raise ValueError("quant_variance must be nonnegative")
    qp = np.asarray(decoding_vector)
    own = float(np.abs(qp[user]) ** 2)
    return noise_power + (1.0 - own) * quant_variance


def effective_noise_power_constant_amplitude(
    noise_power: float, quant_variance: float, num_users: int
) -> float:
    """Companion approximation assuming constant-amplitude decoding vectors.

    With ``|q_p[p]|^2 = 1/P`` the exact form reduces to
    ``N0 + sigma_q^2 * (P - 1) / P``. Kept for comparison against the
    exact per-user form.
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    if quant_variance < 0:
        raise ValueError("quant_variance must be nonnegative")
    if num_users < 1:
        raise ValueError("num_users must be a positive integer")
    return noise_power + quant_variance * (num_users - 1) / num_users


def quantized_snr(
    h_e: np.ndarray,
    decoding: np.ndarray,
    noise_power: float,
    link: CooperationLink,
    clip_level: float,
    gram_inv: np.ndarray | None = None,
) -> np.ndarray:
    """Per-user SNRs with quantized sample sharing over ``link``.

    The analytic production path: the closed-form SNR with the noise
    power replaced by each user's effective noise. When the link budget
    rounds down to zero bits the users fall back to plain zero-forcing
    (identity decoding) instead of consuming garbage samples.
    """
    bits = bits_from_bandwidth(link)
    if gram_inv is None:
        gram_inv = gram_inverse(h_e)
    if bits == 0:
        return noncooperative_baseline_snr(h_e, noise_power, gram_inv)
    sigma_q2 = quantization_noise_variance(QuantizerConfig(bits, clip_level))
    q = np.asarray(decoding)
    denoms = snr_denominators(q, gram_inv)
    own = np.abs(np.diagonal(q)) ** 2
    effective = noise_power + (1.0 - own) * sigma_q2
    return 1.0 / (effective * denoms)
