"""Effective channel, zero-forcing outer precoder, and closed-form SNR.

The outer precoder is zero-forcing with per-stream (unit column norm)
power normalization against the overall channel "effective channel times
decoding matrix". With that normalization the post-decoding SNR of user
``p`` has the closed form ``1 / (N0 * [(Q^H A Q)^{-1}]_{pp})`` with
``A`` the effective-channel Gram matrix; the equivalent quadratic form
``1 / (N0 * q_p^H A^{-1} q_p)`` is the cheap production path because one
Gram inverse is reused across users and codewords.
"""

import numpy as np

COND_LIMIT = 1e12


class IllConditionedChannelError(RuntimeError):
    """Effective-channel Gram matrix is too ill conditioned to invert."""

    def __init__(self, condition_number: float, limit: float = COND_LIMIT):
        super().__init__(
            "effective-channel Gram condition number "
            f"{condition_number:.3e} exceeds limit {limit:.1e}"
        )
        self.condition_number = float(condition_number)


def effective_channel(inner, channel: np.ndarray) -> np.ndarray:
    """Project the physical channel through the inner precoder.

    ``inner`` may be an :class:`~d2dcoop.channel.InnerPrecoder` or the
    bare matrix with orthonormal columns. Result is dims x users.
    """
    w = np.asarray(getattr(inner, "matrix", inner))
    h = np.asarray(channel)
    if w.ndim != 2 or h.ndim != 2 or w.shape[0] != h.shape[0]:
        raise ValueError(
            f"incompatible shapes: inner {w.shape} vs channel {h.shape}"
        )
    return w.conj().T @ h


def gram(h_e: np.ndarray) -> np.ndarray:
    """Gram matrix of the effective channel (users x users)."""
    h_e = np.asarray(h_e)
    return h_e.conj().T @ h_e


def gram_inverse(h_e: np.ndarray, cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Inverse of the effective-channel Gram matrix, with a conditioning gate.

    Raises :class:`IllConditionedChannelError` when the condition number
    exceeds ``cond_limit``; callers record such channels as failed trials
    rather than silently producing garbage SNRs.
    """
    a = gram(h_e)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedChannelError(cond, cond_limit)
    return np.linalg.inv(a)


def snr_denominators(decoding: np.ndarray, gram_inv: np.ndarray) -> np.ndarray:
    """Per-user quadratic forms q_p^H A^{-1} q_p for all columns at once."""
    q = np.asarray(decoding)
    return np.einsum("ip,ij,jp->p", q.conj(), gram_inv, q).real


def per_user_snr(
    h_e: np.ndarray,
    decoding: np.ndarray,
    noise_power: float,
    user: int,
    gram_inv: np.ndarray | None = None,
) -> float:
    """Post-decoding linear SNR of one user (quadratic-form path).

    ``user`` is a 0-based column index into the decoding matrix. Pass a
    precomputed ``gram_inv`` to amortize the inversion across users and
    codewords.
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    q = np.asarray(decoding)
    if not 0 <= user < q.shape[1]:
        raise ValueError(f"user index {user} out of range")
    if gram_inv is None:
        gram_inv = gram_inverse(h_e)
    qp = q[:, user]
    denom = float(np.real(qp.conj() @ gram_inv @ qp))
    return 1.0 / (noise_power * denom)


def per_user_snr_gram(
    h_e: np.ndarray,
    decoding: np.ndarray,
    noise_power: float,
    user: int,
    cond_limit: float = COND_LIMIT,
) -> float:
    """Same SNR via the diagonal of the inverted overall-channel Gram.

    Independent evaluation route kept as a cross-check oracle for
    :func:`per_user_snr`; it inverts the Gram of ``h_e @ decoding``
    directly instead of reusing the effective-channel Gram inverse.
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    overall = np.asarray(h_e) @ np.asarray(decoding)
    g = gram(overall)
    cond = float(np.linalg.cond(g))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedChannelError(cond, cond_limit)
    m = np.linalg.inv(g)
    return 1.0 / (noise_power * float(m[user, user].real))


def noncooperative_baseline_snr(
    h_e: np.ndarray,
    noise_power: float,
    gram_inv: np.ndarray | None = None,
) -> np.ndarray:
    """Per-user SNRs of plain zero-forcing without any receiver pooling.

    That is the identity decoding matrix: each user demodulates from its
    own received sample only.
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    if gram_inv is None:
        gram_inv = gram_inverse(h_e)
    return 1.0 / (noise_power * np.diagonal(gram_inv).real)


def zf_outer_precoder(
    h_e: np.ndarray,
    decoding: np.ndarray,
    cond_limit: float = COND_LIMIT,
) -> np.ndarray:
    """Zero-forcing outer precoder against the overall channel.

    Returns a dims x users matrix with unit-norm columns such that
    ``decoding^H @ h_e^H @ V`` is diagonal with positive real entries;
    the p-th diagonal entry equals ``1 / sqrt([(Q^H A Q)^{-1}]_{pp})``.
    """
    overall = np.asarray(h_e) @ np.asarray(decoding)
    g = gram(overall)
    cond = float(np.linalg.cond(g))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedChannelError(cond, cond_limit)
    v = overall @ np.linalg.inv(g)
    return v / np.linalg.norm(v, axis=0, keepdims=True)
