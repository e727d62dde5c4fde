"""Random decoding codebooks and average-SNR codeword selection.

A codebook is a pre-stored stack of ``2**bits`` unitary matrices shared
by the base station and the users. Each codeword comes from the
eigenvector matrix of a complex Wishart sample (G @ G^H with i.i.d.
standard complex Gaussian G), which is guaranteed unitary and is
Haar-like in distribution. The base station evaluates every codeword
against the current effective channel and signals the index maximizing
the average post-decoding SNR.

Codewords are drawn sequentially from the generator, so for a fixed seed
the codebook of size ``2**b`` is exactly the prefix of the codebook of
size ``2**(b+1)``. Paired-seed experiments rely on this nesting.
"""

import json
from dataclasses import dataclass

import numpy as np

from .linalg import phase_canonicalize
from .precoding import gram_inverse, snr_denominators

DEFAULT_BUDGET_BYTES = 1 << 30


class CodebookBudgetError(RuntimeError):
    """Requested codebook would exceed the configured memory budget."""


@dataclass(frozen=True, eq=False)
class DecodingCodebook:
    """Ordered stack of unitary decoding matrices.

    ``codewords`` has shape (2**bits, users, users); column ``p`` of a
    codeword is the decoding vector user ``p`` applies to the pooled
    received samples.
    """

    codewords: np.ndarray
    bits: int

    def __post_init__(self):
        cw = np.asarray(self.codewords)
        if self.bits < 0:
            raise ValueError("bits must be nonnegative")
        if cw.ndim != 3 or cw.shape[1] != cw.shape[2]:
            raise ValueError("codewords must be a stack of square matrices")
        if cw.shape[0] != 1 << self.bits:
            raise ValueError(
                f"codebook must hold exactly 2**{self.bits} codewords, got {cw.shape[0]}"
            )
        object.__setattr__(self, "codewords", cw)

    @property
    def num_users(self) -> int:
        return int(self.codewords.shape[1])

    def __len__(self) -> int:
        return int(self.codewords.shape[0])

    def __getitem__(self, index: int) -> np.ndarray:
        return self.codewords[index]

    def prefix(self, bits: int) -> "DecodingCodebook":
        """View of the first ``2**bits`` codewords as a smaller codebook."""
        if not 0 <= bits <= self.bits:
            raise ValueError(f"prefix bits must be in [0, {self.bits}]")
        return DecodingCodebook(self.codewords[: 1 << bits], bits)


def generate_codebook(
    num_users: int,
    bits: int,
    rng: np.random.Generator,
    max_bytes: int = DEFAULT_BUDGET_BYTES,
) -> DecodingCodebook:
    """Draw a fresh random codebook of ``2**bits`` unitary matrices.

    Deterministic given the generator state; identical (users, bits,
    seed) produce bitwise-identical codebooks.
    """
    if num_users < 1:
        raise ValueError("num_users must be a positive integer")
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    size = 1 << bits
    need = size * num_users * num_users * 16
    if need > max_bytes:
        raise CodebookBudgetError(
            f"codebook of 2**{bits} matrices needs {need} bytes, budget is {max_bytes}"
        )
    # one contiguous block per codeword keeps prefixes seed-stable
    z = rng.standard_normal((size, num_users, num_users, 2))
    g = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
    wishart = g @ np.conj(np.swapaxes(g, -1, -2))
    _, vecs = np.linalg.eigh(wishart)
    vecs = phase_canonicalize(vecs[..., ::-1])
    return DecodingCodebook(np.ascontiguousarray(vecs), bits)


def average_snr(
    h_e: np.ndarray,
    decoding: np.ndarray,
    noise_power: float,
    gram_inv: np.ndarray | None = None,
) -> float:
    """Average over users of the per-user post-decoding SNR."""
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    if gram_inv is None:
        gram_inv = gram_inverse(h_e)
    denoms = snr_denominators(decoding, gram_inv)
    return float((1.0 / denoms).mean() / noise_power)


def select_codeword(
    codebook: DecodingCodebook,
    h_e: np.ndarray,
    noise_power: float,
    gram_inv: np.ndarray | None = None,
):
    """Pick the codeword maximizing the average post-decoding SNR.

    The Gram inverse is computed once and reused across all codewords
    and columns. Ties break to the lowest index. Returns
    ``(index, codeword, average_snr)``.
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    if gram_inv is None:
        gram_inv = gram_inverse(h_e)
    cw = codebook.codewords
    projected = np.matmul(gram_inv[None, :, :], cw)
    denoms = np.sum(cw.conj() * projected, axis=1).real
    snrs = (1.0 / denoms).sum(axis=1) / (noise_power * codebook.num_users)
    index = int(np.argmax(snrs))
    return index, cw[index], float(snrs[index])


def save_codebook(path, codebook: DecodingCodebook) -> None:
    """Dump a codebook to JSON for cross-implementation comparison.

    Entries are row-major pairs of 64-bit floats ``[re, im]``.
    """
    payload = {
        "bits": codebook.bits,
        "num_users": codebook.num_users,
        "codewords": [
            [[[float(e.real), float(e.imag)] for e in row] for row in word]
            for word in codebook.codewords
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_codebook(path) -> DecodingCodebook:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    raw = np.asarray(payload["codewords"], dtype=float)
    if raw.ndim != 4 or raw.shape[-1] != 2:
        raise ValueError("malformed codebook file")
    words = raw[..., 0] + 1j * raw[..., 1]
    return DecodingCodebook(words, int(payload["bits"]))
