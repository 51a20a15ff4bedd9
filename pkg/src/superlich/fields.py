"""Seeded trigonometric-polynomial fields with closed-form derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .jets import Jet

__all__ = ["TrigField", "random_trig_field"]


@dataclass(frozen=True, eq=False)
class TrigField:
    """x -> sum_k a_k cos(k.x) + b_k sin(k.x) with array coefficients."""

    freqs: np.ndarray  # (K, n) integer wave vectors
    cos_coeffs: np.ndarray  # (K, *shape)
    sin_coeffs: np.ndarray  # (K, *shape)

    @property
    def n(self) -> int:
        return self.freqs.shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cos_coeffs.shape[1:]

    def __call__(self, x) -> np.ndarray:
        return self.jet(x, order=0).val

    def jet(self, x, order: int = 2) -> Jet:
        x = np.asarray(x, dtype=float)
        phase = self.freqs @ x
        c, s = np.cos(phase), np.sin(phase)
        k = self.freqs.astype(float)
        a, b = self.cos_coeffs, self.sin_coeffs
        val = np.tensordot(c, a, axes=1) + np.tensordot(s, b, axes=1)
        d1 = d2 = None
        if order >= 1:
            d1 = np.tensordot(k.T * -s, a, axes=1) + np.tensordot(k.T * c, b, axes=1)
        if order >= 2:
            kk = np.einsum("ki,kj->ijk", k, k)  # (n, n, K)
            d2 = -(np.tensordot(kk * c, a, axes=1) + np.tensordot(kk * s, b, axes=1))
        return Jet(val, d1, d2)

    def map(self, f) -> TrigField:
        """Apply a linear map to the coefficient arrays (acting on trailing axes)."""
        return TrigField(self.freqs, f(self.cos_coeffs), f(self.sin_coeffs))


def random_trig_field(rng: np.random.Generator, n: int, shape: tuple[int, ...],
                      n_modes: int = 4, max_freq: int = 2,
                      complex_values: bool = True) -> TrigField:
    """Random field with |frequencies| <= ``max_freq`` and entries bounded by 1."""
    all_k = np.array(list(product(range(-max_freq, max_freq + 1), repeat=n)))
    pick = rng.choice(len(all_k), size=n_modes, replace=False)
    freqs = all_k[pick]
    # include the constant mode so that fields are not mean-free
    freqs[0] = 0

    def coeffs():
        c = rng.uniform(-1, 1, size=(n_modes,) + shape)
        if complex_values:
            c = c + 1j * rng.uniform(-1, 1, size=(n_modes,) + shape)
            c = c / np.sqrt(2)
        return c / (2 * n_modes)

    return TrigField(freqs, coeffs(), coeffs())
