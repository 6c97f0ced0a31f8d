"""Halton sequences and QMC rejection sampling on a parameter rectangle."""

from dataclasses import dataclass

import numpy as np


def _is_prime(b):
    if b < 2:
        return False
    return all(b % k for k in range(2, int(b**0.5) + 1))


def radical_inverse(i, base):
    """Van der Corput radical inverse of ``i`` in ``base``.

    Accepts a scalar or an integer array; digits of ``i`` are mirrored about
    the radix point, e.g. ``radical_inverse(3, 2) == 0.75``.
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    idx = np.asarray(i, dtype=np.int64)
    if np.any(idx < 0):
        raise ValueError("index must be nonnegative")
    scalar = idx.ndim == 0
    idx = np.atleast_1d(idx).copy()
    out = np.zeros(idx.shape, dtype=float)
    scale = 1.0 / base
    while np.any(idx > 0):
        idx, digit = np.divmod(idx, base)
        out += digit * scale
        scale /= base
    return float(out[0]) if scalar else out


def halton(count, start_index=1, bases=(2, 3)):
    """``count`` Halton points starting at ``start_index``; shape (count, len(bases))."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if start_index < 0:
        raise ValueError("start_index must be nonnegative")
    idx = np.arange(start_index, start_index + count, dtype=np.int64)
    return np.column_stack([radical_inverse(idx, b) for b in bases]) if count else np.empty((0, len(bases)))


def halton_2d(count, start_index=1, bases=(2, 3)):
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(bases) != 2:
        raise ValueError("halton_2d needs exactly two bases")
    return halton(count, start_index, bases)


@dataclass(frozen=True)
class HaltonStream:
    """Position in a 3-D Halton sequence: two coordinates for (u, v) and one
    acceptance coordinate for rejection sampling."""

    bases: tuple = (2, 3, 5)
    next_index: int = 1

    def __post_init__(self):
        if len(set(self.bases)) != len(self.bases) or not all(_is_prime(b) for b in self.bases):
            raise ValueError(f"bases must be pairwise distinct primes, got {self.bases}")
        if self.next_index < 1:
            raise ValueError("next_index must be >= 1")

    def take(self, count):
        """Return ``(points, advanced_stream)``."""
        pts = halton(count, self.next_index, self.bases)
        return pts, HaltonStream(self.bases, self.next_index + count)


@dataclass(frozen=True)
class ParamDomain:
    """Open rectangle ``(u_lo, u_hi) x (v_lo, v_hi)``."""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        if not (self.u_lo < self.u_hi and self.v_lo < self.v_hi):
            raise ValueError(f"degenerate parameter domain {self}")

    @property
    def area(self):
        return (self.u_hi - self.u_lo) * (self.v_hi - self.v_lo)

    def map_unit(self, uv01):
        """Affine image of unit-square points in the rectangle."""
        uv01 = np.asarray(uv01, dtype=float)
        u = self.u_lo + (self.u_hi - self.u_lo) * uv01[:, 0]
        v = self.v_lo + (self.v_hi - self.v_lo) * uv01[:, 1]
        return np.column_stack([u, v])


def rejection_sample(stream, domain, density, density_bound, M0):
    """QMC rejection sampling of ``density`` on ``domain``.

    Each of the ``M0`` stream triples ``(u', v', w)`` is mapped to ``(u, v)`` in
    the rectangle and accepted iff ``w <= density(u, v) / density_bound``.

    Returns
    -------
    accepted : (M, 2) array of parameter points, in stream order
    attempted : int, always ``M0``
    stream : the stream advanced past the consumed indices
    """
    if density_bound <= 0:
        raise ValueError("density_bound must be positive")
    if M0 < 1:
        raise ValueError("M0 must be >= 1")
    if len(stream.bases) != 3:
        raise ValueError("rejection sampling needs a 3-D stream")
    raw, stream = stream.take(M0)
    uv = domain.map_unit(raw[:, :2])
    dens = np.asarray(density(uv[:, 0], uv[:, 1]), dtype=float)
    dens = np.broadcast_to(dens, (M0,))
    if not np.all(np.isfinite(dens)) or np.any(dens < 0):
        raise ValueError("density must be finite and nonnegative")
    keep = raw[:, 2] <= dens / density_bound
    return uv[keep], M0, stream
