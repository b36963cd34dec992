"""Vector primitives, counter-based sphere sampling and orthogonal projection."""
from __future__ import annotations

import math

import numpy as np

from .errors import GeometryError, InvalidDimension

UNIT_TOL = 1e-12
_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise GeometryError(f"expected a 1-D coordinate sequence, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector has non-finite coordinates")
    return v


def as_unit_vector(x) -> np.ndarray:
    v = as_vector(x)
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise GeometryError(f"not a unit vector (norm {np.linalg.norm(v)!r})")
    return v


def normalize(x) -> np.ndarray:
    v = as_vector(x)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return v / n


def blocks_per_sample(dim: int) -> int:
    """Philox counter blocks consumed per direction (each block yields 4 normals)."""
    return (dim + 3) // 4


def unit_vectors(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Directions for sample indices ``start .. start+count-1`` as a ``(count, dim)`` array.

    Row ``i`` depends only on ``(seed, start + i)``: sample index ``j`` owns the
    Philox counter blocks ``[j*B, (j+1)*B)`` with ``B = blocks_per_sample(dim)``,
    whose 64-bit words are turned into standard normals by Box-Muller and then
    normalized. Any batching of an index range therefore reproduces the same rows.
    """
    if dim < 2:
        raise InvalidDimension(f"sphere sampling needs dim >= 2, got {dim}")
    if count < 0 or start < 0:
        raise ValueError("start and count must be non-negative")
    b = blocks_per_sample(dim)
    if count == 0:
        return np.empty((0, dim))
    bitgen = np.random.Philox(key=int(seed) & _MASK64, counter=start * b)
    raw = bitgen.random_raw(count * b * 4).reshape(count, b * 4)
    # (0, 1) open interval so log() is finite
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    phi = _TWO_PI * u[:, 1::2]
    z = np.empty((count, b * 4))
    z[:, 0::2] = r * np.cos(phi)
    z[:, 1::2] = r * np.sin(phi)
    z = z[:, :dim]
    z /= np.linalg.norm(z, axis=1)[:, None]
    return z


class SampleStream:
    """A seed plus a sample counter; draws are pure functions of ``(seed, index)``."""

    def __init__(self, seed: int, next_index: int = 0):
        if next_index < 0:
            raise ValueError("next_index must be non-negative")
        self.seed = int(seed)
        self.next_index = int(next_index)

    def __repr__(self):
        return f"SampleStream(seed={self.seed}, next_index={self.next_index})"

    def draw(self, dim: int, count: int) -> np.ndarray:
        out = unit_vectors(self.seed, self.next_index, count, dim)
        self.next_index += count
        return out


def sample_unit_vector(stream: SampleStream, dim: int) -> np.ndarray:
    """Draw one uniform direction on S^{dim-1} and advance ``stream`` by one index."""
    return stream.draw(dim, 1)[0]


def project_to_complement(x, u) -> np.ndarray:
    x = as_vector(x)
    u = as_unit_vector(u)
    if x.shape != u.shape:
        raise GeometryError(f"dimension mismatch: {x.size} vs {u.size}")
    return x - (x @ u) * u


def complement_basis(u) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``u``, one vector per row.

    Gram-Schmidt against ``u`` over the standard basis, skipping the axis where
    ``|u|`` is largest (the only axis that can be nearly parallel to ``u``).
    The axes are visited in increasing index order, so the result is a
    deterministic function of ``u``.
    """
    u = as_unit_vector(u)
    dim = u.size
    if dim < 2:
        raise InvalidDimension("complement basis needs dim >= 2")
    drop = int(np.argmax(np.abs(u)))
    basis = [u]
    for axis in range(dim):
        if axis == drop:
            continue
        w = np.zeros(dim)
        w[axis] = 1.0
        # two passes keep orthogonality at the 1e-16 level
        for _ in range(2):
            for q in basis:
                w = w - (w @ q) * q
        basis.append(w / np.linalg.norm(w))
    return np.array(basis[1:])


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n; ``n * unit_ball_volume(n)`` is the area of S^{n-1}."""
    if int(n) != n or n < 1:
        raise InvalidDimension(f"unit ball dimension must be a positive integer, got {n}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    return n * unit_ball_volume(n)


def random_rotation(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    """Haar-distributed rotation matrix (determinant +1)."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def angle_between(a, b) -> float:
    """Angle in [0, pi] between two nonzero vectors (Kahan's formula, accurate near 0 and pi)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = a * np.linalg.norm(b)
    y = b * np.linalg.norm(a)
    return 2.0 * math.atan2(float(np.linalg.norm(x - y)), float(np.linalg.norm(x + y)))
