"""Polygons in C^n degenerated to segments: membership, normal forms and charts.

A polygon with labelled vertices z_1, ..., z_n is stored as a one dimensional
complex numpy array.  Two submanifolds of C^n are handled:

* ``L`` -- all n-segments (collinear vertices, not all equal),
* ``M`` -- the n-segments whose first vertex sits at the origin.

Vertex labels in user-facing results (``ends``) are 1-based, matching the
usual way polygons are labelled; array indexing stays 0-based internally.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ChartDomainError, DegenerateError, DomainError, MembershipError

Space = Literal["M", "L"]

DEFAULT_TOL = 1e-10


def as_polypoint(Z) -> np.ndarray:
    """Coerce ``Z`` to a validated complex vertex array (n >= 3, finite)."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 1 or Z.size < 3:
        raise ValueError(f"a polygon needs a flat sequence of n >= 3 vertices, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise ValueError("vertices must be finite")
    return Z


def _scale(Z: np.ndarray) -> float:
    return float(np.max(np.abs(Z))) if Z.size else 0.0


def pairing(Z, W) -> float:
    """Real inner product <<Z, W>> = sum Re(z_j) Re(w_j) + Im(z_j) Im(w_j)."""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    return float(np.sum(Z.real * W.real + Z.imag * W.imag))


def _difference_singular_values(Z: np.ndarray) -> np.ndarray:
    D = Z[1:] - Z[0]
    return np.linalg.svd(np.vstack([D.real, D.imag]), compute_uv=False)


def is_n_segment(Z, tol: float = DEFAULT_TOL) -> bool:
    """True when all vertices of ``Z`` are collinear.

    The 2 x (n-1) real matrix of differences z_j - z_1 must have numerical rank
    at most one: its second singular value is compared to the first.  Diagonal
    points (all vertices equal) count as segments.
    """
    Z = as_polypoint(Z)
    s = _difference_singular_values(Z)
    if s[0] == 0.0:
        return True
    return bool(s[1] <= tol * s[0])


def is_n_segment_many(Zs, tol: float = DEFAULT_TOL) -> np.ndarray:
    """:func:`is_n_segment` applied to each row of ``Zs`` (same criterion, one batched SVD)."""
    Zs = np.atleast_2d(np.asarray(Zs, dtype=complex))
    D = Zs[:, 1:] - Zs[:, :1]
    s = np.linalg.svd(np.stack([D.real, D.imag], axis=1), compute_uv=False)
    return (s[:, 0] == 0.0) | (s[:, 1] <= tol * s[:, 0])


def is_diagonal(Z, tol: float = DEFAULT_TOL) -> bool:
    Z = as_polypoint(Z)
    spread = float(np.max(np.abs(Z - Z[0])))
    return spread <= tol * _scale(Z)


def in_L(Z, tol: float = DEFAULT_TOL) -> bool:
    """Membership in L(n): an n-segment that is not on the diagonal."""
    return is_n_segment(Z, tol) and not is_diagonal(Z, tol)


def in_M(Z, tol: float = DEFAULT_TOL) -> bool:
    """Membership in M(n): an n-segment through the origin, first vertex 0, Z != 0."""
    Z = as_polypoint(Z)
    scale = _scale(Z)
    if scale == 0.0:
        return False
    return abs(Z[0]) <= tol * scale and is_n_segment(Z, tol)


def theta(z: complex) -> float:
    """Angle in [0, pi] of the line through 0 and ``z``.

    0 on the positive reals, pi on the negative reals, arg(z) in the upper
    half plane and arg(-z) in the lower one.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("theta is undefined at 0")
    if z.imag == 0.0:
        return 0.0 if z.real > 0 else math.pi
    if z.imag > 0:
        return cmath.phase(z)
    return cmath.phase(-z)


@dataclass(frozen=True, eq=False)
class MappingTorusCoord:
    """Point (X, theta) of the mapping torus of X -> -X on R^{n-1} minus 0.

    The gluing (X, pi) ~ (-X, 0) is applied on construction, so ``theta`` is
    always in [0, pi) and the representative is unique.
    """

    X: np.ndarray
    theta: float

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 1 or X.size < 2:
            raise ValueError("X must be a real vector of length n-1 >= 2")
        if not np.any(X):
            raise DomainError("X must be nonzero")
        th = float(self.theta) % (2 * math.pi)
        if th >= math.pi:
            th -= math.pi
            X = -X
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "theta", th)

    @property
    def n(self) -> int:
        return self.X.size + 1

    def __eq__(self, other):
        if not isinstance(other, MappingTorusCoord):
            return NotImplemented
        return self.theta == other.theta and np.array_equal(self.X, other.X)

    def allclose(self, other: "MappingTorusCoord", rtol: float = 1e-12) -> bool:
        scale = max(float(np.max(np.abs(self.X))), 1.0)
        return (
            self.X.shape == other.X.shape
            and abs(self.theta - other.theta) <= rtol * math.pi
            and bool(np.max(np.abs(self.X - other.X)) <= rtol * scale)
        )


def psi(c: MappingTorusCoord) -> np.ndarray:
    """(X, theta) -> (0, e^{i theta} x_2, ..., e^{i theta} x_n)."""
    return np.concatenate([[0j], cmath.exp(1j * c.theta) * c.X])


def psi_inv(Z, tol: float = DEFAULT_TOL) -> MappingTorusCoord:
    """Inverse of :func:`psi`; uses the nonzero vertex of largest modulus."""
    Z = as_polypoint(Z)
    if _scale(Z) == 0.0:
        raise DomainError("the zero polygon is not in M(n)")
    if not in_M(Z, tol):
        raise MembershipError("point is not in M(n)")
    k = int(np.argmax(np.abs(Z)))
    th = theta(Z[k])
    rotated = cmath.exp(-1j * th) * Z[1:]
    return MappingTorusCoord(rotated.real, th)


def split_L(Z, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, complex]:
    """(z_1, ..., z_n) -> ((0, z_2 - z_1, ..., z_n - z_1), z_1)."""
    Z = as_polypoint(Z)
    if not is_n_segment(Z, tol):
        raise MembershipError("point is not an n-segment")
    b = complex(Z[0])
    return Z - b, b


def join_L(Z, b: complex) -> np.ndarray:
    return as_polypoint(Z) + complex(b)


@dataclass(frozen=True, eq=False)
class SegmentWitness:
    """Decomposition Z = a * X + b of an n-segment.

    ``direction`` is a unit complex number with theta(direction) in [0, pi),
    ``profile`` is real with first entry 0.
    """

    base: complex
    direction: complex
    profile: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.direction * self.profile + self.base


def _direction(Z: np.ndarray) -> complex:
    D = Z[1:] - Z[0]
    U, s, _ = np.linalg.svd(np.vstack([D.real, D.imag]))
    if s[0] == 0.0:
        return 1.0 + 0j
    a = complex(U[0, 0], U[1, 0])
    a /= abs(a)
    if a.imag < 0 or (a.imag == 0 and a.real < 0):
        a = -a
    return a


def segment_witness(Z, tol: float = DEFAULT_TOL) -> SegmentWitness:
    Z = as_polypoint(Z)
    if not is_n_segment(Z, tol):
        raise MembershipError("point is not an n-segment")
    a = _direction(Z)
    b = complex(Z[0])
    X = (np.conj(a) * (Z - b)).real
    X[0] = 0.0
    return SegmentWitness(b, a, X)


def _end_sets(Z: np.ndarray, tol: float) -> tuple[np.ndarray, list[int], list[int]]:
    if not is_n_segment(Z, tol):
        raise MembershipError("point is not an n-segment")
    if is_diagonal(Z, tol):
        raise DegenerateError("a diagonal polygon has no ends")
    a = _direction(Z)
    s = (np.conj(a) * (Z - Z[0])).real
    lo, hi = s.min(), s.max()
    slack = tol * (hi - lo)
    low = [i for i in range(Z.size) if s[i] - lo <= slack]
    high = [i for i in range(Z.size) if hi - s[i] <= slack]
    return s, low, high


def ends(Z, tol: float = DEFAULT_TOL) -> list[int]:
    """1-based labels of the vertices at either end of the segment."""
    Z = as_polypoint(Z)
    _, low, high = _end_sets(Z, tol)
    return sorted(i + 1 for i in set(low) | set(high))


def normalize_ends(Z, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Affine representative of ``Z`` with its ends at 0 and 1.

    Of the two representatives, the one sending the least-labelled end to 0 is
    returned; the other end is the least-labelled vertex at the opposite side.
    """
    Z = as_polypoint(Z)
    _, low, high = _end_sets(Z, tol)
    zero_end, one_end = (low[0], high[0]) if low[0] < high[0] else (high[0], low[0])
    W = (Z - Z[zero_end]) / (Z[one_end] - Z[zero_end])
    return W.real.astype(complex)


@dataclass(frozen=True, eq=False)
class ChartCoord:
    """Coordinates in the chart U_k (space ``M``) or its translate (space ``L``).

    For ``M`` the coordinates are (r_2, ..., r_{k-1}, x, y, r_{k+1}, ..., r_n);
    for ``L`` the pair (u, v) of the translation b = u + iv is appended.
    """

    k: int
    coords: np.ndarray
    space: Space = "M"

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        if self.space not in ("M", "L"):
            raise ValueError(f"space must be 'M' or 'L', got {self.space!r}")
        if self.n < 3 or not np.all(np.isfinite(c)):
            raise ValueError("chart coordinates must be finite with n >= 3")
        if not 2 <= self.k <= self.n:
            raise ValueError(f"chart index k={self.k} outside 2..{self.n}")
        if self.z == 0:
            raise ChartDomainError("chart coordinate z = x + iy must be nonzero")

    @property
    def n(self) -> int:
        return self.coords.size - (2 if self.space == "L" else 0)

    @property
    def z(self) -> complex:
        return complex(self.coords[self.k - 2], self.coords[self.k - 1])

    @property
    def profile(self) -> np.ndarray:
        """Real vector (0, r_2, ..., 1, ..., r_n) with the 1 at vertex k."""
        n, k, c = self.n, self.k, self.coords
        p = np.zeros(n)
        p[1 : k - 1] = c[: k - 2]
        p[k - 1] = 1.0
        p[k:n] = c[k:n]
        return p

    @property
    def translation(self) -> complex:
        if self.space == "M":
            return 0j
        return complex(self.coords[-2], self.coords[-1])


def chart_to_point(c: ChartCoord) -> np.ndarray:
    z = c.z
    if z == 0:
        raise ChartDomainError("chart coordinate z must be nonzero")
    return z * c.profile + c.translation


def admissible_charts(Z, tol: float = DEFAULT_TOL) -> list[int]:
    """Chart indices k (2..n) with nonzero k-th vertex relative to z_1."""
    Z = as_polypoint(Z)
    W = Z - Z[0]
    scale = _scale(W)
    return [k for k in range(2, Z.size + 1) if scale > 0 and abs(W[k - 1]) > tol * scale]


def best_chart(Z, tol: float = DEFAULT_TOL) -> int:
    """Admissible chart whose pivot vertex is farthest from z_1 (best conditioned)."""
    Z = as_polypoint(Z)
    W = np.abs(Z - Z[0])
    if _scale(Z - Z[0]) == 0:
        raise ChartDomainError("diagonal point lies in no chart")
    return int(np.argmax(W[1:])) + 2


def point_to_chart(Z, k: int, space: Space = "M", tol: float = DEFAULT_TOL) -> ChartCoord:
    Z = as_polypoint(Z)
    n = Z.size
    if not 2 <= k <= n:
        raise ValueError(f"chart index k={k} outside 2..{n}")
    if space == "M":
        if not in_M(Z, tol):
            raise MembershipError("point is not in M(n)")
        W, b = Z, 0j
    else:
        if not in_L(Z, tol):
            raise MembershipError("point is not in L(n)")
        W, b = split_L(Z, tol)
    z = W[k - 1]
    if abs(z) <= tol * _scale(W):
        raise ChartDomainError(
            f"vertex {k} coincides with vertex 1; point is outside chart U_{k}",
            admissible_charts(Z, tol),
        )
    r = (W / z).real
    coords = np.concatenate([r[1 : k - 1], [z.real, z.imag], r[k:n]])
    if space == "L":
        coords = np.concatenate([coords, [b.real, b.imag]])
    return ChartCoord(k, coords, space)


# -- sampling helpers --------------------------------------------------------


def random_M(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random point of M(n): e^{i theta} X with Gaussian X and uniform theta."""
    X = rng.standard_normal(n - 1)
    return np.concatenate([[0j], cmath.exp(1j * rng.uniform(0, 2 * math.pi)) * X])


def random_L(rng: np.random.Generator, n: int) -> np.ndarray:
    b = complex(*rng.standard_normal(2))
    return random_M(rng, n) + b


# -- JSON --------------------------------------------------------------------


def polypoint_to_dict(Z) -> dict:
    Z = as_polypoint(Z)
    return {"n": int(Z.size), "vertices": [[float(z.real), float(z.imag)] for z in Z]}


def polypoint_from_dict(data: dict) -> np.ndarray:
    try:
        vertices = data["vertices"]
        Z = np.array([complex(float(re), float(im)) for re, im in vertices])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed polygon record: {exc}") from exc
    if "n" in data and int(data["n"]) != Z.size:
        raise ValueError(f"declared n={data['n']} but {Z.size} vertices given")
    return as_polypoint(Z)


def dumps_polypoint(Z) -> str:
    return json.dumps(polypoint_to_dict(Z))


def loads_polypoint(text: str) -> np.ndarray:
    return polypoint_from_dict(json.loads(text))
