"""Tangent frames, the flat subspaces through a segment, and ruling lines.

Through every point of M(n) pass n mutually orthogonal straight lines of C^n
that stay inside M(n); through every point of L(n) pass n + 2 linearly
independent ones.  This module builds those lines explicitly, together with
the tangent frames they live in and a closed-form test of when a chord
between two points stays inside the manifold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ChartDomainError, DegenerateError, MembershipError
from .segment_core import (
    DEFAULT_TOL,
    Space,
    admissible_charts,
    as_polypoint,
    in_L,
    in_M,
    is_diagonal,
    is_n_segment,
    is_n_segment_many,
    pairing,
    polypoint_to_dict,
    segment_witness,
    split_L,
)


def gram(vectors) -> np.ndarray:
    """Gram matrix of complex vectors under the real pairing <<., .>>."""
    V = np.asarray(vectors, dtype=complex)
    R = np.hstack([V.real, V.imag])
    return R @ R.T


def as_real(vectors) -> np.ndarray:
    """Rows of complex n-vectors as rows of real 2n-vectors."""
    V = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return np.hstack([V.real, V.imag])


@dataclass(frozen=True, eq=False)
class TangentFrame:
    base: np.ndarray
    vectors: np.ndarray
    space: Space

    def gram(self) -> np.ndarray:
        return gram(self.vectors)

    def rank(self, rtol: float = 1e-10) -> int:
        s = np.linalg.svd(as_real(self.vectors), compute_uv=False)
        return int(np.sum(s > rtol * s[0]))

    def span_residual(self, direction) -> float:
        """Least-squares distance of ``direction`` from the span, relative to its norm."""
        A = as_real(self.vectors).T
        d = as_real(direction)[0]
        coef, *_ = np.linalg.lstsq(A, d, rcond=None)
        return float(np.linalg.norm(A @ coef - d) / max(np.linalg.norm(d), 1e-300))


def _chart_scale(Z: np.ndarray, k: int | None, tol: float) -> complex:
    """The complex factor zeta with Z = zeta * (0, c_2, ..., 1, ..., c_n)."""
    allowed = admissible_charts(Z, tol)
    if k is None:
        if not allowed:
            raise ChartDomainError("point lies in no chart", allowed)
        k = 2 if 2 in allowed else max(allowed, key=lambda j: abs(Z[j - 1]))
    if k not in allowed:
        raise ChartDomainError(f"point is outside chart U_{k}", allowed)
    return complex(Z[k - 1])


def tangent_basis_M(Z, k: int | None = None, tol: float = DEFAULT_TOL) -> TangentFrame:
    """Orthogonal frame {iZ, zeta e_2, ..., zeta e_n} of T_Z M(n).

    ``k`` selects the chart; by default U_2 when it contains Z, otherwise the
    chart of the vertex with largest modulus.
    """
    Z = as_polypoint(Z)
    if not in_M(Z, tol):
        raise MembershipError("point is not in M(n)")
    zeta = _chart_scale(Z, k, tol)
    n = Z.size
    E = np.zeros((n - 1, n), dtype=complex)
    E[np.arange(n - 1), np.arange(1, n)] = zeta
    return TangentFrame(Z, np.vstack([1j * Z, E]), "M")


def tangent_basis_L(Zhat, k: int | None = None, tol: float = DEFAULT_TOL) -> TangentFrame:
    """Frame {iZ, zeta e_2, ..., zeta e_n, 1, i} of T L(n) at Zhat = Z + b; not orthogonal."""
    Zhat = as_polypoint(Zhat)
    if not in_L(Zhat, tol):
        raise MembershipError("point is not in L(n)")
    Z, _ = split_L(Zhat, tol)
    frame = tangent_basis_M(Z, k, tol)
    n = Zhat.size
    ones = np.ones(n, dtype=complex)
    return TangentFrame(Zhat, np.vstack([frame.vectors, ones, 1j * ones]), "L")


# -- flat subspaces ---------------------------------------------------------

SubspaceKind = Literal["C_star", "R_nminus1", "Diagonal"]


@dataclass(frozen=True, eq=False)
class RulingSubspace:
    """One of the flat pieces through Z + b.

    * ``C_star``: lambda Z + b for lambda != 0,
    * ``R_nminus1``: zeta (0, c + x) + b for x != -c (Z = zeta (0, c)),
    * ``Diagonal``: Z + b + (w, ..., w) for any complex w.
    """

    kind: SubspaceKind
    anchor: np.ndarray
    zeta: complex
    profile: np.ndarray
    b: complex

    @property
    def excluded(self) -> str:
        return {
            "C_star": "lambda = 0",
            "R_nminus1": "x = -c (the point b)",
            "Diagonal": "none",
        }[self.kind]

    @property
    def dimension(self) -> int:
        return {"C_star": 2, "R_nminus1": self.profile.size - 1, "Diagonal": 2}[self.kind]

    def point(self, param) -> np.ndarray:
        """Point for a real parameter vector: (Re, Im) of lambda or w, or x in R^{n-1}."""
        param = np.asarray(param, dtype=float)
        Z = self.zeta * self.profile
        if self.kind == "C_star":
            return complex(*param) * Z + self.b
        if self.kind == "R_nminus1":
            return self.zeta * np.concatenate([[0.0], self.profile[1:] + param]) + self.b
        return Z + self.b + complex(*param)


def ruling_subspace(Zhat, kind: SubspaceKind, b: complex | None = None, tol: float = DEFAULT_TOL) -> RulingSubspace:
    """Flat subspace of the given kind through ``Zhat``.

    ``Zhat`` may be in M(n) (then b = 0 unless given) or in L(n) (then
    b = first vertex unless given).
    """
    Zhat = as_polypoint(Zhat)
    if b is None:
        b = complex(Zhat[0])
    Z = Zhat - b
    if not in_M(Z, tol):
        raise MembershipError("Zhat - b is not in M(n)")
    w = segment_witness(Z, tol)
    return RulingSubspace(kind, Zhat, w.direction, w.profile, complex(b))


# -- chord containment ------------------------------------------------------


def _chord_in_M(Z: np.ndarray, W: np.ndarray, tol: float) -> bool:
    a = segment_witness(Z, tol).direction
    wn = float(np.linalg.norm(W))
    in_real_copy = float(np.max(np.abs((np.conj(a) * W).imag))) <= tol * wn
    lam = np.vdot(Z, W) / np.vdot(Z, Z).real
    in_complex_copy = float(np.linalg.norm(W - lam * Z)) <= tol * wn
    on_bad_ray = in_complex_copy and abs(lam.imag) <= tol * abs(lam) and lam.real <= 0
    return (in_real_copy or in_complex_copy) and not on_bad_ray


def segment_in_manifold(Z, W, space: Space = "M", tol: float = DEFAULT_TOL) -> bool:
    """Whether the chord (1-t) Z + t W, t in [0, 1], lies in M(n) or L(n).

    In M(n) the chord stays inside exactly when W is in the real copy
    R^{n-1}_Z or the complex line C*_Z through Z, but not on the ray
    {r Z : r <= 0}.  In L(n) the same test is applied after moving the first
    vertex of each endpoint to the origin.
    """
    Z = as_polypoint(Z)
    W = as_polypoint(W)
    if Z.size != W.size:
        raise ValueError("endpoints have different numbers of vertices")
    check = in_M if space == "M" else in_L
    if not (check(Z, tol) and check(W, tol)):
        raise MembershipError(f"endpoints must lie in {space}(n)")
    if space == "L":
        Z, W = Z - Z[0], W - W[0]
    return _chord_in_M(Z, W, tol)


def segment_in_manifold_sampled(Z, W, space: Space = "M", samples: int = 64, tol: float = DEFAULT_TOL) -> bool:
    """Grid oracle for :func:`segment_in_manifold`.

    Checks collinearity at ``samples`` interior points of a uniform grid.
    Passing through the diagonal happens at isolated parameters a grid cannot
    see, so the chord's closest approach to the diagonal is computed exactly.
    """
    Z = as_polypoint(Z)
    W = as_polypoint(W)
    t = (np.arange(1, samples + 1) / (samples + 1))[:, None]
    if not np.all(is_n_segment_many((1 - t) * Z + t * W, tol)):
        return False
    PZ, PW = Z - Z.mean(), W - W.mean()
    D = PW - PZ
    dd = pairing(D, D)
    t_star = 0.0 if dd == 0 else min(max(-pairing(PZ, D) / dd, 0.0), 1.0)
    closest = float(np.linalg.norm(PZ + t_star * D))
    return bool(closest > tol * max(np.linalg.norm(PZ), np.linalg.norm(PW)))


# -- ruling lines -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Line:
    point: np.ndarray
    direction: np.ndarray

    def at(self, t: float) -> np.ndarray:
        return self.point + t * self.direction

    def to_dict(self) -> dict:
        return {
            "point": polypoint_to_dict(self.point)["vertices"],
            "direction": polypoint_to_dict(self.direction)["vertices"],
        }


def _basis_avoiding(c: np.ndarray) -> np.ndarray:
    """Orthonormal basis of R^m (columns), m >= 2, with no column parallel to ``c``.

    Gram-Schmidt completes c/|c| over the standard basis; the first two
    vectors are then rotated by 45 degrees inside their plane.
    """
    m = c.size
    vecs = [c / np.linalg.norm(c)]
    for e in np.eye(m):
        v = e - sum(np.dot(e, q) * q for q in vecs)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            vecs.append(v / nv)
        if len(vecs) == m:
            break
    Q = np.array(vecs).T
    q1, q2 = Q[:, 0].copy(), Q[:, 1].copy()
    Q[:, 0] = (q1 + q2) / math.sqrt(2)
    Q[:, 1] = (q1 - q2) / math.sqrt(2)
    return Q


def ruling_lines_M(Z, tol: float = DEFAULT_TOL) -> list[Line]:
    """n orthogonal lines through Z contained in M(n).

    n - 1 lines run inside the real copy R^{n-1}_Z and avoid the origin; the
    last one is t -> (1 + it) Z.  Directions are unit vectors.
    """
    Z = as_polypoint(Z)
    if not in_M(Z, tol):
        raise MembershipError("point is not in M(n)")
    w = segment_witness(Z, tol)
    Q = _basis_avoiding(w.profile[1:])
    lines = [Line(Z, w.direction * np.concatenate([[0.0], q])) for q in Q.T]
    lines.append(Line(Z, 1j * Z / np.linalg.norm(Z)))
    return lines


def ruling_lines_L(Zhat, tol: float = DEFAULT_TOL) -> list[Line]:
    """n + 2 linearly independent lines through Zhat contained in L(n).

    The first n + 1 are mutually orthogonal and span the real copy plus the
    diagonal directions (the last two of those are Zhat + t(1,...,1) and
    Zhat + t(i,...,i), normalised); the final line is (1 + it) Z + b.
    """
    Zhat = as_polypoint(Zhat)
    if is_n_segment(Zhat, tol) and is_diagonal(Zhat, tol):
        raise DegenerateError("a diagonal point has no ruling lines")
    if not in_L(Zhat, tol):
        raise MembershipError("point is not in L(n)")
    Z, _ = split_L(Zhat, tol)
    n = Zhat.size
    w = segment_witness(Z, tol)
    c = w.profile[1:]
    # the real copy, made orthogonal to the diagonal: q -> (0, q) - mean
    # has squared norm q^T A q with A = I - 11^T / n
    A = np.eye(n - 1) - np.ones((n - 1, n - 1)) / n
    evals, evecs = np.linalg.eigh(A)
    A_half = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    A_inv_half = evecs @ np.diag(1 / np.sqrt(evals)) @ evecs.T
    P = _basis_avoiding(A_half @ c)
    lines = []
    for p in P.T:
        q = A_inv_half @ p
        v = np.concatenate([[0.0], q]) - q.sum() / n
        lines.append(Line(Zhat, w.direction * v))
    ones = np.ones(n, dtype=complex) / math.sqrt(n)
    lines.append(Line(Zhat, ones))
    lines.append(Line(Zhat, 1j * ones))
    lines.append(Line(Zhat, 1j * Z / np.linalg.norm(Z)))
    return lines
