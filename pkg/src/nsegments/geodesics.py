"""Geodesics of the metric that M(n) and L(n) inherit from C^n.

Everything is done in the chart U_2, where a point of M(n) is

    F(x, y, r_3, ..., r_n) = (x + iy) * (0, 1, r_3, ..., r_n)

and a point of L(n) adds a translation (u + iv) * (1, ..., 1).  F is
multilinear in the chart coordinates, so its first and second partials are
exact and cheap.  A curve is a geodesic when its ambient acceleration is
normal to the manifold, which in coordinates reads

    sum_l g_kl u''^l = - << d_i d_j F u'^i u'^j , d_k F >>,

with g the induced metric.  That system is integrated with classical RK4.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ChartDomainError, ChartExit, DomainError
from .segment_core import ChartCoord, Space, chart_to_point

log = logging.getLogger(__name__)

MAX_CONDITION = 1e12


# -- embedding jet and metric ------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddingJet:
    point: ChartCoord
    value: np.ndarray
    first: np.ndarray   # (d, n): row a is dF/du^a
    second: np.ndarray  # (d, d, n)


def _r_index(m: int, k: int) -> int:
    """Coordinate slot of r_m in chart U_k (vertices are 1-based)."""
    return m - 2 if m < k else m - 1


def embedding_jet(c: ChartCoord) -> EmbeddingJet:
    n, k = c.n, c.k
    d = c.coords.size
    z, p = c.z, c.profile
    if z == 0:
        raise ChartDomainError("z = 0 is outside every chart")
    ix, iy = k - 2, k - 1
    J = np.zeros((d, n), dtype=complex)
    H = np.zeros((d, d, n), dtype=complex)
    J[ix], J[iy] = p, 1j * p
    for m in range(2, n + 1):
        if m == k:
            continue
        a = _r_index(m, k)
        J[a, m - 1] = z
        H[ix, a, m - 1] = H[a, ix, m - 1] = 1.0
        H[iy, a, m - 1] = H[a, iy, m - 1] = 1j
    if c.space == "L":
        J[-2] = 1.0
        J[-1] = 1j
    return EmbeddingJet(c, chart_to_point(c), J, H)


def _real_gram(J: np.ndarray) -> np.ndarray:
    return J.real @ J.real.T + J.imag @ J.imag.T


def induced_metric(c: ChartCoord) -> np.ndarray:
    """g_ab = << dF/du^a, dF/du^b >>; n x n on M(n), (n+2) x (n+2) on L(n)."""
    return _real_gram(embedding_jet(c).first)


# -- chart U_2 fast path -----------------------------------------------------


def _n_of(dim: int, space: Space) -> int:
    return dim if space == "M" else dim - 2


def _first_partials(u: np.ndarray, space: Space) -> np.ndarray:
    n = _n_of(u.size, space)
    z = complex(u[0], u[1])
    p = np.concatenate([[0.0, 1.0], u[2:n]])
    J = np.zeros((u.size, n), dtype=complex)
    J[0], J[1] = p, 1j * p
    J[np.arange(2, n), np.arange(2, n)] = z
    if space == "L":
        J[n], J[n + 1] = 1.0, 1j
    return J


def _quadratic_term(u: np.ndarray, du: np.ndarray, space: Space) -> np.ndarray:
    """sum_ij d_i d_j F du^i du^j = 2 z' (0, 0, r_3', ..., r_n')."""
    n = _n_of(u.size, space)
    Q = np.zeros(n, dtype=complex)
    Q[2:] = 2.0 * complex(du[0], du[1]) * du[2:n]
    return Q


def metric_condition(u, space: Space = "M") -> float:
    w = np.linalg.eigvalsh(_real_gram(_first_partials(np.asarray(u, dtype=float), space)))
    return math.inf if w[0] <= 0 else float(w[-1] / w[0])


def chart_acceleration(u, du, space: Space = "M") -> np.ndarray:
    """Chart acceleration u'' of the geodesic through (u, u')."""
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    if u[0] == 0.0 and u[1] == 0.0:
        raise ChartExit("z = 0")
    J = _first_partials(u, space)
    g = _real_gram(J)
    Q = _quadratic_term(u, du, space)
    rhs = -(J.real @ Q.real + J.imag @ Q.imag)
    return np.linalg.solve(g, rhs)


def ambient_velocity(u, du, space: Space = "M") -> np.ndarray:
    return np.asarray(du, dtype=float) @ _first_partials(np.asarray(u, dtype=float), space)


def ambient_acceleration(u, du, ddu, space: Space = "M") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.asarray(ddu, dtype=float) @ _first_partials(u, space) + _quadratic_term(u, np.asarray(du, dtype=float), space)


def ambient_point(u, space: Space = "M") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    n = _n_of(u.size, space)
    F = complex(u[0], u[1]) * np.concatenate([[0.0, 1.0], u[2:n]])
    if space == "L":
        F = F + complex(u[n], u[n + 1])
    return F


# -- trajectories --------------------------------------------------------------


@dataclass(eq=False)
class GeodesicTrajectory:
    """Sampled chart curve in U_2 with velocities, accelerations and invariants.

    ``conserved`` maps names to per-sample series: ``k0`` (squared speed),
    ``k1`` (rotational quantity), ``k3`` ... ``kn`` (one per r_j).  On L(n)
    the translation momenta ``p_re``, ``p_im`` are recorded as well.
    """

    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray
    space: Space = "M"
    halted: str | None = None
    conserved: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not self.conserved:
            self.conserved = conserved_quantities(self.u, self.du, self.space)

    @property
    def n(self) -> int:
        return _n_of(self.u.shape[1], self.space)

    @property
    def z(self) -> np.ndarray:
        return self.u[:, 0] + 1j * self.u[:, 1]

    @property
    def lam(self) -> np.ndarray | None:
        if self.space != "L":
            return None
        n = self.n
        return self.u[:, n] + 1j * self.u[:, n + 1]

    def drift(self) -> dict[str, float]:
        return {name: float(np.max(np.abs(s - s[0]))) for name, s in self.conserved.items()}

    def ambient(self) -> np.ndarray:
        return np.array([ambient_point(u, self.space) for u in self.u])

    def ambient_accelerations(self) -> np.ndarray:
        return np.array([ambient_acceleration(u, v, a, self.space) for u, v, a in zip(self.u, self.du, self.ddu)])

    def csv_header(self) -> list[str]:
        cols = ["t", "x", "y"] + [f"r{j}" for j in range(3, self.n + 1)]
        if self.space == "L":
            cols += ["u", "v"]
        return cols + ["k0", "k1"] + [f"k{j}" for j in range(3, self.n + 1)]

    def csv_rows(self):
        names = ["k0", "k1"] + [f"k{j}" for j in range(3, self.n + 1)]
        for i in range(self.t.size):
            yield [self.t[i], *self.u[i], *(self.conserved[k][i] for k in names)]


def conserved_quantities(u: np.ndarray, du: np.ndarray, space: Space = "M") -> dict[str, np.ndarray]:
    u = np.atleast_2d(u)
    du = np.atleast_2d(du)
    n = _n_of(u.shape[1], space)
    z = u[:, 0] + 1j * u[:, 1]
    dz = du[:, 0] + 1j * du[:, 1]
    r, dr = u[:, 2:n], du[:, 2:n]
    # z' . iz in the plane is Im(conj(z) z')
    rot = (1.0 + np.sum(r**2, axis=1)) * (np.conj(z) * dz).imag
    out = {
        "k0": np.array([float(np.sum(np.abs(ambient_velocity(a, b, space)) ** 2)) for a, b in zip(u, du)]),
        "k1": rot,
    }
    for j in range(3, n + 1):
        out[f"k{j}"] = dr[:, j - 3] * np.abs(z) ** 2
    if space == "L":
        vel = np.array([ambient_velocity(a, b, space).sum() for a, b in zip(u, du)])
        out["p_re"], out["p_im"] = vel.real, vel.imag
    return out


def geodesic_step(u, du, dt: float, space: Space = "M"):
    """One classical RK4 step of the first-order system (u, u')' = (u', u'')."""
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)

    def f(a, b):
        return b, chart_acceleration(a, b, space)

    k1u, k1v = f(u, du)
    k2u, k2v = f(u + 0.5 * dt * k1u, du + 0.5 * dt * k1v)
    k3u, k3v = f(u + 0.5 * dt * k2u, du + 0.5 * dt * k2v)
    k4u, k4v = f(u + dt * k3u, du + dt * k3v)
    return (
        u + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u),
        du + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def integrate_geodesic(
    position: Sequence[float],
    velocity: Sequence[float],
    T: float = 1.0,
    dt: float = 1e-3,
    space: Space = "M",
    max_condition: float = MAX_CONDITION,
) -> GeodesicTrajectory:
    """Integrate the geodesic with the given chart initial data on [0, T].

    If the curve leaves the chart (z -> 0 or the metric degenerates) the
    partial trajectory is returned with ``halted`` set to the reason.
    """
    u = np.array(position, dtype=float)
    du = np.array(velocity, dtype=float)
    expected = u.size if space == "M" else u.size - 2
    if u.shape != du.shape or expected < 3:
        raise ValueError("position and velocity must be chart vectors of matching length (n >= 3)")
    if not np.any(du):
        raise DomainError("initial velocity must be nonzero")
    if not dt > 0 or dt < 1e-14 * max(abs(T), 1.0):
        raise ValueError(f"step size {dt!r} underflows")
    steps = int(round(T / dt))
    ts, us, dus, ddus = [], [], [], []
    halted = None
    for i in range(steps + 1):
        try:
            if metric_condition(u, space) > max_condition:
                raise ChartExit(f"metric condition number above {max_condition:g}")
            acc = chart_acceleration(u, du, space)
        except (ChartExit, np.linalg.LinAlgError) as exc:
            halted = f"chart exit at t={i * dt:.6g}: {exc}"
            break
        ts.append(i * dt)
        us.append(u)
        dus.append(du)
        ddus.append(acc)
        if i == steps:
            break
        try:
            u, du = geodesic_step(u, du, dt, space)
        except (ChartExit, np.linalg.LinAlgError) as exc:
            halted = f"chart exit at t={(i + 1) * dt:.6g}: {exc}"
            break
    if halted:
        log.warning(halted)
    return GeodesicTrajectory(np.array(ts), np.array(us), np.array(dus), np.array(ddus), space, halted)


def trajectory_from_curve(t, u, du, ddu, space: Space = "M") -> GeodesicTrajectory:
    """Wrap an arbitrary sampled chart curve so the residual checks can run on it."""
    return GeodesicTrajectory(
        np.asarray(t, dtype=float),
        np.atleast_2d(np.asarray(u, dtype=float)),
        np.atleast_2d(np.asarray(du, dtype=float)),
        np.atleast_2d(np.asarray(ddu, dtype=float)),
        space,
    )


# -- residuals -------------------------------------------------------------------


@dataclass(frozen=True)
class Residuals:
    """Per-condition residual series; ``maxima`` summarises each one."""

    series: dict[str, np.ndarray]
    display_check: dict[str, float] = field(default_factory=dict)

    @property
    def maxima(self) -> dict[str, float]:
        return {k: float(np.max(np.abs(v))) if v.size else 0.0 for k, v in self.series.items()}

    def worst(self) -> float:
        return max(self.maxima.values())

    def passed(self, tol: float) -> bool:
        return self.worst() <= tol


def _planar_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.real * b.real + a.imag * b.imag


def residuals_M(traj: GeodesicTrajectory) -> Residuals:
    """Deviation of a chart curve in M(n) from each geodesic condition.

    * ``I``: drift of the rotational quantity (1 + sum r_j^2)(z' . iz) from its start value,
    * ``II``: z'' . z pointwise,
    * ``III``: r_j' |z|^2 from start values (all j pooled),
    * ``IV``: squared speed from its start value,
    * ``IV_z``: |z'|^2 against (k0 - sum k_j (r_j/r_j')' r_j') / (1 + sum r_j^2),
    * ``normal``: largest << gamma'', v >> / |v| over the frame {i gamma, z e_2, ..., z e_n}.

    Accelerations are the stored ones, never differences of the samples.
    """
    if traj.space != "M":
        raise ValueError("residuals_M needs a trajectory in M(n)")
    n = traj.n
    c = traj.conserved
    z = traj.z
    dz = traj.du[:, 0] + 1j * traj.du[:, 1]
    ddz = traj.ddu[:, 0] + 1j * traj.ddu[:, 1]
    r, dr, ddr = traj.u[:, 2:n], traj.du[:, 2:n], traj.ddu[:, 2:n]

    series = {
        "I": c["k1"] - c["k1"][0],
        "II": _planar_dot(ddz, z),
        "III": np.concatenate([c[f"k{j}"] - c[f"k{j}"][0] for j in range(3, n + 1)]) if n > 2 else np.zeros(0),
        "IV": c["k0"] - c["k0"][0],
    }

    k0 = c["k0"][0]
    corr = np.zeros(traj.t.size)
    for j in range(3, n + 1):
        kj = c[f"k{j}"][0]
        rp, rpp, rj = dr[:, j - 3], ddr[:, j - 3], r[:, j - 3]
        ok = np.abs(rp) > 1e-14
        term = np.zeros_like(rp)
        term[ok] = kj * (rp[ok] ** 2 - rj[ok] * rpp[ok]) / rp[ok]
        corr += term
    series["IV_z"] = np.abs(dz) ** 2 - (k0 - corr) / (1.0 + np.sum(r**2, axis=1))

    normal = np.zeros(traj.t.size)
    for i in range(traj.t.size):
        acc = ambient_acceleration(traj.u[i], traj.du[i], traj.ddu[i], "M")
        gamma = ambient_point(traj.u[i], "M")
        frame = [1j * gamma] + [z[i] * np.eye(n)[m] for m in range(1, n)]
        normal[i] = max(abs(_planar_dot(acc, v).sum()) / np.linalg.norm(v) for v in frame)
    series["normal"] = normal
    return Residuals(series)


def residuals_L(traj: GeodesicTrajectory) -> Residuals:
    """Geodesic conditions on L(n) evaluated as << gamma^'', v_j >> for the frame.

    The frame is {i gamma, z e_2, ..., z e_n, 1, i} with gamma the M(n) part.
    Series: ``I'`` (i gamma), ``II'`` (z e_2), ``III'`` (z e_j, j >= 3, pooled),
    ``IV'`` (1 and i, pooled), ``V'`` (squared speed from start).

    ``display_check`` compares the expanded scalar forms of these conditions,
    as usually written in terms of z, r_j and lambda, against the definitional
    values; a large entry flags an expansion that does not match.
    """
    if traj.space != "L":
        raise ValueError("residuals_L needs a trajectory in L(n)")
    n = traj.n
    N = traj.t.size
    z = traj.z
    dz = traj.du[:, 0] + 1j * traj.du[:, 1]
    ddz = traj.ddu[:, 0] + 1j * traj.ddu[:, 1]
    r, dr, ddr = traj.u[:, 2:n], traj.du[:, 2:n], traj.ddu[:, 2:n]
    dlam = traj.du[:, n] + 1j * traj.du[:, n + 1]
    ddlam = traj.ddu[:, n] + 1j * traj.ddu[:, n + 1]

    I_, II_, III_, IV_ = np.zeros(N), np.zeros(N), np.zeros((N, max(n - 2, 0))), np.zeros((N, 2))
    speed = np.zeros(N)
    eq12_def = np.zeros((N, max(n - 2, 0)))
    total_acc = np.zeros(N, dtype=complex)
    for i in range(N):
        acc = ambient_acceleration(traj.u[i], traj.du[i], traj.ddu[i], "L")
        vel = ambient_velocity(traj.u[i], traj.du[i], "L")
        gamma = ambient_point(traj.u[i][:n], "M")
        I_[i] = _planar_dot(acc, 1j * gamma).sum()
        II_[i] = _planar_dot(acc[1], z[i])
        for j in range(3, n + 1):
            III_[i, j - 3] = _planar_dot(acc[j - 1], z[i])
            eq12_def[i, j - 3] = III_[i, j - 3] - II_[i]
        total_acc[i] = acc.sum()
        IV_[i] = total_acc[i].real, total_acc[i].imag
        speed[i] = np.sum(np.abs(vel) ** 2)

    series = {
        "I'": I_,
        "II'": II_,
        "III'": III_.ravel(),
        "IV'": IV_.ravel(),
        "V'": speed - speed[0],
    }

    # expanded forms of the same conditions
    sr, sr2 = np.sum(r, axis=1), np.sum(r**2, axis=1)
    srr1 = np.sum(r * dr, axis=1)
    eq_I = _planar_dot((1 + sr2) * ddz + 2 * srr1 * dz + (1 + sr) * ddlam, 1j * z)
    eq_II = _planar_dot(ddz, z) + _planar_dot(ddlam, z)
    eq_III = np.stack(
        [_planar_dot(z, ddr[:, j] * z + 2 * dr[:, j] * dz + (r[:, j] - 1) * ddz) for j in range(n - 2)], axis=1
    ) if n > 2 else np.zeros((N, 0))
    eq_IV = (1 + sr) * ddz + 2 * np.sum(dr, axis=1) * dz + np.sum(ddr, axis=1) * z + n * ddlam
    gamma_speed = np.sum(dr**2, axis=1) * np.abs(z) ** 2 + 2 * np.sum(dr * r, axis=1) * _planar_dot(z, dz) + (1 + sr2) * np.abs(dz) ** 2
    eq_V = gamma_speed + np.sum(dr, axis=1) * _planar_dot(z, dlam) + (1 + sr) * _planar_dot(dz, dlam) + n * np.abs(dlam) ** 2
    display = {
        "I'": float(np.max(np.abs(eq_I - I_))),
        "II'": float(np.max(np.abs(eq_II - II_))),
        "III'": float(np.max(np.abs(eq_III - eq12_def))) if n > 2 else 0.0,
        "IV'": float(np.max(np.abs(eq_IV - total_acc))),
        "V'": float(np.max(np.abs(eq_V - speed))),
    }
    return Residuals(series, display)


# -- classification --------------------------------------------------------------


def is_straight(traj: GeodesicTrajectory, tol: float = 1e-9) -> bool:
    """Ambient acceleration (from the stored chart accelerations) vanishes."""
    acc = traj.ambient_accelerations()
    scale = max(float(np.max(traj.conserved["k0"])), 1e-300)
    return float(np.max(np.abs(acc))) <= tol * scale


# -- lifting ---------------------------------------------------------------------


@dataclass(frozen=True)
class LiftSpec:
    """Coefficients a_j and assignments s_j (j = 3..n) of a lift from M(3).

    ``follows_r[j-3]`` is True when s_j = r(t), False when s_j = 1.
    """

    amplitudes: tuple[float, ...]
    follows_r: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "follows_r", tuple(bool(s) for s in self.follows_r))
        if len(self.amplitudes) != len(self.follows_r):
            raise ValueError("amplitudes and assignments differ in length")

    @property
    def n(self) -> int:
        return len(self.amplitudes) + 2

    @property
    def constant_part(self) -> float:
        return 1.0 + sum(a * a for a, s in zip(self.amplitudes, self.follows_r) if not s)

    @property
    def following_part(self) -> float:
        return sum(a * a for a, s in zip(self.amplitudes, self.follows_r) if s)


def check_lift_condition(spec: LiftSpec, tol: float = 1e-12) -> bool:
    """1 + sum_{s_j = 1} a_j^2 == sum_{s_j = r} a_j^2, up to ``tol`` (relative)."""
    A, B = spec.constant_part, spec.following_part
    return abs(A - B) <= tol * max(A, B, 1.0)


def lift_M3_to_Mn(beta: GeodesicTrajectory, spec: LiftSpec, tol: float = 1e-7) -> GeodesicTrajectory:
    """The curve z(t) (0, 1, a_3 s_3(t), ..., a_n s_n(t)) built from beta = z (0, 1, r).

    Accelerations are carried over from beta, so the residual checks on the
    result test the lift itself, not a re-integration.
    """
    if beta.space != "M" or beta.n != 3:
        raise ValueError("beta must be a trajectory in M(3)")
    worst = residuals_M(beta).worst()
    if worst > tol:
        raise DomainError(f"beta is not a geodesic (residual {worst:.3g} > {tol:g})")
    if is_straight(beta):
        raise DomainError("beta is a straight line; the lift needs a curved geodesic")
    a = np.array(spec.amplitudes)
    follow = np.array(spec.follows_r)
    r, dr, ddr = beta.u[:, 2:3], beta.du[:, 2:3], beta.ddu[:, 2:3]
    ones = np.ones_like(r)
    u = np.hstack([beta.u[:, :2], a * np.where(follow, r, ones)])
    du = np.hstack([beta.du[:, :2], a * np.where(follow, dr, 0 * ones)])
    ddu = np.hstack([beta.ddu[:, :2], a * np.where(follow, ddr, 0 * ones)])
    return GeodesicTrajectory(beta.t.copy(), u, du, ddu, "M")


@dataclass(frozen=True)
class LiftVerdict:
    trajectory: GeodesicTrajectory
    verdict: bool            # from the criterion on gamma and lambda
    residual_verdict: bool   # from the L(n) residuals of the lifted curve
    lambda_affine: bool
    normal_sum: float        # max |<<gamma'', 1>>| and |<<gamma'', i>>| along gamma
    residuals: Residuals

    @property
    def agree(self) -> bool:
        return self.verdict == self.residual_verdict


def lift_M_to_L(gamma: GeodesicTrajectory, lam_coeffs: Sequence[complex], tol: float = 1e-7) -> LiftVerdict:
    """gamma + lambda(t)(1, ..., 1) for a polynomial lambda (coefficients low to high).

    The criterion says this is a geodesic of L(n) exactly when lambda'' = 0
    and gamma'' is orthogonal to (1, ..., 1) and (i, ..., i); the verdict of
    that criterion is returned next to the verdict of the direct residuals.
    """
    if gamma.space != "M":
        raise ValueError("gamma must be a trajectory in M(n)")
    coeffs = np.asarray(lam_coeffs, dtype=complex)
    poly = np.polynomial.Polynomial(coeffs)
    d1, d2 = poly.deriv(1), poly.deriv(2)
    t = gamma.t
    lam, dlam, ddlam = poly(t), d1(t), d2(t)
    u = np.hstack([gamma.u, np.column_stack([lam.real, lam.imag])])
    du = np.hstack([gamma.du, np.column_stack([dlam.real, dlam.imag])])
    ddu = np.hstack([gamma.ddu, np.column_stack([ddlam.real, ddlam.imag])])
    lifted = GeodesicTrajectory(t.copy(), u, du, ddu, "L")

    scale = max(1.0, float(np.max(np.abs(coeffs))))
    affine = bool(np.all(np.abs(coeffs[2:]) <= tol * scale))
    sums = np.array([ambient_acceleration(a, b, c, "M").sum() for a, b, c in zip(gamma.u, gamma.du, gamma.ddu)])
    normal_sum = float(max(np.max(np.abs(sums.real)), np.max(np.abs(sums.imag))))
    verdict = affine and normal_sum <= tol
    res = residuals_L(lifted)
    return LiftVerdict(lifted, verdict, res.passed(tol), affine, normal_sum, res)


# -- survey ----------------------------------------------------------------------


def random_initial(rng: np.random.Generator, n: int, space: Space = "M", speed: float = 1.0):
    """Chart initial data with |z| in [0.5, 1.5] and Gaussian r_j and velocity."""
    rho = rng.uniform(0.5, 1.5)
    phi = rng.uniform(0, 2 * math.pi)
    u = np.concatenate([[rho * math.cos(phi), rho * math.sin(phi)], rng.standard_normal(n - 2)])
    if space == "L":
        u = np.concatenate([u, rng.standard_normal(2)])
    v = rng.standard_normal(u.size)
    return u, speed * v / np.linalg.norm(v)


def geodesic_survey(
    space: Space = "M",
    n: int = 3,
    trials: int = 10,
    T: float = 1.0,
    dt: float = 1e-3,
    seed: int = 0,
    speed: float = 1.0,
    straight_tol: float = 1e-9,
    richardson: bool = False,
) -> dict:
    """Integrate ``trials`` random geodesics and classify them as straight or curved.

    Curved geodesics are the norm; the survey records how many there are and
    how well the invariants hold.  Trials that leave the chart are counted
    but kept out of ``max_drift``.  With ``richardson`` every trial is rerun at
    dt/2 and the drift ratio is reported (about 16 for a 4th order scheme).
    """
    rng = np.random.default_rng(seed)
    per_trial = []
    for i in range(trials):
        u0, v0 = random_initial(rng, n, space, speed)
        traj = integrate_geodesic(u0, v0, T, dt, space)
        drift = traj.drift()
        entry = {
            "trial": i,
            "seed": seed,
            "classification": "straight" if is_straight(traj, straight_tol) else "curved",
            "halted": traj.halted,
            "drift": drift,
        }
        if richardson:
            fine = integrate_geodesic(u0, v0, T, dt / 2, space)
            fdrift = fine.drift()
            entry["drift_half_step"] = fdrift
            entry["drift_ratio"] = {
                k: (drift[k] / fdrift[k] if fdrift[k] > 0 else math.inf) for k in drift
            }
        per_trial.append(entry)
    completed = [e for e in per_trial if e["halted"] is None]
    names = per_trial[0]["drift"].keys() if per_trial else []
    return {
        "space": space,
        "n": n,
        "trials": trials,
        "T": T,
        "dt": dt,
        "seed": seed,
        "counts": {
            "straight": sum(e["classification"] == "straight" for e in per_trial),
            "curved": sum(e["classification"] == "curved" for e in per_trial),
            "halted": sum(e["halted"] is not None for e in per_trial),
        },
        "max_drift": {k: max((e["drift"][k] for e in completed), default=0.0) for k in names},
        "per_trial": per_trial,
    }
