"""Symmetry of vertex relabelling on segments with ends at 0 and 1.

Cyclically relabelling the vertices acts on R^{n-1} through an integer matrix
M of order n.  M is conjugate to a block rotation R_n, and the quotient of
the unit sphere by <R_n, -I> is the space of unlabelled segments.  This
module computes the linear algebra behind that picture: the matrix, its
characteristic polynomial, eigenvectors, the rotation form, the group, the
fixed sets of powers of R_n and the resulting stratification.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import ConstructionError, DomainError

KERNEL_RTOL = 1e-8
CONJUGATION_TOL = 1e-10


def _check_n(n: int, low: int = 3) -> int:
    if int(n) != n or n < low:
        raise DomainError(f"n must be an integer >= {low}, got {n!r}")
    return int(n)


# -- exact integer part ------------------------------------------------------


def _int_matmul(A, B):
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def _int_identity(m):
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


@dataclass(frozen=True)
class ShiftMatrix:
    n: int
    entries: tuple[tuple[int, ...], ...]

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def power(self, k: int):
        m = len(self.entries)
        out, base = _int_identity(m), self.entries
        while k:
            if k & 1:
                out = _int_matmul(out, base)
            base = _int_matmul(base, base)
            k >>= 1
        return out


def shift_matrix(n: int) -> ShiftMatrix:
    """Matrix of (x_2, ..., x_n) -> (x_3 - x_2, ..., x_n - x_2, -x_2)."""
    n = _check_n(n)
    m = n - 1
    rows = []
    for i in range(m):
        row = [0] * m
        row[0] = -1
        if i < m - 1:
            row[i + 1] += 1
        rows.append(tuple(row))
    M = ShiftMatrix(n, tuple(rows))
    if M.power(n) != _int_identity(m):
        raise ConstructionError(f"shift matrix for n={n} does not have order n")
    return M


def _poly_mul_linear(p, c):
    """(x - c) * p, coefficients highest degree first."""
    out = list(p) + [0]
    for i, a in enumerate(p):
        out[i + 1] -= c * a
    return out


def _poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    q = [0] * (len(p) - len(q)) + list(q)
    return [a + b for a, b in zip(p, q)]


def char_poly(M) -> list[int]:
    """Exact characteristic polynomial det(xI - M), highest degree first.

    Uses the division-free recursion for Hessenberg matrices, so every
    intermediate is an integer.  Accepts a ShiftMatrix or any square integer
    matrix in upper or lower Hessenberg form.
    """
    A = [list(r) for r in (M.entries if isinstance(M, ShiftMatrix) else M)]
    m = len(A)
    if any(len(r) != m for r in A):
        raise ValueError("matrix must be square")
    upper = all(A[i][j] == 0 for i in range(m) for j in range(i - 1))
    lower = all(A[i][j] == 0 for i in range(m) for j in range(i + 2, m))
    if not upper:
        if not lower:
            raise ValueError("matrix is not in Hessenberg form")
        A = [list(c) for c in zip(*A)]
    polys = [[1]]
    for k in range(m):
        p = _poly_mul_linear(polys[k], A[k][k])
        prod = 1
        for i in range(k - 1, -1, -1):
            prod *= A[i + 1][i]
            if A[i][k] and prod:
                term = [-(A[i][k] * prod) * c for c in polys[i]]
                p = _poly_add(p, term)
        polys.append(p)
    return [int(c) for c in polys[m]]


# -- eigenstructure and rotation form ---------------------------------------


@dataclass(frozen=True, eq=False)
class EigenData:
    n: int
    eigenvalues: np.ndarray
    vectors: np.ndarray  # column k-1 is B_k
    residuals: np.ndarray  # ||M B_k - lambda_k B_k|| / ||B_k||


def eigen_pairs(n: int) -> EigenData:
    n = _check_n(n)
    M = shift_matrix(n).array()
    ks = np.arange(1, n)
    ms = np.arange(1, n)
    lam = np.exp(2j * np.pi * ks / n)
    B = np.exp(2j * np.pi * np.outer(ms, ks) / n) - 1.0
    res = np.linalg.norm(M @ B - B * lam, axis=0) / np.linalg.norm(B, axis=0)
    return EigenData(n, lam, B, res)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_matrix(n: int) -> np.ndarray:
    """Block-diagonal R_n: R_{2 pi m / n} for m = 1 .. floor((n-1)/2), then -1 if n is even."""
    n = _check_n(n)
    R = np.zeros((n - 1, n - 1))
    for m in range(1, (n - 1) // 2 + 1):
        i = 2 * (m - 1)
        R[i:i + 2, i:i + 2] = rotation(2 * math.pi * m / n)
    if n % 2 == 0:
        R[-1, -1] = -1.0
    return R


def _basis(n: int, offset: float) -> np.ndarray:
    B = eigen_pairs(n).vectors
    cols = []
    for j in range(1, (n - 1) // 2 + 1):
        cols += [B[:, j - 1].real, -B[:, j - 1].imag - offset]
    if n % 2 == 0:
        cols.append(-B[:, n // 2 - 1].real)
    return np.column_stack(cols)


def _conjugation_residual(M, B, R) -> float:
    MB = M @ B
    return float(np.linalg.norm(B @ R - MB) / np.linalg.norm(MB))


@dataclass(frozen=True, eq=False)
class RotationNormalForm:
    """R = B^{-1} M B.

    ``literal_residual`` is the same residual for the variant whose sine
    columns carry an extra -1 offset in every entry; ``literal_conjugates``
    says whether that variant passes the tolerance too.
    """

    n: int
    R: np.ndarray
    B: np.ndarray
    residual: float
    literal_residual: float

    @property
    def literal_conjugates(self) -> bool:
        return self.literal_residual <= CONJUGATION_TOL


def rotation_form(n: int) -> RotationNormalForm:
    n = _check_n(n)
    M = shift_matrix(n).array()
    R = rotation_matrix(n)
    B = _basis(n, 0.0)
    res = _conjugation_residual(M, B, R)
    if not res <= CONJUGATION_TOL:
        raise ConstructionError(f"B R != M B for n={n}: relative residual {res:.3g}")
    lit = _conjugation_residual(M, _basis(n, 1.0), R)
    return RotationNormalForm(n, R, B, res, lit)


# -- the group <R_n, -I> ------------------------------------------------------


def _key(A: np.ndarray) -> bytes:
    return (np.round(A, 8) + 0.0).tobytes()  # + 0.0 folds -0.0 into 0.0


def enumerate_group(generators, cap: int) -> list[np.ndarray]:
    """All products of the generators (finite orthogonal group); identity first."""
    dim = generators[0].shape[0]
    identity = np.eye(dim)
    elems = [identity]
    seen = {_key(identity)}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                gh = g @ h
                key = _key(gh)
                if key not in seen:
                    seen.add(key)
                    elems.append(gh)
                    nxt.append(gh)
                    if len(elems) > cap:
                        raise ConstructionError(f"group exceeds {cap} elements")
        frontier = nxt
    return elems


def element_order(g: np.ndarray, cap: int, tol: float = 1e-9) -> int:
    identity = np.eye(g.shape[0])
    p = g.copy()
    for k in range(1, cap + 1):
        if np.max(np.abs(p - identity)) <= tol:
            return k
        p = p @ g
    raise ConstructionError(f"element order exceeds {cap}")


def group_structure(n: int) -> dict:
    """Order of <R_n, -I>, whether it is cyclic, and a generator when it is."""
    n = _check_n(n)
    R = rotation_matrix(n)
    nu = -np.eye(n - 1)
    cap = 8 * n
    elems = enumerate_group([R, nu], cap)
    order = len(elems)
    generator = None
    if n % 2 == 1 and element_order(nu @ R, cap) == order:
        generator = "nu R_n"
    else:
        for g in elems:
            if element_order(g, cap) == order:
                generator = "other"
                break
    powers = {_key(np.linalg.matrix_power(R, k)) for k in range(n)}
    return {
        "n": n,
        "order": order,
        "cyclic": generator is not None,
        "generator": generator,
        "order_of_nu_R": element_order(nu @ R, cap),
        "nu_in_R_subgroup": _key(nu) in powers,
    }


# -- lens spaces --------------------------------------------------------------


@dataclass(frozen=True)
class LensParams:
    q: int
    p: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if self.q < 1:
            raise ValueError("q must be positive")
        if self.p and reduce(math.gcd, self.p, self.q) != 1:
            raise ValueError(f"gcd{(*self.p, self.q)} != 1")

    @property
    def free(self) -> bool:
        return all(math.gcd(x, self.q) == 1 for x in self.p)

    def __str__(self):
        return f"L_{self.q}({','.join(map(str, self.p))})"


def _pair_phases(A: np.ndarray) -> list[float]:
    """Rotation angle of each 2x2 diagonal block, acting on x + iy."""
    return [math.atan2(A[i + 1, i], A[i, i]) % (2 * math.pi) for i in range(0, A.shape[0] - 1, 2)]


def lens_params_odd(n: int, tol: float = 1e-12) -> LensParams:
    """q = 2n and p = (n+2, n+4, ..., 2n-1), checked against the blocks of -R_n."""
    n = _check_n(n)
    if n % 2 == 0:
        raise DomainError(f"n must be odd, got {n}")
    q = 2 * n
    p = tuple(n + 2 * k for k in range(1, (n - 1) // 2 + 1))
    G = -rotation_matrix(n)
    phases = _pair_phases(G)
    expected = [2 * math.pi * x / q for x in p]
    if any(abs(a - b) > tol for a, b in zip(phases, expected)):
        raise ConstructionError(f"block phases of -R_{n} do not match {p}")
    if np.any(np.abs(G - _blocks(phases)) > tol):
        raise ConstructionError("-R_n is not block diagonal")
    return LensParams(q, p)


def _blocks(phases) -> np.ndarray:
    m = len(phases)
    out = np.zeros((2 * m, 2 * m))
    for i, t in enumerate(phases):
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rotation(t)
    return out


def eigenphases(A: np.ndarray) -> np.ndarray:
    return np.sort(np.angle(np.linalg.eigvals(A)) % (2 * math.pi))


# -- fixed sets -----------------------------------------------------------------


def kernel_dim(A: np.ndarray, rtol: float = KERNEL_RTOL) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s <= rtol * max(1.0, s[0] if s.size else 0.0)))


def kernel_basis(A: np.ndarray, rtol: float = KERNEL_RTOL) -> np.ndarray:
    _, s, vt = np.linalg.svd(A)
    keep = s <= rtol * max(1.0, s[0])
    return vt[keep].T


def block_count_dims(n: int, j: int) -> tuple[int, int]:
    """(dim ker(R_n^j - I), dim ker(R_n^j + I)) by counting blocks of R_n^j."""
    k = n // j
    plus = minus = 0
    for m in range(1, (n - 1) // 2 + 1):
        if m % k == 0:
            plus += 2
        elif k % 2 == 0 and m % k == k // 2:
            minus += 2
    if n % 2 == 0:
        if j % 2 == 0:
            plus += 1
        else:
            minus += 1
    return plus, minus


def kernel_dims(n: int, j: int, rtol: float = KERNEL_RTOL) -> tuple[int, int]:
    P = np.linalg.matrix_power(rotation_matrix(n), j)
    eye = np.eye(n - 1)
    return kernel_dim(P - eye, rtol), kernel_dim(P + eye, rtol)


def _sphere(d: int) -> str | None:
    return f"S^{d - 1}" if d > 0 else None


# symbolic quotient descriptions


@dataclass(frozen=True)
class ScriptL:
    """The unlabelled-segment space of a given size."""

    j: int


@dataclass(frozen=True)
class Lens:
    q: int
    p: tuple[int, ...]


@dataclass(frozen=True)
class ConeQuotient:
    """Closed cone over ``base`` with ([X],1) ~ ([-X],1) at the apex end."""

    base: Lens


@dataclass(frozen=True)
class Union:
    parts: tuple


KNOWN = {1: None, 2: "{1}", 3: "S^1", 4: "D^2"}


def render(expr, substitute: bool = True) -> str | None:
    """Text form of a quotient expression; None for the empty set."""
    if isinstance(expr, ScriptL):
        if substitute:
            if expr.j in KNOWN:
                return KNOWN[expr.j]
            if expr.j == 5:
                return render(Lens(10, (7, 9)))
        return f"L({expr.j})"
    if isinstance(expr, Lens):
        if not expr.p:
            return None
        if len(expr.p) == 1:
            return "S^1"
        if len(expr.p) == 2 and LensParams(expr.q, expr.p).free:
            p1, p2 = expr.p
            return f"L({expr.q},{p2 * pow(p1, -1, expr.q) % expr.q})"
        return f"L_{expr.q}({','.join(map(str, expr.p))})"
    if isinstance(expr, ConeQuotient):
        base = render(expr.base, substitute)
        return "{1}" if base is None else f"(C_{{{base}}}/{{([X],1)~([-X],1)}})"
    if isinstance(expr, Union):
        parts = [s for s in (render(p, substitute) for p in expr.parts) if s is not None]
        return " ∪ ".join(parts) if parts else None
    raise TypeError(f"not a quotient expression: {expr!r}")


def expression_dict(expr):
    if isinstance(expr, ScriptL):
        return {"op": "unlabelled_space", "j": expr.j}
    if isinstance(expr, Lens):
        return {"op": "lens", "q": expr.q, "p": list(expr.p)}
    if isinstance(expr, ConeQuotient):
        return {"op": "cone_antipodal_quotient", "base": expression_dict(expr.base)}
    return {"op": "union", "parts": [expression_dict(p) for p in expr.parts]}


def quotient_expression(n: int, j: int):
    k = n // j
    if k % 2 == 1:
        return ScriptL(j)
    if j % 2 == 0:
        return Union((ScriptL(j), Lens(2 * j, tuple(range(1, j, 2)))))
    return Union((ScriptL(j), ConeQuotient(Lens(j, tuple(range(1, j - 1, 2))))))


@dataclass(frozen=True)
class Stratum:
    n: int
    j: int
    dim_plus: int
    dim_minus: int
    quotient: object = field(compare=False)

    @property
    def k(self) -> int:
        return self.n // self.j

    @property
    def empty(self) -> bool:
        return self.dim_plus == 0 and self.dim_minus == 0

    @property
    def spheres(self) -> str:
        parts = [s for s in (_sphere(self.dim_plus), _sphere(self.dim_minus)) if s]
        return " ∪ ".join(parts) if parts else "∅"

    @property
    def quotient_label(self) -> str:
        return render(self.quotient) or "∅"

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "dim_plus": self.dim_plus,
            "dim_minus": self.dim_minus,
            "spheres": self.spheres,
            "quotient": self.quotient_label,
            "quotient_unsubstituted": render(self.quotient, substitute=False) or "∅",
            "quotient_tree": expression_dict(self.quotient),
        }


def proper_divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


def fixed_sets(n: int, j: int) -> Stratum:
    """Fixed set of R_n^j up to sign, with dimensions from two independent counts."""
    n = _check_n(n)
    if j not in proper_divisors(n):
        raise DomainError(f"{j} is not a proper divisor of {n}")
    numeric = kernel_dims(n, j)
    counted = block_count_dims(n, j)
    if numeric != counted:
        raise ConstructionError(f"n={n}, j={j}: kernel dims {numeric} != block count {counted}")
    return Stratum(n, j, *counted, quotient_expression(n, j))


def containment_residual(n: int, m: int, j: int) -> float:
    """How far the +-fixed spaces of R^m are from lying in those of R^j (m | j)."""
    if j % m:
        raise DomainError(f"{m} does not divide {j}")
    R = rotation_matrix(n)
    eye = np.eye(n - 1)
    Pm, Pj = np.linalg.matrix_power(R, m), np.linalg.matrix_power(R, j)
    worst = 0.0
    for sign in (1, -1):
        V = kernel_basis(Pm - sign * eye)
        if V.size == 0:
            continue
        target = sign ** (j // m)
        worst = max(worst, float(np.max(np.abs((Pj - target * eye) @ V))))
    return worst


@dataclass(frozen=True)
class Stratification:
    n: int
    strata: tuple[Stratum, ...]
    edges: tuple[tuple[int, int], ...]
    note: str = ""

    @property
    def top_label(self) -> str:
        return render(ScriptL(self.n))

    @property
    def nodes(self) -> list[int]:
        return [s.j for s in self.strata] + [self.n]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "strata": [s.to_dict() for s in self.strata],
            "top": {"j": self.n, "dim_plus": self.n - 1, "dim_minus": 0, "spheres": f"S^{self.n - 2}", "quotient": self.top_label},
            "edges": [list(e) for e in self.edges],
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_dot(self) -> str:
        lines = [f"digraph strata_{self.n} {{", "  rankdir=BT;", "  node [shape=box];"]
        if self.note:
            lines.append(f'  label="{self.note}";')
        for s in self.strata:
            lines.append(f'  l{s.j} [label="l^{s.j}({self.n}) = {s.spheres}\\n{s.quotient_label}"];')
        lines.append(f'  l{self.n} [label="l^{self.n}({self.n}) = S^{self.n - 2}\\n{self.top_label}"];')
        for a, b in self.edges:
            lines.append(f"  l{a} -> l{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def stratification(n: int) -> Stratification:
    """Nonempty fixed sets over proper divisors, ordered by j, with cover edges.

    Nodes are the nonempty strata plus the whole sphere (j = n); an edge
    m -> j means l^m is contained in l^j with no node strictly between.
    """
    n = _check_n(n)
    strata = tuple(s for s in (fixed_sets(n, j) for j in proper_divisors(n)) if not s.empty)
    nodes = [s.j for s in strata] + [n]
    edges = []
    for a in nodes:
        for b in nodes:
            if a < b and b % a == 0 and not any(a < c < b and c % a == 0 and b % c == 0 for c in nodes):
                edges.append((a, b))
    note = "" if strata else "empty singular locus: the quotient is a manifold"
    return Stratification(n, strata, tuple(edges), note)


def freeness_check(n: int) -> dict:
    """Fixed-space dimensions of every nontrivial element of <R_n, -I>.

    For g != I we need ker(g - I) = 0; for g not in {I, -I} also ker(g + I) = 0
    (-I itself fixes nothing on the sphere but sends everything to its antipode).
    """
    n = _check_n(n)
    R = rotation_matrix(n)
    eye = np.eye(n - 1)
    elems = enumerate_group([R, -eye], 8 * n)
    worst_plus = worst_minus = 0
    for g in elems[1:]:
        worst_plus = max(worst_plus, kernel_dim(g - eye))
        if not np.allclose(g, -eye):
            worst_minus = max(worst_minus, kernel_dim(g + eye))
    nonempty = [s.j for s in stratification(n).strata]
    return {
        "n": n,
        "group_order": len(elems),
        "max_fixed_dim": worst_plus,
        "max_antifixed_dim": worst_minus,
        "free": worst_plus == 0 and worst_minus == 0,
        "nonempty_strata": nonempty,
    }
