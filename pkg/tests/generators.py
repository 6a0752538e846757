"""Random inputs shared by several test modules."""
import numpy as np

from nsegments import segment_core as sc


def chord_pair(rng, n, space):
    """(Z, W, kind): endpoints in M(n) or L(n), mixing generic and boundary cases."""
    Z = sc.random_M(rng, n)
    kind = rng.choice(["generic", "real_copy", "complex_line", "negative_ray", "positive_ray"], p=[0.3, 0.25, 0.25, 0.1, 0.1])
    if kind == "generic":
        W = sc.random_M(rng, n)
    elif kind == "real_copy":
        w = sc.segment_witness(Z)
        W = w.direction * np.concatenate([[0.0], rng.standard_normal(n - 1)])
    elif kind == "complex_line":
        W = complex(*rng.standard_normal(2)) * Z
    elif kind == "negative_ray":
        W = -rng.uniform(0.1, 3) * Z
    else:
        W = rng.uniform(0.1, 3) * Z
    if space == "L":
        Z = Z + complex(*rng.standard_normal(2))
        W = W + complex(*rng.standard_normal(2))
    return Z, W, kind


def on_dense_grid(Z, W, samples=2001, rtol=1e-9):
    """Slow test-side oracle: collinearity by cross products on a fine grid plus the exact diagonal crossing."""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    t = np.linspace(0, 1, samples)[:, None]
    P = (1 - t) * Z + t * W
    D = P - P[:, :1]
    k = np.argmax(np.abs(D), axis=1)
    Dk = D[np.arange(samples), k][:, None]
    scale = np.abs(Dk[:, 0])
    if np.any(scale <= rtol * (1 + np.max(np.abs(P), axis=1))):
        return False
    if np.any(np.max(np.abs(np.imag(np.conj(Dk) * D)), axis=1) > rtol * scale**2):
        return False
    # the chord's relative part (P - p_1) is linear in t; it vanishes where both parts cancel
    A, B = Z - Z[0], W - W[0]
    for j in range(1, Z.size):
        if abs(A[j] - B[j]) > 0:
            t = A[j] / (A[j] - B[j])
            if abs(t.imag) < 1e-12 and 0 <= t.real <= 1:
                P = (1 - t.real) * A + t.real * B
                if np.max(np.abs(P)) <= rtol * (np.max(np.abs(A)) + np.max(np.abs(B))):
                    return False
            break
    return True

