import json
import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from nsegments import orbifold as ob
from nsegments.errors import ConstructionError, DomainError


def mu_hat(x):
    """The lifted re-enumeration on (x_2, ..., x_n), applied directly."""
    x2 = x[0]
    return [xi - x2 for xi in x[1:]] + [-x2]


# shift matrix ------------------------------------------------------------------------


def test_shift_matrix_n3():
    M = ob.shift_matrix(3)
    assert M.entries == ((-1, 1), (-1, 0))
    assert M.power(3) == ((1, 0), (0, 1))


@pytest.mark.parametrize("n", range(3, 15))
def test_shift_matrix_is_the_lift(n):
    M = ob.shift_matrix(n)
    for i in range(n - 1):
        e = [0] * (n - 1)
        e[i] = 1
        assert [row[i] for row in M.entries] == mu_hat(e)
    assert all(isinstance(v, int) for row in M.power(n) for v in row)


def test_shift_matrix_rejects_small_n():
    with pytest.raises(DomainError):
        ob.shift_matrix(2)


@pytest.mark.parametrize("n", [3, 4])
def test_char_poly_examples(n):
    assert ob.char_poly(ob.shift_matrix(n)) == [1] * n


@pytest.mark.parametrize("n", list(range(3, 13)) + [17, 24])
def test_char_poly_against_sympy(n):
    M = sympy.Matrix(ob.shift_matrix(n).entries)
    x = sympy.Symbol("x")
    expected = [int(c) for c in M.charpoly(x).all_coeffs()]
    assert ob.char_poly(ob.shift_matrix(n)) == expected == [1] * n


def test_char_poly_hessenberg_integer_matrices():
    rng = np.random.default_rng(0)
    x = sympy.Symbol("x")
    for _ in range(40):
        m = int(rng.integers(1, 7))
        A = np.triu(rng.integers(-4, 5, size=(m, m)), -1)
        if rng.random() < 0.5:
            A = A.T
        expected = [int(c) for c in sympy.Matrix(A.tolist()).charpoly(x).all_coeffs()]
        assert ob.char_poly(A.tolist()) == expected


def test_char_poly_input_checks():
    with pytest.raises(ValueError, match="Hessenberg"):
        ob.char_poly([[1, 0, 1], [0, 1, 0], [1, 0, 1]])
    with pytest.raises(ValueError, match="square"):
        ob.char_poly([[1, 2], [3]])


@pytest.mark.parametrize("n", range(3, 41))
def test_char_poly_roots_are_eigenvalues(n):
    roots = np.roots(ob.char_poly(ob.shift_matrix(n)))
    ev = np.linalg.eigvals(ob.shift_matrix(n).array())
    target = np.exp(2j * np.pi * np.arange(1, n) / n)
    for vals in (roots, ev):
        d = np.abs(vals[:, None] - target[None, :])
        assert np.max(np.min(d, axis=1)) <= 1e-10 * n


# eigenstructure --------------------------------------------------------------------------


def test_eigen_pairs_n3():
    e = ob.eigen_pairs(3)
    w = np.exp(2j * np.pi / 3)
    assert e.eigenvalues[0] == pytest.approx(w)
    np.testing.assert_allclose(e.vectors[:, 0], [w - 1, w**2 - 1], atol=1e-15)


@pytest.mark.parametrize("n", range(3, 41))
def test_eigen_residuals(n):
    e = ob.eigen_pairs(n)
    assert np.max(e.residuals) <= 1e-12
    assert np.min(np.abs(e.eigenvalues - 1)) > 0


def test_rotation_form_examples():
    np.testing.assert_allclose(ob.rotation_form(4).R, [[0, -1, 0], [1, 0, 0], [0, 0, -1]], atol=1e-15)
    s = math.sqrt(3) / 2
    np.testing.assert_allclose(ob.rotation_form(3).R, [[-0.5, -s], [s, -0.5]], atol=1e-15)


@pytest.mark.parametrize("n", range(3, 41))
def test_rotation_form_conjugates(n):
    f = ob.rotation_form(n)
    M = ob.shift_matrix(n).array()
    np.testing.assert_allclose(f.R.T @ f.R, np.eye(n - 1), atol=1e-12)
    assert f.residual <= 1e-10
    assert np.linalg.norm(f.B @ f.R - M @ f.B) <= 1e-10 * np.linalg.norm(M @ f.B)
    np.testing.assert_allclose(np.linalg.solve(f.B, M @ f.B), f.R, atol=1e-10)


@pytest.mark.parametrize("n", [3, 5, 6, 9, 12])
def test_offset_sine_columns_do_not_conjugate(n):
    f = ob.rotation_form(n)
    assert not f.literal_conjugates
    assert f.literal_residual > 1e-3


# group -----------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 15])
def test_group_odd(n):
    g = ob.group_structure(n)
    assert g["order"] == 2 * n
    assert g["cyclic"] and g["generator"] == "nu R_n"
    assert g["order_of_nu_R"] == 2 * n
    G = -ob.rotation_matrix(n)
    assert np.max(np.abs(np.linalg.matrix_power(G, 2 * n) - np.eye(n - 1))) <= 1e-12


@pytest.mark.parametrize("n", [4, 6, 8, 10, 20])
def test_group_even(n):
    g = ob.group_structure(n)
    assert g["order"] == 2 * n
    assert not g["cyclic"]
    assert not g["nu_in_R_subgroup"]
    # R^{n/2} flips only the last coordinate, so it is not -I
    half = np.linalg.matrix_power(ob.rotation_matrix(n), n // 2)
    assert not np.allclose(half, -np.eye(n - 1))


def test_group_cap():
    with pytest.raises(ConstructionError):
        ob.enumerate_group([ob.rotation(2 * math.pi / 50)], 10)


# lens spaces -----------------------------------------------------------------------------


def test_lens_examples():
    L5 = ob.lens_params_odd(5)
    assert (L5.q, L5.p, L5.free) == (10, (7, 9), True)
    L9 = ob.lens_params_odd(9)
    assert (L9.q, L9.p, L9.free) == (18, (11, 13, 15, 17), False)
    assert str(L9) == "L_18(11,13,15,17)"
    with pytest.raises(DomainError):
        ob.lens_params_odd(6)
    with pytest.raises(ValueError):
        ob.LensParams(6, (2, 4))


@pytest.mark.parametrize("n", [3, 5, 7, 11, 13])
def test_prime_lens_free(n):
    assert ob.lens_params_odd(n).free


@pytest.mark.parametrize("n", range(3, 42, 2))
def test_eigenphases_match_lens_params(n):
    L = ob.lens_params_odd(n)
    phases = ob.eigenphases(-ob.rotation_matrix(n))
    expected = sorted([2 * math.pi * p / L.q for p in L.p] + [2 * math.pi * (L.q - p) / L.q for p in L.p])
    np.testing.assert_allclose(phases, expected, atol=1e-12)


@given(q=st.integers(2, 60), p=st.lists(st.integers(1, 59), min_size=1, max_size=5))
def test_lens_free_is_gcd(q, p):
    if math.gcd(q, *p) != 1:
        with pytest.raises(ValueError):
            ob.LensParams(q, p)
        return
    assert ob.LensParams(q, p).free == all(math.gcd(x, q) == 1 for x in p)


# fixed sets ------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "j, dims, spheres",
    [(10, (9, 10), "S^8 ∪ S^9"), (4, (3, 0), "S^2"), (1, (0, 1), "S^0"), (2, (1, 2), "S^0 ∪ S^1")],
)
def test_fixed_sets_n20(j, dims, spheres):
    s = ob.fixed_sets(20, j)
    assert (s.dim_plus, s.dim_minus) == dims
    assert s.spheres == spheres


def test_fixed_sets_rejects_non_divisor():
    with pytest.raises(DomainError):
        ob.fixed_sets(20, 3)
    with pytest.raises(DomainError):
        ob.fixed_sets(20, 20)


def test_fixed_set_dims_two_ways():
    for n in range(4, 61):
        for j in ob.proper_divisors(n):
            assert ob.kernel_dims(n, j) == ob.block_count_dims(n, j)
            plus, minus = ob.block_count_dims(n, j)
            k = n // j
            if k % 2:
                assert (plus, minus) == (j - 1, 0)
            else:
                assert (plus, minus) == (j - 1, j)


def test_containment():
    for n in (12, 20, 24, 36):
        divs = ob.proper_divisors(n)
        for j in divs:
            for m in divs:
                if j % m == 0:
                    assert ob.containment_residual(n, m, j) <= 1e-10


# quotients and stratification ----------------------------------------------------------


def test_render_rules():
    assert ob.render(ob.ScriptL(3)) == "S^1"
    assert ob.render(ob.ScriptL(4)) == "D^2"
    assert ob.render(ob.ScriptL(5)) == "L(10,7)"
    assert ob.render(ob.ScriptL(5), substitute=False) == "L(5)"
    assert ob.render(ob.Lens(10, (7, 9))) == "L(10,7)"
    assert ob.render(ob.Lens(20, (1, 3, 5, 7, 9))) == "L_20(1,3,5,7,9)"
    assert ob.render(ob.Lens(5, ())) is None
    assert ob.render(ob.ConeQuotient(ob.Lens(3, ()))) == "{1}"
    with pytest.raises(TypeError):
        ob.render(42)


def test_quotients_n20():
    labels = {s.j: s.quotient_label for s in ob.stratification(20).strata}
    assert labels == {
        1: "{1}",
        2: "{1} ∪ S^1",
        4: "D^2",
        5: "L(10,7) ∪ (C_{L(5,3)}/{([X],1)~([-X],1)})",
        10: "L(10) ∪ L_20(1,3,5,7,9)",
    }
    assert ob.stratification(20).top_label == "L(20)"


def test_stratification_n20_graph():
    s = ob.stratification(20)
    assert s.nodes == [1, 2, 4, 5, 10, 20]
    assert set(s.edges) == {(1, 2), (1, 5), (2, 4), (2, 10), (5, 10), (4, 20), (10, 20)}
    d = json.loads(s.to_json())
    first = {e["j"]: e for e in d["strata"]}[10]
    assert (first["k"], first["dim_plus"], first["dim_minus"]) == (2, 9, 10)
    assert first["quotient"] == "L(10) ∪ L_20(1,3,5,7,9)"
    assert first["quotient_tree"]["op"] == "union"
    assert d["top"]["quotient"] == "L(20)"
    dot = s.to_dot()
    assert dot.startswith("digraph strata_20 {")
    assert dot.count("->") == 7
    assert "l10 -> l20;" in dot


def test_stratification_n4():
    s = ob.stratification(4)
    assert [(x.j, x.spheres, x.quotient_label) for x in s.strata] == [(1, "S^0", "{1}"), (2, "S^0 ∪ S^1", "{1} ∪ S^1")]
    assert s.top_label == "D^2"


@pytest.mark.parametrize("n", [3, 5, 7, 11, 13])
def test_prime_n_empty_locus(n):
    s = ob.stratification(n)
    assert s.strata == ()
    assert s.note
    assert s.edges == ()
    f = ob.freeness_check(n)
    assert f["free"] and f["group_order"] == 2 * n
    assert f["max_fixed_dim"] == f["max_antifixed_dim"] == 0


@pytest.mark.parametrize("n", [4, 6, 8, 9, 12, 15, 20])
def test_composite_n_not_free(n):
    f = ob.freeness_check(n)
    assert not f["free"]
    assert f["nonempty_strata"]


def test_freeness_n4_n20():
    assert 2 in ob.freeness_check(4)["nonempty_strata"]
    assert len(ob.stratification(20).nodes) == 6
