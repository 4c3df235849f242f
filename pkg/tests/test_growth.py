from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from annular.exactmath import multinomial
from annular.growth import (GrowthSeries, UnsupportedGroup, VData, char_table, column_sums,
                            exact_l_abelian_by_finite, exact_l_finite, explicit_tensor_power,
                            gensym_central_class, gensym_column_sum, gensym_column_sum_oracle,
                            growth_series, parse_group_spec, perm_mul, permutation_group,
                            predict_a_n, splitting_prime, tiny_explicit, wallpaper_l,
                            wallpaper_p3_rep, wallpaper_report, weight_expansion, wreath_rep)
from annular.repdecomp import comp_factors


@pytest.mark.parametrize("spec", ["S3", "S4", "S5", "C2", "C5", "C2wrS2", "C3wrS2", "C2wrS3"])
def test_tables_orthogonal(spec):
    T = char_table(spec)
    assert T.row_orthogonality() and T.column_orthogonality()
    assert sum(T.sizes) == T.order
    assert sum(d * d for d in T.degrees) == T.order


def test_small_table_examples():
    assert char_table("S3").degrees == [1, 1, 2]
    T = char_table("C2")
    assert [[int(v.to_rational()) for v in row] for row in T.values] == [[1, 1], [1, -1]]
    W = char_table("C2wrS2")
    assert len(W) == 5 and W.degrees == [1, 1, 1, 1, 2]


def test_explicit_tables_agree():
    S3 = tiny_explicit(permutation_group([(1, 0, 2), (1, 2, 0)]), perm_mul, "S3")
    assert S3.degrees == char_table("S3").degrees
    assert sorted(column_sums(S3)) == sorted(column_sums(char_table("S3")))
    D8 = tiny_explicit(permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)]), perm_mul, "D8")
    assert D8.row_orthogonality()
    assert sorted(D8.degrees) == [1, 1, 1, 1, 2]
    assert sorted(column_sums(D8)) == sorted(column_sums(char_table("C2wrS2")))


def test_column_sums():
    assert column_sums(char_table("S3"))[0] == 4
    assert column_sums(char_table("C2"))[1] == 0
    W = char_table("C2wrS2")
    S = column_sums(W)
    assert S[W.classes.index(gensym_central_class(2, 2, 1))] == 2
    assert S[W.identity] == 6


def test_predictions_trivial_group():
    T = char_table("S1")
    V = VData.from_character(T, [1])
    assert predict_a_n(T, V, 5) == 1
    assert exact_l_finite(T, [1], 5) == 1


def _natural_c2wrs2():
    W = char_table("C2wrS2")
    row = W.values[W.degrees.index(2)]
    return W, row


def test_c2wrs2_natural_module():
    W, chi = _natural_c2wrs2()
    V = VData.from_character(W, chi)
    assert V.dim == 2 and len(V.central) == 2
    for n in range(1, 11):
        want = Fraction((6 + 2 * (-1) ** n) * 2 ** n, 8)
        assert predict_a_n(W, V, n) == want
        assert exact_l_finite(W, chi, n) == want


@pytest.mark.parametrize("m,r,t,want", [(2, 2, 0, 6), (2, 2, 1, 2), (2, 4, 1, 12), (3, 2, 1, 0),
                                        (1, 3, 0, 4), (1, 4, 0, 10)])
def test_gensym_examples(m, r, t, want):
    assert gensym_column_sum(m, r, t) == want


@given(st.integers(1, 4), st.integers(0, 5), st.integers(0, 3))
def test_gensym_matches_oracle(m, r, t):
    t %= m
    assert gensym_column_sum(m, r, t) == gensym_column_sum_oracle(m, r, t)


@pytest.mark.parametrize("m,r", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_gensym_matches_tables(m, r):
    T = char_table(f"C{m}wrS{r}")
    S = column_sums(T)
    for t in range(m):
        assert S[T.classes.index(gensym_central_class(m, r, t))] == gensym_column_sum(m, r, t)


def test_weight_expansion_p3():
    rep = wallpaper_p3_rep()
    W = weight_expansion(rep, 3)
    assert sum(W.values()) == 27
    assert W[(0, 0, 0, 0)] == 6


def test_engine_basics():
    rep = parse_group_spec("wreath Z S3 weights=1,2,3")
    assert exact_l_abelian_by_finite(rep, 1).count == 1
    vals = [exact_l_abelian_by_finite(rep, n) for n in range(1, 6)]
    assert [v.count for v in vals] == [1, 9, 42, 261, 1476]
    assert all(v.conserved(6) for v in vals)


def test_wallpaper_modes():
    for n in (1, 2, 4, 5, 7):
        assert wallpaper_l(n, "engine") == wallpaper_l(n, "paperFormula") == 3 ** (n - 1)
    r = wallpaper_report(3)
    assert (r["engine"], r["paperFormula"], r["discrepancy"], r["conserved"]) == (13, 3, True, True)
    assert wallpaper_l(6, "engine") == 3 ** 5 + 2 * multinomial(6, (2, 2, 2)) // 3
    with pytest.raises(ValueError):
        wallpaper_l(2, "guess")


@pytest.mark.parametrize("spec,nmax", [("wreath C2 S3 weights=0,1,1", 3), ("wreath C3 S3 weights=0,1,2", 3),
                                       ("wallpaper p3 mod=7", 4), ("wallpaper p3 mod=2", 4)])
def test_engine_matches_matrices(spec, nmax):
    rep = parse_group_spec(spec)
    p = splitting_prime(rep)
    for n in range(1, nmax + 1):
        M = comp_factors(explicit_tensor_power(rep, n, p), seed=1)
        assert exact_l_abelian_by_finite(rep, n).count == M.count


def test_wreath_rep_validation():
    with pytest.raises(ValueError):
        wreath_rep(3, [1, 2])
    with pytest.raises(ValueError):
        wreath_rep(2, [0, 1])
    with pytest.raises(UnsupportedGroup):
        parse_group_spec("wreath Z")


def test_growth_series_csv():
    s = growth_series("trivial", 3)
    assert s.values() == [1, 1, 1]
    g = growth_series("wreath Z S3 weights=1,2,3", 6)
    assert isinstance(g, GrowthSeries)
    lines = g.to_csv().splitlines()
    assert "n,value,k_n,ratio" in lines
    assert lines[-1].startswith("6,8796,7776,")
    for n, v, k, r in g.rows:
        assert v <= 6 ** n
