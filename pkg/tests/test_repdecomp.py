import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from annular.presentations import builtin_presentation
from annular.repdecomp import (FusionGraph, IsoClass, MatRep, comp_factors, conjugate, direct_sum,
                               exhaustive_length, fusion_graph, graph_analytics,
                               indecomposable_summands, is_group_annihilated, is_invertible,
                               matmul, series_csv, tensor_rep, trivial_rep, cell_matrix_rep)


def rand_rep(rng, p, d, ngen=2):
    """Block upper-triangular generators, hidden by a random change of basis."""
    sizes, left = [], d
    while left:
        k = rng.randint(1, min(4, left))
        sizes.append(k)
        left -= k
    gens = {}
    for g in range(ngen):
        M = np.zeros((d, d), dtype=np.int64)
        o = 0
        for k in sizes:
            M[o:o + k, o:] = [[rng.randrange(p) for _ in range(d - o)] for _ in range(k)]
            o += k
        gens[f"g{g}"] = M
    while True:
        P = np.array([[rng.randrange(p) for _ in range(d)] for _ in range(d)])
        if is_invertible(P, p):
            return conjugate(MatRep(p, gens), P)


def perm_matrix(perm):
    n = len(perm)
    M = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(perm):
        M[j, i] = 1
    return M


def natural_s3(p=7):
    """Permutation module of S_3 over F_p: trivial plus a 2-dim simple."""
    return MatRep(p, {"a": perm_matrix((1, 0, 2)), "b": perm_matrix((1, 2, 0))}, {"a", "b"})


def test_simple_module_has_one_factor():
    V = natural_s3()
    cf = comp_factors(V)
    assert cf.dims() == [1, 2]
    W = V.restrict_to(np.array([[1, -1, 0], [0, 1, -1]]).T)
    assert comp_factors(W).count == 1
    assert indecomposable_summands(W).count == 1


def test_double_gives_two_summands_in_one_class():
    W = natural_s3().restrict_to(np.array([[1, -1, 0], [0, 1, -1]]).T)
    S = indecomposable_summands(direct_sum(W, W))
    assert S.parts[0][2] == 2 and len(S.parts) == 1
    assert S.conserved()


def test_tensor_dims_and_traces_multiply():
    V = natural_s3(11)
    T = tensor_rep(V, V)
    assert T.dim == 9
    for k in V.gens:
        assert np.trace(T.gens[k]) % 11 == (np.trace(V.gens[k]) ** 2) % 11


def test_trivial_rep_self_loop():
    U = trivial_rep(natural_s3())
    G = fusion_graph(U, 3, "length")
    assert len(G.vertices) == 1 and G.edges == {(0, 0): 1}
    info = graph_analytics(G)
    assert info["period"] == 1 and info["pf_spectral"] == pytest.approx(1.0)


def _toy_graph(edges, dims):
    V = [IsoClass(MatRep(2, {"x": np.eye(d, dtype=np.int64)}), None, f"v{i}") for i, d in enumerate(dims)]
    G = FusionGraph("length", V, edges, {0: 1}, set(), 2)
    G.expanded = set(range(len(dims)))
    return G


def test_analytics_on_handmade_graphs():
    info = graph_analytics(_toy_graph({(0, 0): 3}, [1]))
    assert info["period"] == 1 and info["pf_estimate"] == pytest.approx(3.0)
    info = graph_analytics(_toy_graph({(0, 1): 2, (1, 0): 2}, [1, 1]))
    assert info["period"] == 2 and info["pf_spectral"] == pytest.approx(2.0)
    info = graph_analytics(_toy_graph({(0, 0): 1, (0, 1): 1, (1, 1): 2}, [1, 1]))
    assert info["final_basic_classes"] == [[1]]


def test_oracle_small_random():
    rng = random.Random(3)
    for trial in range(12):
        p = rng.choice([2, 3])
        R = rand_rep(rng, p, rng.randint(1, 6))
        cf = comp_factors(R, seed=trial)
        assert cf.dims() == sorted(exhaustive_length(R))
        assert cf.conserved()


@given(st.integers(0, 10_000))
def test_idempotents_orthogonal_and_complete(seed):
    rng = random.Random(seed)
    p = 3
    R = rand_rep(rng, p, rng.randint(1, 6))
    S = indecomposable_summands(R, seed=seed)
    assert S.conserved()
    tot = np.zeros((R.dim, R.dim), dtype=np.int64)
    for i, e in enumerate(S.idempotents):
        tot = (tot + e) % p
        for j, f in enumerate(S.idempotents):
            assert np.array_equal(matmul(e, f, p), e if i == j else 0 * e)
        for M in R.mats():
            assert np.array_equal(matmul(e, M, p), matmul(M, e, p))
    assert np.array_equal(tot, np.eye(R.dim, dtype=np.int64))


def test_reports_are_deterministic():
    V = cell_matrix_rep("aTL", 4, 2, z=2, beta0=3)
    a = indecomposable_summands(tensor_rep(V, V), seed=4)
    b = indecomposable_summands(tensor_rep(V, V), seed=4)
    assert a.parts == b.parts


def test_delta11_final_class():
    V = cell_matrix_rep("aTL", 3, 1, z=1)
    assert not is_group_annihilated(V)
    G = fusion_graph(V, 6, "summand")
    info = graph_analytics(G)
    assert G.conservation_ok()
    (final,) = info["final_basic_classes"]
    assert len(final) == 3 and all(G.dim(i) == 1 for i in final)
    b = [t for _, t, _ in G.counts(10)]
    assert b[:6] == [1, 7, 25, 79, 241, 727]
    ratios = [x / 3 ** n for n, x in enumerate(b, 1)]
    assert all(1 / 3 <= r <= 1 for r in ratios)


@pytest.mark.parametrize("m,lam", [(3, 1), (3, 3), (4, 2), (4, 0)])
def test_apro_semisimple(m, lam):
    V = cell_matrix_rep("aPRo", m, lam, z=2)
    assert indecomposable_summands(V).dims() == comp_factors(V).dims()
    T = tensor_rep(V, V)
    assert indecomposable_summands(T).dims() == comp_factors(T).dims()


@pytest.mark.parametrize("family,lam", [("TL", 1), ("Mo", 1), ("aTL", 1)])
def test_r_n_approaches_one(family, lam):
    V = cell_matrix_rep(family, 3, lam, z=1)
    G = fusion_graph(V, 6, "length")
    rows = G.counts(12)
    r = [a / t for _, t, a in rows]
    assert r[-1] > 0.9
    assert r[-1] >= r[len(r) // 2]


def _mat_word(V, word, m):
    out = np.eye(V.dim, dtype=np.int64)
    for L in word:
        if L.kind == "id":
            continue
        if L.kind in ("tau", "tauinv"):
            name = L.kind if L.power > 0 else ("tauinv" if L.kind == "tau" else "tau")
            M, k = V.gens[name], abs(L.power)
        else:
            M, k = V.gens[f"{L.kind}{L.index % m or m}"], L.power
        for _ in range(k):
            out = matmul(out, M, V.p)
    return out


@pytest.mark.parametrize("family,suite,beta", [
    ("aTL", "aTL", 3), ("aTLbar", "aTLbar", 3), ("aPRo", "aPRo", 1), ("aMo", "aMobar", 1),
])
@pytest.mark.parametrize("m", [3, 4])
def test_relators_hold_on_cell_modules(family, suite, beta, m):
    # dotted paths weigh 1 in the modules, so the rook-type suites run at beta = 1
    V = cell_matrix_rep(family, m, 1 if "TL" not in family or m % 2 else 2, z=2, beta0=beta)
    for rel in builtin_presentation(suite, m).relators:
        if rel.status == "typo":
            continue
        lhs = _mat_word(V, rel.lhs, m)
        rhs = _mat_word(V, rel.rhs, m) * pow(beta, rel.beta + rel.alpha, V.p) % V.p
        assert np.array_equal(lhs, rhs), str(rel)


def test_series_csv_and_dot():
    V = cell_matrix_rep("aTL", 3, 1, z=1)
    Gl = fusion_graph(V, 5, "length")
    Gb = fusion_graph(V, 5, "summand")
    text = series_csv(Gl, 4, Gb, meta={"seed": 0})
    lines = text.splitlines()
    assert lines[0] == "# seed=0" and lines[1] == "n,l,b,r"
    assert lines[2].startswith("1,3,1,")
    dot = Gb.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == len(Gb.edges)
