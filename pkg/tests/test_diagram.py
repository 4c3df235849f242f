import random

import pytest
from hypothesis import given, strategies as st

from annular.diagram import (
    AffineDiagram,
    DiagramError,
    FamilyId,
    canonicalize,
    compose,
    enumerate_diagrams,
    even_test,
    from_colored,
    from_text,
    identity,
    in_family,
    involute,
    is_even,
    is_planar,
    make_generator,
    multiply,
    random_diagram,
    random_partition_diagram,
    recompose_normal_form,
    to_colored,
    to_text,
    validate,
    winding_normal_form,
)

SAMPLE = dict(s=5, t=5, loops=2, blocks=[[("t", 1), ("t", 3), ("t", 5), ("b", 5)], [("b", 1), ("b", 3), ("b", 4)]])
seeds = st.integers(0, 10**6)


def sample_diagram():
    return canonicalize(**SAMPLE)


def test_identity_canonical():
    d = canonicalize(3, 3, 0, blocks=[[("b", i), ("t", i)] for i in range(3)])
    assert d == identity(3)
    assert len(d.blocks) == 3 and d.loops == 0


def test_sample_shape():
    d = sample_diagram()
    assert sorted(len(b.members) for b in d.blocks) == [1, 1, 1, 3, 4]
    assert d.loops == 2
    assert validate(d)


def test_wrapping_block():
    w = canonicalize(1, 0, 0, blocks=[[("b", 0), ("b", 2)]])
    assert len(w.blocks) == 1 and w.blocks[0].period == 2
    assert validate(w)


def test_compose_examples():
    e1 = make_generator("e", 3, 1)
    x = compose(e1, e1)
    assert x.diagram == e1 and x.beta == 1
    e = make_generator("e", 2, 1)
    y = multiply(e, make_generator("tau", 2), e)
    assert y.beta == 0 and y.diagram == AffineDiagram(2, 2, 1, e.blocks)


def test_tau_conjugation():
    tau, ti = make_generator("tau", 3), make_generator("tauinv", 3)
    assert compose(tau, ti).diagram == identity(3)
    for i in range(3):
        assert multiply(tau, make_generator("e", 3, i), ti).diagram == make_generator("e", 3, i + 1)


def test_planarity():
    tau = make_generator("tau", 3)
    assert not is_planar(make_generator("s", 2, 1))
    assert is_planar(make_generator("e", 4, 0))
    assert is_planar(tau)
    assert not is_planar(AffineDiagram(3, 3, 1, tau.blocks))


def test_even():
    tau = make_generator("tau", 3)
    assert even_test(make_generator("e", 3, 1))
    assert not is_even(tau)
    assert is_even(compose(tau, tau).diagram)


def test_involute_lr():
    assert involute(identity(3)) == identity(3)
    assert involute(make_generator("l", 3, 1)) == make_generator("r", 3, 1)


def test_membership():
    d = sample_diagram()
    assert in_family(d, FamilyId.parse("aPabar"))
    assert not in_family(d, FamilyId.parse("aBrbar"))
    for fam in ("aTLbar", "aMobar", "aBrbar", "aRoBrbar", "aPabar"):
        assert in_family(make_generator("e", 3, 1), FamilyId.parse(fam))


def test_random_mo_product_in_family():
    rng = random.Random(3)
    fam = FamilyId.parse("aMobar")
    for _ in range(20):
        assert in_family(random_diagram(rng, fam, 3, 10), fam)


def test_colored():
    d = canonicalize(4, 4, 0, blocks=[[("t", -1), ("t", 0)], [("t", 1), ("t", 2)], [("b", 0), ("b", 1)],
                                      [("b", 2), ("b", 3)]])
    labels = {tuple(v): lab for v, lab in to_colored(d).blocks}
    assert labels[((1, 0), (1, 3))] == (-1,)
    assert all(all(x == 0 for x in lab) for _, lab in to_colored(identity(3)).blocks)


def test_colored_round_trip():
    rng = random.Random(11)
    fam = FamilyId.parse("aBrbar")
    for _ in range(300):
        d = random_diagram(rng, fam, 3, 8)
        d = AffineDiagram(d.s, d.t, 0, d.blocks)
        assert from_colored(to_colored(d)) == d


def test_winding_normal_form():
    L, D0, R = winding_normal_form(make_generator("t", 2, 1))
    assert (L, D0, R) == ((1, 0), identity(2), (0, 0))
    tau = make_generator("tau", 2)
    L, D0, R = winding_normal_form(tau)
    assert (L, R) == ((1, 0), (0, 0)) and D0 == make_generator("s", 2, 1)
    assert recompose_normal_form(L, D0, R) == tau


def test_normal_form_recomposition():
    rng = random.Random(5)
    fam = FamilyId.parse("aPabar")
    for _ in range(200):
        d = random_diagram(rng, fam, 3, 6)
        d = AffineDiagram(d.s, d.t, 0, d.blocks)
        if d.n_through() == 3 and not d.has_wrapping():
            assert recompose_normal_form(*winding_normal_form(d)) == d


def test_enumeration_counts():
    assert len(enumerate_diagrams(FamilyId("PRo", "affineReduced"), 1, 1, 0)) == 2
    assert len(enumerate_diagrams(FamilyId("TL", "ordinary"), 3, 3, 0)) == 5


def test_text_round_trip():
    d = sample_diagram()
    text = to_text(d)
    assert from_text(text) == d
    assert to_text(from_text(text)) == text
    assert from_text("# comment\n\n" + text) == d


def test_text_errors():
    with pytest.raises((DiagramError, ValueError)):
        from_text("diagram s=1 t=1 loops=0\nblock b0 q1\n")


@given(seeds)
def test_translation_invariance(seed):
    rng = random.Random(seed)
    s, t = rng.randint(1, 3), rng.randint(1, 3)
    d = random_partition_diagram(rng, s, t, max_disp=2)
    raw = [[("b" if side == 0 else "t", pos + c * (s if side == 0 else t)) for c, side, pos in b.members]
           for b in d.blocks]
    shifted = [[(side, i + (s if side == "b" else t)) for side, i in blk] for blk in raw]
    assert canonicalize(s, t, d.loops, blocks=raw) == canonicalize(s, t, d.loops, blocks=shifted) == d


@given(seeds)
def test_identity_preserves_loops(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 4)
    d = random_partition_diagram(rng, m, m, loops=rng.randint(0, 2))
    assert compose(identity(m), d).diagram == d
    assert compose(d, identity(m)).diagram == d
    other = random_partition_diagram(rng, m, m)
    assert compose(d, other).diagram.loops >= d.loops


@given(seeds)
def test_involution_is_involutive(seed):
    rng = random.Random(seed)
    d = random_partition_diagram(rng, rng.randint(1, 4), rng.randint(1, 4), wrap_prob=0.2)
    assert involute(involute(d)) == d
