from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from kzero.bratteli import MatrixAlgebraList, StationaryDiagram, period_fold
from kzero.groupalg import (
    ConnectingMap,
    ProfiniteTower,
    RepDegreeProfile,
    RestrictedProductSpec,
    assemble_restricted_product,
    cyclic_profile,
    cyclic_tower,
    self_similarity_check,
    serialize_restricted_product,
    sl2_degree_profile,
    validate_tower,
)

ODD_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23)


def golden_seed():
    return StationaryDiagram(period_fold([1]), MatrixAlgebraList((1, 1)))


# -- degree profiles ----------------------------------------------------------------


def test_profile_burnside_enforced():
    RepDegreeProfile("x", 6, (1, 1, 2))
    with pytest.raises(ValueError):
        RepDegreeProfile("x", 6, (1, 2))  # 1 + 4 != 6
    with pytest.raises(ValueError):
        RepDegreeProfile("x", 5, (1, 0, 2))  # nonpositive degree


def test_profile_sorts_degrees():
    p = RepDegreeProfile("x", 6, (2, 1, 1))
    assert p.degrees == (1, 1, 2)


def test_cyclic_profile():
    p = cyclic_profile(4)
    assert p.order == 4
    assert p.degrees == (1, 1, 1, 1)
    assert cyclic_profile(1).degrees == (1,)
    with pytest.raises(ValueError):
        cyclic_profile(0)


def test_sl2_profile_p5():
    p = sl2_degree_profile(5)
    assert p.order == 120
    assert sorted(p.degrees) == [1, 2, 2, 3, 3, 4, 4, 5, 6]
    assert len(p.degrees) == 5 + 4


def test_sl2_profile_p7():
    p = sl2_degree_profile(7)
    assert p.order == 336
    assert len(p.degrees) == 11
    assert sum(d * d for d in p.degrees) == 336
    # degrees present: 1, p, (p+1)/2 twice, (p-1)/2 twice, p+1, p-1 families
    assert p.degrees.count(4) >= 2 and p.degrees.count(3) >= 2
    assert 7 in p.degrees and 1 in p.degrees


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_sl2_profile_structure(p):
    prof = sl2_degree_profile(p)
    assert prof.order == p * (p * p - 1)
    assert len(prof.degrees) == p + 4
    assert sum(d * d for d in prof.degrees) == prof.order


def test_sl2_rejects_bad_p():
    with pytest.raises(ValueError):
        sl2_degree_profile(2)
    with pytest.raises(ValueError):
        sl2_degree_profile(9)


# -- connecting maps and towers -------------------------------------------------------


def test_connecting_map():
    m = ConnectingMap((0, 0, 1, 1, 2, 2), 3)
    assert m.rows == 6
    assert m.column_sums() == (2, 2, 2)
    assert m.as_matrix() == (
        (1, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (0, 1, 0),
        (0, 0, 1),
        (0, 0, 1),
    )
    with pytest.raises(ValueError):
        ConnectingMap((0, 3), 3)  # parent index out of range
    with pytest.raises(ValueError):
        ConnectingMap((), 0)


def test_cyclic_tower_shape():
    t = cyclic_tower(3, 4)
    assert t.prime == 3
    assert t.depth == 4
    assert [lv.order for lv in t.levels] == [1, 3, 9, 27, 81]
    for cm in t.connecting:
        assert set(cm.column_sums()) == {3}
    validate_tower(t)


def test_cyclic_tower_parent_rule():
    t = cyclic_tower(5, 2)
    # residue m at level 2 lies over m mod 5 at level 1
    cm = t.connecting[1]
    assert cm.parent == tuple(m % 5 for m in range(25))


def test_cyclic_tower_validation():
    with pytest.raises(ValueError):
        cyclic_tower(4, 2)
    with pytest.raises(ValueError):
        cyclic_tower(3, 0)


def test_validate_tower_catches_corruption():
    t = cyclic_tower(3, 3)
    bad_map = ConnectingMap((0,) * 27, 9)  # all mass on residue 0
    corrupt = ProfiniteTower(t.prime, t.levels, (t.connecting[0], t.connecting[1], bad_map))
    with pytest.raises(ValueError):
        validate_tower(corrupt)


# -- self-similarity -----------------------------------------------------------------


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_self_similarity_true(p):
    t = cyclic_tower(p, 5)
    for window in (1, 2, 3, 4):
        assert self_similarity_check(t, window)


def test_self_similarity_needs_depth():
    t = cyclic_tower(3, 3)
    with pytest.raises(ValueError):
        self_similarity_check(t, 3)  # needs depth >= window + 1
    with pytest.raises(ValueError):
        self_similarity_check(t, 0)


def test_self_similarity_negative_control():
    t = cyclic_tower(3, 3)
    # rewire level-2 fibers so one residue has 4 preimages and another 2
    parent = list(t.connecting[1].parent)
    parent[parent.index(1)] = 0
    corrupt = ProfiniteTower(
        t.prime, t.levels, (t.connecting[0], ConnectingMap(tuple(parent), 3), t.connecting[2])
    )
    assert not self_similarity_check(corrupt, 2)


def test_self_similarity_wrong_branching_control():
    # a tower whose top step branches by p^3 instead of p
    t = cyclic_tower(2, 3)
    wide = ConnectingMap(tuple(m % 4 for m in range(32)), 4)
    levels = t.levels[:-1] + (cyclic_profile(32),)
    corrupt = ProfiniteTower(2, levels, t.connecting[:-1] + (wide,))
    assert not self_similarity_check(corrupt, 2)


# -- restricted products ---------------------------------------------------------------


def test_assemble_restricted_product():
    spec = assemble_restricted_product([2, 3], 11, golden_seed())
    assert spec.ramified == frozenset({2, 3})
    assert sorted(spec.factors) == [5, 7, 11]
    for p, tower in spec.factors.items():
        assert tower.prime == p
        assert tower.depth == 2
    assert spec.infinite_factor.B == period_fold([1])


def test_assemble_depth_override():
    spec = assemble_restricted_product([], 5, golden_seed(), depth=4)
    assert spec.factors[5].depth == 4
    assert sorted(spec.factors) == [2, 3, 5]


def test_assemble_rejects_bad_ramified():
    with pytest.raises(ValueError):
        assemble_restricted_product([6], 11, golden_seed())


def test_serialize_restricted_product_golden():
    spec = assemble_restricted_product([2, 3], 7, golden_seed())
    text = serialize_restricted_product(spec)
    lines = text.splitlines()
    assert lines[0] == "ramified\t2,3"
    assert lines[1] == "factor\t5\tlevels\t1,5,25"
    assert lines[2] == "factor\t7\tlevels\t1,7,49"
    assert lines[3] == "infinite\tseed\t1,1\tmatrix\t1,1;1,0\tperiod\t1"
    assert text.endswith("\n")


def test_serialize_no_ramified():
    spec = assemble_restricted_product([], 3, golden_seed())
    text = serialize_restricted_product(spec)
    assert text.splitlines()[0] == "ramified\t-"


@given(st.sets(st.sampled_from(ODD_PRIMES), max_size=3), st.sampled_from([3, 5, 7, 11]))
@settings(max_examples=30, deadline=None)
def test_assemble_partition_property(ramified, bound):
    spec = assemble_restricted_product(sorted(ramified), bound, golden_seed())
    # unramified factor primes and ramified primes never overlap
    assert not (set(spec.factors) & spec.ramified)
    for p in spec.factors:
        assert p <= bound
    for t in spec.factors.values():
        assert self_similarity_check(t, 1)
