import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solvfrag import partition as pt
from solvfrag.classify import TABLE_ORDER, SolvabilityClass as S, check
from solvfrag.hamfile import parse_text
from solvfrag.pauli import Hamiltonian, WeightedTerm, parse_pauli


def ham(*pairs, n=1):
    return Hamiltonian(n, tuple(WeightedTerm(parse_pauli(p, n), c) for c, p in pairs))


XYZ = ham((3.0, "X0"), (2.0, "Y0"), (1.0, "Z0"))


def test_ac_single_fragment():
    p = pt.sorted_insertion(XYZ, S.AC)
    assert len(p) == 1 and len(p.fragments[0]) == 3


def test_fc_singletons():
    p = pt.sorted_insertion(XYZ, S.FC)
    assert [len(f) for f in p.fragments] == [1, 1, 1]
    assert [f.terms[0].op.label() for f in p.fragments] == ["X0", "Y0", "Z0"]


def test_h2_sym_twc_ff(h2):
    p = pt.sorted_insertion(h2, S.SYM_TWC_FF)
    stats = pt.partition_report(p)
    assert len(p) == 1 and stats.largest_count == 14
    assert stats.largest_l1 == pytest.approx(1.58, rel=0.01)


def test_report_examples(lih):
    p = pt.Partition((pt.Fragment(XYZ.terms[:2], S.AC),), "", 1, S.AC)
    stats = pt.partition_report(p)
    assert stats.largest_l1 == 5 and stats.largest_count == 2 and stats.fragments[0].verified
    stats = pt.partition_report(pt.sorted_insertion(lih, S.AC))
    assert stats.largest_count == 10
    assert stats.largest_l1 == pytest.approx(1.15, rel=0.01)


def test_ties_follow_input_order():
    h = ham((1.0, "Z0"), (-1.0, "X0"), (1.0, "Y0"))
    p = pt.sorted_insertion(h, S.FC)
    assert [f.source_indices for f in p.fragments] == [(0,), (1,), (2,)]


def test_identity_kept_as_constant():
    h = ham((-0.5, ""), (1.0, "Z0"))
    p = pt.sorted_insertion(h, S.FC)
    assert p.constant == -0.5 and len(p) == 1
    assert pt.is_exact_partition(p, h)


@pytest.mark.parametrize("cls", TABLE_ORDER)
def test_exact_and_verified(h2, lih, cls):
    for h in (h2, lih):
        p = pt.sorted_insertion(h, cls)
        assert pt.is_exact_partition(p, h)
        assert all(check(cls, f.terms) for f in p.fragments)
        idx = [i for f in p.fragments for i in f.source_indices]
        assert len(idx) == len(set(idx))


def test_json_round_trip(lih):
    p = pt.sorted_insertion(lih, S.SYM_FF)
    q = pt.loads(pt.dumps(p))
    assert q == p


def h2_path():
    from importlib import resources

    return str(resources.files("solvfrag.data").joinpath("h2.ham"))


def test_deterministic():
    text = open(h2_path(), encoding="utf8").read()
    a = pt.dumps(pt.sorted_insertion(parse_text(text).hamiltonian, S.FF))
    b = pt.dumps(pt.sorted_insertion(parse_text(text).hamiltonian, S.FF))
    assert a == b


LABELS = ["X0", "Y0", "Z0", "X1", "Z1", "X0 X1", "Y0 Y1", "Z0 Z1", "X0 Z1", "Z0 X1", "Y1", "Y0 Z1"]


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.sampled_from(LABELS), min_size=1, max_size=10, unique=True),
    st.lists(st.floats(-3, 3, allow_nan=False).filter(lambda c: c != 0), min_size=10, max_size=10),
    st.sampled_from(TABLE_ORDER),
)
def test_random_partitions_exact(labels, coeffs, cls):
    h = ham(*zip(coeffs, labels), n=2)
    p = pt.sorted_insertion(h, cls)
    assert pt.is_exact_partition(p, h)
    assert all(check(cls, f.terms) for f in p.fragments)
    assert pt.loads(pt.dumps(p)) == p
