import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_fixtures import clique_union_graph, krausz_paulis, twin_paulis
from solvfrag.classify import (
    TABLE_ORDER,
    SolvabilityClass as S,
    check,
    classes_satisfied,
    graph_is_twc_ac,
    is_ac,
    is_fc,
    is_ff,
    is_nc,
    is_subclass,
    is_sym_variant,
    is_twc_ac,
    is_twc_ff,
)
from solvfrag.pauli import PauliOp, commutes, multiply, parse_pauli


def ops(*texts, n=4):
    return [parse_pauli(t, n) for t in texts]


# centre X0, three mutually commuting leaves
CLAW = ops("X0", "Z0", "Z0 X1", "Z0 X2")


def test_claw_realization_is_a_claw():
    centre, *leaves = CLAW
    assert not any(commutes(centre, leaf) for leaf in leaves)
    assert all(commutes(a, b) for a in leaves for b in leaves)


def test_fc_examples():
    assert is_fc(ops("Z0", "Z1", "Z0 Z1"))
    assert not is_fc(ops("X0", "Z0"))
    assert is_fc([])


def test_ac_examples():
    assert is_ac(ops("X0", "Y0", "Z0"))
    assert not is_ac(ops("X0", "Z0", "Z1"))
    assert is_ac(ops("X3"))


def test_twc_ac_examples():
    assert graph_is_twc_ac(clique_union_graph())
    p3 = ops("Z0", "X0 X1", "Z1")  # Z0 - X0X1 - Z1
    assert not is_twc_ac(p3)
    assert is_twc_ac(ops("Z0", "Z1", "Z0 Z1"))
    assert is_twc_ac(ops("X0", "Z0", "X1", "Z1"))


def test_ff_examples():
    assert is_ff(krausz_paulis())
    assert not is_ff(CLAW)
    assert is_ff(ops("X0", "Y0", "Z0"))


def test_twc_ff_examples():
    k3_and_p3 = ops("X0", "Y0", "Z0", "Z1", "X1 X2", "Z2")
    assert is_twc_ff(k3_and_p3)
    assert not is_ff(k3_and_p3)
    assert not is_twc_ff(CLAW + ops("X2 Y3"))
    assert is_twc_ff(ops("Z0", "X0", "Z1", "X1"))


def test_sym_variant_examples(h2):
    assert is_sym_variant(twin_paulis(), S.FF)
    assert not is_ff(twin_paulis())
    assert is_sym_variant(ops("Z0", "X0", "Y0"), S.AC)
    assert is_nc(h2)
    with pytest.raises(ValueError):
        is_sym_variant(ops("Z0"), S.FC)


def test_empty_accepted_by_every_class():
    for cls in TABLE_ORDER:
        assert check(cls, [])


def test_class_parsing():
    assert S.parse("sym-twc-ff") is S.SYM_TWC_FF
    assert S.parse("SYM_TWC_AC") is S.SYM_TWC_AC
    assert S.parse("Sym-AC") is S.NC
    with pytest.raises(ValueError):
        S.parse("bogus")


def test_containment_order():
    assert is_subclass(S.FC, S.TWC_AC)
    assert is_subclass(S.TWC_AC, S.TWC_FF)
    assert is_subclass(S.AC, S.TWC_AC)
    assert is_subclass(S.FF, S.TWC_FF)
    assert is_subclass(S.AC, S.NC)
    assert is_subclass(S.TWC_AC, S.SYM_TWC_AC)
    assert is_subclass(S.PAULI, S.SYM_TWC_FF)
    assert not is_subclass(S.TWC_FF, S.FF)
    assert not is_subclass(S.FC, S.AC)


# --------------------------------------------------------------------------
# properties

LETTERS = "IXYZ"


@st.composite
def term_sets(draw, n=3, max_terms=7):
    k = draw(st.integers(0, max_terms))
    seen, out = set(), []
    for _ in range(k):
        word = draw(st.text(LETTERS, min_size=n, max_size=n))
        if word.strip("I") and word not in seen:
            seen.add(word)
            label = " ".join(f"{c}{q}" for q, c in enumerate(word) if c != "I")
            out.append(parse_pauli(label, n))
    return out


@settings(max_examples=300)
@given(term_sets())
def test_monotone_along_containment(terms):
    sat = set(classes_satisfied(terms))
    for a in sat:
        for b in TABLE_ORDER:
            if is_subclass(a, b):
                assert b in sat, (a, b, [str(t) for t in terms])


@settings(max_examples=200)
@given(term_sets(), st.integers(0, 63))
def test_dressing_invariance(terms, seed):
    rng = random.Random(seed)
    n = 3
    # a Pauli commuting with all terms: search a few random candidates
    dress = PauliOp.identity(n)
    for _ in range(20):
        cand = PauliOp(n, rng.randrange(8), rng.randrange(8))
        if all(commutes(cand, t) for t in terms):
            dress = cand
            break
    dressed = [multiply(t, dress) for t in terms]
    for cls in TABLE_ORDER:
        assert check(cls, terms) == check(cls, dressed)
