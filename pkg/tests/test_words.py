import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freehom.geometry import FuchsianRep
from freehom.words import (
    IdentityError, SurfacePresentation, Word, WordError, cyclic_reduce, format_word, free_reduce,
    invert, is_primitive, parse_word, random_word,
)

P2 = SurfacePresentation(2)


def same_psl(x, y, atol=1e-9):
    # matrices represent isometries only up to sign
    return np.allclose(x, y, atol=atol) or np.allclose(x, -y, atol=atol)


def w(text, genus=2):
    return parse_word(text, genus)


def letters(genus=2, max_size=8):
    alphabet = [x for i in range(1, 2 * genus + 1) for x in (i, -i)]
    return st.lists(st.sampled_from(alphabet), max_size=max_size).map(tuple)


def test_parse_and_format():
    assert str(w("a1 b1 A1 B1")) == "a1b1A1B1"
    assert w("a1b1A1B1") == w("a1 b1 A1 B1")
    assert str(w("")) == ""
    with pytest.raises(WordError):
        parse_word("a3", 2)
    with pytest.raises(WordError):
        parse_word("c1", 2)


@pytest.mark.parametrize("text,expected", [("a1 A1 b1", "b1"), ("", ""), ("a1 b1 B1 A1 a1", "a1")])
def test_free_reduce(text, expected):
    assert str(free_reduce(w(text))) == expected


def test_cyclic_reduce():
    c, conj = cyclic_reduce(w("a1 b1 A1"))
    assert (str(c), str(conj)) == ("b1", "a1")
    c, conj = cyclic_reduce(w("a1 b1"))
    assert (str(c), str(conj)) == ("a1b1", "")


def test_cyclic_reduce_reassembles():
    src = w("B1 a1 b1 A1 a1 b1")
    c, conj = cyclic_reduce(free_reduce(src))
    assert free_reduce(conj * c * invert(conj)) == free_reduce(src)


def test_relator_reduces_to_identity():
    assert str(P2.dehn_reduce(P2.relator)) == ""
    assert P2.is_trivial(P2.relator)
    assert str(P2.dehn_reduce(w("a1"))) == "a1"


def test_relator_minus_last_letter(rep2):
    rel = P2.relator.letters
    short = P2.dehn_reduce(Word(rel[:-1]))
    assert short.letters == (-rel[-1],)
    # independent check by matrices
    assert same_psl(rep2.evaluate(Word(rel[:-1])), rep2.evaluate(short))


def test_canonical_cyclic_permutation_and_distinct():
    assert P2.canonical(w("a1b1")) == P2.canonical(w("b1a1"))
    assert P2.canonical(w("a1")) != P2.canonical(w("a2"))
    with pytest.raises(IdentityError):
        P2.canonical(w("a1 A1"))


def test_invert():
    assert str(invert(w("a1 b1"))) == "B1A1"
    assert str(invert(w(""))) == ""


def test_primitive():
    assert is_primitive(P2.canonical(w("a1 b1")))
    assert not is_primitive(P2.canonical(w("a1 b1 a1 b1")))
    assert is_primitive(P2.canonical(w("a1 b1 A1 B1")))


def test_canonical_conjugation_invariance_random():
    rng = random.Random(11)
    checked = 0
    while checked < 1000:
        x = random_word(2, rng.randint(1, 8), rng)
        g = random_word(2, rng.randint(0, 8), rng)
        if P2.is_trivial(x):
            continue
        conj = free_reduce(g * x * invert(g))
        assert P2.canonical(x) == P2.canonical(conj), (x, g)
        checked += 1


@settings(max_examples=150, deadline=None)
@given(letters(), letters(max_size=4), st.integers(0, 7))
def test_canonical_relator_insertion(body, g, pos):
    x = free_reduce(Word(body))
    if not x or P2.is_trivial(x):
        return
    rel = P2.relator.letters
    k = pos % len(x)
    y = free_reduce(Word(x.letters[:k] + rel + x.letters[k:]))
    conj = free_reduce(Word(g) * y * invert(Word(g)))
    assert P2.canonical(conj) == P2.canonical(x)


@settings(max_examples=150, deadline=None)
@given(letters())
def test_dehn_reduce_idempotent_and_sound(body):
    rep = FuchsianRep(2)
    x = free_reduce(Word(body))
    r = P2.dehn_reduce(x)
    assert P2.dehn_reduce(r) == r
    assert len(r) <= len(x)
    assert same_psl(rep.evaluate(r), rep.evaluate(x), atol=1e-6)


def test_inverse_class_differs():
    rng = random.Random(5)
    for _ in range(200):
        x = random_word(2, rng.randint(1, 7), rng)
        if P2.is_trivial(x):
            continue
        assert P2.canonical(x) != P2.canonical(invert(x))


def test_format_word_roundtrip():
    assert format_word(w("a2 B2 b1").letters) == "a2B2b1"
