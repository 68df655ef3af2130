import random

import pytest
from hypothesis import strategies as st

from latticetn.lattice import Token, TokenKind, build_lattice
from latticetn.verbalize import Verbalizer

# small alphabet so random sentences actually collide with random lexicons
ALPHABET = "学习好天气温年月日分电话比赛0123456789"


@pytest.fixture(scope="session")
def verbalizer():
    return Verbalizer.default()


def make_random_lattice(rng: random.Random, max_len: int = 12):
    """Random sentence plus random word/NSW spans, built into a lattice."""
    length = rng.randint(1, max_len)
    sentence = "".join(rng.choice(ALPHABET) for _ in range(length))
    words = []
    nsws = []
    for _ in range(rng.randint(0, max_len)):
        head = rng.randrange(length)
        tail = rng.randint(head, length - 1)
        text = sentence[head : tail + 1]
        if rng.random() < 0.5:
            words.append(Token(text, head, tail, TokenKind.WORD))
        else:
            nsws.append(Token(text, head, tail, TokenKind.NSW, rule=rng.choice("AB")))
    return build_lattice(sentence, words, nsws)


@st.composite
def lattices(draw, max_len: int = 10):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return make_random_lattice(random.Random(seed), max_len=max_len)
