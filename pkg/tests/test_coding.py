from hypothesis import given, strategies as st

from posequiv.coding import (cantor_pairs, decode_tuple, encode_tuple, finite_set,
                             finite_set_code, pair, unpair)
from oracles import binary_set

nat = st.integers(min_value=0, max_value=10**6)


def test_pair_first_values():
    assert [pair(*p) for p in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]] == list(range(6))


def test_cantor_pairs_follow_code_order():
    assert [pair(x, y) for x, y in cantor_pairs(50)] == list(range(50))


@given(nat, nat)
def test_unpair_inverts_pair(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.lists(st.integers(min_value=0, max_value=500), max_size=6))
def test_tuple_round_trip(values):
    assert decode_tuple(encode_tuple(values)) == tuple(values)


def test_tuple_codes_are_distinct_on_small_tuples():
    tuples = [()] + [(a,) for a in range(6)] + [(a, b) for a in range(6) for b in range(6)]
    codes = [encode_tuple(t) for t in tuples]
    assert len(set(codes)) == len(codes)


@given(st.integers(min_value=0, max_value=2**20))
def test_finite_set_matches_binary_expansion(i):
    assert finite_set(i) == binary_set(i)
    assert finite_set_code(finite_set(i)) == i
