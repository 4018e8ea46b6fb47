import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from mds22.code import CodeSpec
from mds22.constructions import build_c1, build_c2
from mds22.errors import FieldTooLarge, NotMds
from mds22.gf import binary_field, prime_field
from mds22.linalg import Mat, rank, rref
from mds22.oracle import (
    bounds_report,
    brute_force_node_optima,
    candidate_table,
    enumerate_row_spaces,
    lemma2_witness,
    node_optima,
    oracle_dominance,
    random_mds_code,
    row_space_count,
    subset_less,
)
from mds22.repair import repair_degree, repair_stats


def planes_by_span(q):
    """2-dimensional subspaces of GF(q)^4 (q prime), each as the set of its vectors."""
    vecs = [v for v in itertools.product(range(q), repeat=4) if any(v)]
    planes = set()
    for u, v in itertools.combinations(vecs, 2):
        span = frozenset(tuple((a * x + b * y) % q for x, y in zip(u, v))
                         for a in range(q) for b in range(q))
        if len(span) == q * q:
            planes.add(span)
    return planes


@pytest.mark.parametrize("q,count", [(2, 35), (3, 130), (5, 806)])
def test_row_space_counts(q, count):
    assert row_space_count(q) == count
    reps = enumerate_row_spaces(prime_field(q))
    assert len(reps) == count
    assert len(planes_by_span(q)) == count


@pytest.mark.parametrize("q", [2, 3])
def test_representatives_are_distinct_rref_forms(q):
    f = prime_field(q)
    reps = enumerate_row_spaces(f)
    assert len({r.entries for r in reps}) == len(reps)
    every = set()
    for entries in itertools.product(range(q), repeat=8):
        m = Mat(2, 4, entries, f)
        if rank(m) == 2:
            every.add(rref(m)[0].entries)
    assert every == {r.entries for r in reps}


def test_binary_extension_counts():
    for m in (2, 3, 4):
        assert len(enumerate_row_spaces(binary_field(m))) == row_space_count(2 ** m)


def test_field_guard():
    with pytest.raises(FieldTooLarge):
        enumerate_row_spaces(prime_field(17))
    with pytest.raises(FieldTooLarge):
        node_optima(build_c1(4, prime_field(17)))


def test_not_mds_rejected(gf13):
    code = build_c1(4, gf13)
    dup = CodeSpec(4, gf13, (code.h(1),) * 2 + code.h_blocks[2:])
    with pytest.raises(NotMds):
        node_optima(dup)


def test_c1_k4_optima(c1_k4_gf13):
    optima = node_optima(c1_k4_gf13)
    assert optima[4].beta == 5
    for o in optima:
        assert o.gamma_relaxed <= o.gamma
        assert o.beta >= 4
        assert o.beta <= 8
        assert rref(o.witness_bw)[0] == o.witness_bw
        assert repair_stats(c1_k4_gf13, o.witness_bw).bandwidth == o.beta
        assert repair_stats(c1_k4_gf13, o.witness_io).io == o.gamma
        assert o.node in repair_stats(c1_k4_gf13, o.witness_bw).repairable_set


def test_bounds_examples(c1_k4_gf13, c2_k6_gf11):
    rep = bounds_report(c1_k4_gf13)
    assert rep.avg_beta >= 5
    assert rep.avg_beta == Fraction(17, 3)
    assert rep.all_satisfied
    rep2 = bounds_report(c2_k6_gf11)
    assert rep2.max_gamma == 9
    assert rep2.all_satisfied
    rep3 = bounds_report(build_c1(5, prime_field(13)))
    assert rep3.max_beta >= 7


def test_c2_k2_gf5():
    rep = bounds_report(build_c2(2, prime_field(5)))
    assert [o.beta for o in rep.per_node] == [3, 3, 3, 3]
    assert [o.gamma for o in rep.per_node] == [4, 4, 3, 3]
    assert rep.max_gamma >= 3


def test_json_shape(c1_k4_gf13):
    js = bounds_report(c1_k4_gf13).to_json()
    assert set(js) >= {"k", "q", "construction", "per_node", "avg_beta", "max_beta",
                       "avg_gamma", "max_gamma", "bounds", "satisfied"}
    assert js["avg_beta"] == {"num": 17, "den": 3}
    assert js["q"] == 13
    assert len(js["per_node"]) == 6


@pytest.mark.parametrize("builder,k,q", [(build_c1, 4, 13), (build_c2, 4, 7), (build_c2, 6, 11)])
def test_dominance(builder, k, q):
    code = builder(k, prime_field(q))
    for node, beta, bw, gamma, io in oracle_dominance(code, node_optima(code)):
        assert beta <= bw
        assert gamma <= io


def test_subset_order():
    assert subset_less({1, 3}, {1, 2, 4})
    assert subset_less({1, 3}, {1, 4})
    assert not subset_less({1, 4}, {1, 3})
    assert not subset_less({2, 5}, {2, 5})
    assert subset_less(set(), {1})


def test_subset_order_is_total():
    sets = [frozenset(c) for r in range(4) for c in itertools.combinations(range(1, 5), r)]
    for s, t in itertools.product(sets, repeat=2):
        assert (s == t) + subset_less(s, t) + subset_less(t, s) == 1
    ordered = sorted(sets, key=lambda s: (len(s), sorted(s)))
    for a, b in zip(ordered, ordered[1:]):
        assert subset_less(a, b)


@pytest.mark.parametrize("builder,k,q", [(build_c1, 4, 13), (build_c2, 6, 11), (build_c2, 2, 5)])
def test_lemma2_witnesses(builder, k, q):
    code = builder(k, prime_field(q))
    table = candidate_table(code)
    for i in code.nodes():
        m = lemma2_witness(code, i, table)
        st = repair_stats(code, m)
        assert i in st.repairable_set
        assert repair_degree(code, m) == k + 1
        assert st.io <= 2 * k


@pytest.mark.parametrize("q", [2, 3])
def test_brute_force_equivalence_random_codes(q):
    field = prime_field(q)
    code = random_mds_code(2, field, random.Random(q))
    fast = [(o.node, o.beta, o.gamma, o.gamma_relaxed) for o in node_optima(code)]
    assert fast == brute_force_node_optima(code)


def test_brute_force_equivalence_c2_gf5_tiny():
    code = build_c2(2, prime_field(5))
    opt = node_optima(code)
    # the whole 5^8 scan is too slow here; spot check against a sampled scan instead
    rng = random.Random(5)
    for _ in range(3000):
        m = Mat(2, 4, tuple(rng.randrange(5) for _ in range(8)), code.field)
        if rank(m) < 2:
            continue
        st = repair_stats(code, m)
        for i in st.repairable_set:
            assert opt[i - 1].beta <= st.bandwidth
            assert opt[i - 1].gamma <= st.io


@pytest.mark.parametrize("k,q", [(2, 2), (2, 3), (3, 3), (3, 5), (4, 7)])
def test_random_codes_meet_bounds(k, q):
    code = random_mds_code(k, prime_field(q), random.Random(k * q))
    rep = bounds_report(code)
    assert rep.all_satisfied, rep.to_json()


def test_thread_count_does_not_change_results(c2_k6_gf11, monkeypatch):
    a = candidate_table(c2_k6_gf11, workers=1)
    b = candidate_table(c2_k6_gf11, workers=4)
    assert np.array_equal(a.ranks, b.ranks) and np.array_equal(a.nzs, b.nzs)
    monkeypatch.setenv("MDS22_THREADS", "3")
    assert node_optima(c2_k6_gf11) == node_optima(c2_k6_gf11, a)
