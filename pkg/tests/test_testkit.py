import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucqenum.engine import Database, load_database, write_database
from ucqenum.golden import golden_queries
from ucqenum.morphism import has_body_hom
from ucqenum.query import make_ucq, parse_ucq
from ucqenum.structure import free_paths
from ucqenum.testkit import (
    BOTTOM,
    all_matrices,
    bool_product,
    clique_witnesses,
    brute_force_cq,
    brute_force_eval,
    endpoint_pairs,
    gen_matmul,
    gen_random,
    gen_random_query,
    gen_triangle_list,
    gen_var_tagged,
    has_four_clique,
    matmul_exhaustive,
    random_graph,
    triangles,
)

Q = golden_queries()
K4 = [(a, b) for a in range(1, 5) for b in range(a + 1, 5)]


def test_brute_force_intro():
    db = {"R1": {(1, 2)}, "R2": {(2, 3)}, "R3": {(3, 4)}}
    assert brute_force_eval(Q["intro"], db) == {(1, 2, 3), (1, 3, 4)}


def test_brute_force_trivial():
    q = parse_ucq("Q(x) <- R(x).")
    assert brute_force_eval(q, {"R": {(1,)}}) == {(1,)}
    assert brute_force_eval(q, {}) == set()


def test_brute_force_interned():
    db = Database.from_rows({"R1": [(1, 2)], "R2": [(2, 3)], "R3": [(3, 4)]})
    got = {db.decode(a) for a in brute_force_eval(Q["intro"], db)}
    assert got == {("1", "2", "3"), ("1", "3", "4")}


def test_var_tagged_example():
    q = parse_ucq("Q(x,z) <- R1(x,z).")
    rows, tau = gen_var_tagged(q, q[0], {"R1": {(1, 2)}})
    assert rows["R1"] == [("1#x", "2#z")]
    assert tau(("1#x", "2#z")) == ("1", "2")


def test_var_tagged_empty():
    rows, _ = gen_var_tagged(Q["intro"], Q["intro"][0], {})
    assert all(r == [] for r in rows.values())


def test_var_tagged_other_relations_empty():
    q = parse_ucq("Q1(x) <- R(x,y). Q2(x) <- S(x,y).")
    rows, _ = gen_var_tagged(q, q[0], {"R": {(1, 2)}, "S": {(3, 4)}})
    assert rows["S"] == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_var_tagged_intractables_q3_silent(seed):
    q = Q["intractables"]
    q1, q3 = q[0], q[2]
    assert not has_body_hom(q3, q1)
    db = gen_random(seed, q.arities, 6, 4)
    rows, _ = gen_var_tagged(q, q1, db)
    assert brute_force_cq(q3, rows) == set()


def test_var_tagged_reduction_exact():
    q = Q["intro"]
    pivot = q[1]
    assert not has_body_hom(q[0], pivot)
    for seed in range(20):
        db = gen_random(seed, q.arities, 5, 3)
        rows, tau = gen_var_tagged(q, pivot, db)
        got = sorted(tau(a) for a in brute_force_eval(q, rows))
        want = sorted(brute_force_cq(pivot, db.decoded()))
        assert got == want


def intro_q1():
    q = parse_ucq("Q1(x,y,w) <- R1(x,z),R2(z,y),R3(y,w). Q2(x,y,w) <- R1(x,y),R2(y,w).")
    return q, free_paths(q[0])[0]


def test_matmul_rows_intro():
    q, P = intro_q1()
    assert P.vars == ("x", "z", "y")
    A, B = {(1, 1), (1, 2)}, {(1, 1)}
    rows = gen_matmul(A, B, q, P)
    assert set(rows["R1"]) == {("1", "1"), ("1", "2")}
    assert set(rows["R2"]) == {("1", "1")}
    # the general construction puts B-derived rows in R3
    assert set(rows["R3"]) == {("1", BOTTOM)}
    # the hand-made encoding with R3 = {1..n} x {⊥} gives the same answers
    hand = dict(rows, R3=[(str(i), BOTTOM) for i in (1, 2)])
    assert brute_force_cq(q[0], hand) == brute_force_cq(q[0], rows)


def test_matmul_small():
    q, P = intro_q1()
    rows = gen_matmul({(1, 1)}, {(1, 1)}, q, P)
    assert ("1", "1") in endpoint_pairs(q, P, rows)
    assert endpoint_pairs(q, P, gen_matmul(set(), {(1, 1)}, q, P)) == set()


def test_matmul_identity():
    q, P = intro_q1()
    eye = {(1, 1), (2, 2)}
    assert endpoint_pairs(q, P, gen_matmul(eye, eye, q, P)) == {("1", "1"), ("2", "2")}


def test_matmul_split_errors():
    q, P = intro_q1()
    with pytest.raises(Exception):
        gen_matmul({(1, 1)}, {(1, 1)}, q, P, split=0)


def test_matmul_exhaustive_2x2():
    q, P = intro_q1()
    assert matmul_exhaustive(q, P, n=2) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**9 - 1), st.integers(0, 2**9 - 1))
def test_matmul_direct_3x3(i, j):
    q, P = intro_q1()
    mats = list(all_matrices(3))
    A, B = mats[i], mats[j]
    want = {(str(a), str(c)) for a, c in bool_product(A, B, 3)}
    assert endpoint_pairs(q, P, gen_matmul(A, B, q, P)) == want


def test_triangles_k4():
    assert len({frozenset(t) for t in triangles(K4)}) == 4
    assert has_four_clique(K4)


def test_triangle_list_k4():
    q = Q["acyclic-4clique"]
    assert clique_witnesses(K4, q)


def test_triangle_list_k4_minus_edge():
    G = [e for e in K4 if e != (1, 2)]
    assert not has_four_clique(G)
    assert clique_witnesses(G, Q["acyclic-4clique"]) == []


def test_triangle_rows_shape():
    rows = gen_triangle_list(K4, Q["acyclic-4clique"])
    # 24 ordered triangles, each atom keeps (z0 or z2, z1, u) values
    assert len(rows["R1"]) == 24 and len(rows["R2"]) == 24


def test_triangle_free_graph():
    q = Q["acyclic-4clique"]
    rows = gen_triangle_list([(1, 2), (2, 3), (3, 4)], q)
    assert all(r == [] for r in rows.values())


def test_random_graph_deterministic():
    assert random_graph(5, 10) == random_graph(5, 10)


def test_gen_random_deterministic():
    schema = {"R": 2, "S": 3}
    assert gen_random(7, schema, 20, 5).decoded() == gen_random(7, schema, 20, 5).decoded()


def test_gen_random_empty():
    db = gen_random(1, {"R": 2}, 0, 5)
    assert db.get("R") == []


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_random_query_valid(seed):
    q = gen_random_query(seed, disjuncts=2)
    assert make_ucq(list(q)) == q


def test_generators_load(tmp_path):
    q, P = intro_q1()
    cases = {
        "matmul": (gen_matmul({(1, 2)}, {(2, 1)}, q, P), q.arities),
        "triangle": (gen_triangle_list(K4, Q["acyclic-4clique"]), Q["acyclic-4clique"].arities),
        "tagged": (gen_var_tagged(q, q[1], {"R1": {(1, 2)}, "R2": {(2, 3)}})[0], q.arities),
        "random": (gen_random(0, q.arities, 5, 3).decoded(), q.arities),
    }
    for name, (rows, ar) in cases.items():
        db = load_database(write_database(rows, tmp_path / name, ar))
        assert db.decoded() == {k: set(v) for k, v in rows.items()}
