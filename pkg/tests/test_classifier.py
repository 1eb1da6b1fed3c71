import json

from hypothesis import given, settings
from hypothesis import strategies as st

from ucqenum.classifier import (
    INTRACTABLE,
    TRACTABLE,
    UNKNOWN,
    bypass_guarded,
    classify,
    free_path_guarded,
    is_isolated,
    select_pivot,
    union_extension_search,
    union_guard_search,
)
from ucqenum.golden import GOLDEN, golden_queries
from ucqenum.query import normalize_body_isomorphic, parse_ucq
from ucqenum.structure import FreePath, free_paths, is_s_connex
from ucqenum.testkit import brute_union_guard, gen_random_query

Q = golden_queries(extra=True)


def vsets(ext):
    return sorted(tuple(sorted(v.args)) for v in ext.virtual)


def shared(name):
    return normalize_body_isomorphic(Q[name])


def test_search_intro():
    r = union_extension_search(Q["intro"])
    assert r.ok
    q1, q2 = r.certificate(Q["intro"])
    assert [v.args for v in q1.virtual] == [("x", "z", "y")]
    assert q2.virtual == ()


def test_search_yellow():
    r = union_extension_search(Q["yellow"])
    q1, q2, q3 = r.certificate(Q["yellow"])
    assert vsets(q3) == [("x", "y", "z1")]
    assert vsets(q2) == [("u", "v", "z1")]
    assert vsets(q1) == sorted([tuple(sorted("x z1 z2 y".split())), tuple(sorted("x z2 z3 y".split()))])


def test_search_free_connex_union_is_empty():
    q = parse_ucq("Q1(x,y) <- R(x,y). Q2(x,y) <- S(x,y), T(y).")
    r = union_extension_search(q)
    assert all(e.virtual == () for e in r.certificate(q))


def test_certificates_are_sound():
    for name in ("intro", "yellow", "hards-are-easy", "cyclic-easy"):
        v = classify(Q[name])
        for e in v.certificate:
            assert e.is_free_connex()
            assert is_s_connex(e.edges(), e.free)
            for va in e.virtual:
                assert va.witness.check(e.base)
                assert set(va.args) == va.witness.V1
                assert va.witness.provider.depth < e.depth


def test_pivot_intractables():
    p = select_pivot(Q["intractables"])
    assert p.name in ("Q1", "Q2")


def test_pivot_single():
    q = parse_ucq("Q(x) <- R(x,y).")
    assert select_pivot(q).name == "Q"


def test_pivot_disjoint():
    q = parse_ucq("Q1(x) <- R(x,y). Q2(x) <- S(x,y).")
    assert select_pivot(q).name in ("Q1", "Q2")


def test_free_path_guarded_hards():
    s = shared("hards-are-easy").as_ucq()
    ok, _ = free_path_guarded(s[0], s[1])
    assert ok
    assert [p.vars for p in free_paths(s[0])] == [("w", "v", "y")]


def test_free_path_guard_violated_matmul():
    s = shared("body-iso-matmul").as_ucq()
    ok, P = free_path_guarded(s[0], s[1])
    assert not ok
    assert P.vars == ("w", "v", "y")


def test_free_path_guarded_free_connex_owner():
    q = parse_ucq("Q1(x,y,z) <- R(x,y), S(y,z). Q2(x,y,z) <- R(x,y), S(y,z).")
    assert free_path_guarded(q[0], q[1]) == (True, None)


def test_free_path_guard_unnormalized_input():
    q = Q["body-iso-matmul"]
    ok, _ = free_path_guarded(q[0], q[1])
    assert not ok


def test_bypass_hards():
    s = shared("hards-are-easy").as_ucq()
    assert bypass_guarded(s[0], s[1])[0]


def test_bypass_violated_4clique():
    s = shared("acyclic-4clique").as_ucq()
    ok, (P, u) = bypass_guarded(s[0], s[1])
    assert not ok
    assert P.vars == ("x", "w", "y") and u == "t"


def test_bypass_no_paths():
    q = parse_ucq("Q1(x,y) <- R(x,y). Q2(x,y) <- R(x,y).")
    assert bypass_guarded(q[0], q[1]) == (True, None)


def test_union_guard_star():
    sb = shared("star")
    g = union_guard_search(sb, FreePath(("x1", "z", "x2"), 0))
    assert g is not None
    assert {frozenset(s) for s in g.sets} == {frozenset({"x1", "x2"}), frozenset({"x1", "z", "x2"})}
    assert brute_union_guard(sb.frees(), FreePath(("x1", "z", "x2"), 0))
    json.dumps(g.to_json())


def test_union_guard_all_free():
    q = parse_ucq("Q1(a,c,c), Q2(a,b,c) <- R(a,b), S(b,c).")
    assert union_guard_search(q, FreePath(("a", "b", "c"), 0)) is not None


def test_union_guard_missing_endpoints():
    q = parse_ucq("Q1(a,z), Q2(z,c) <- R(a,b), S(b,c), T(a,z), U(z,c).")
    assert union_guard_search(q, FreePath(("a", "b", "c"), 0)) is None


def test_union_guard_tree_shape():
    q = parse_ucq("Q1(a,e,e), Q2(a,c,e), Q3(a,b,c), Q4(c,d,e) <- R1(a,b), R2(b,c), R3(c,d), R4(d,e).")
    g = union_guard_search(q, FreePath(("a", "b", "c", "d", "e"), 0))
    assert g.triples[0] == ("a", "c", "e")
    assert len(g.triples) == 3 and len(g.tree_edges) == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_union_guard_matches_brute_force(seed):
    import random

    rng = random.Random(seed)
    k = rng.randint(3, 4)
    z = tuple(f"z{i}" for i in range(k))
    frees = [frozenset(v for v in z if rng.random() < 0.6) for _ in range(rng.randint(1, 3))]
    P = FreePath(z, 0)
    assert (union_guard_search(frees_ucq(frees, z), P) is not None) == brute_union_guard(frees, P)


def frees_ucq(frees, z):
    body = ", ".join(f"R{i}({a},{b})" for i, (a, b) in enumerate(zip(z, z[1:])))
    width = max(len(f) for f in frees) or 1
    # pad heads to a common arity by repeating the last variable
    padded = []
    for f in frees:
        hv = sorted(f, key=z.index) or [z[0]]
        hv = hv + [hv[-1]] * (width - len(hv))
        padded.append(f"Q{len(padded) + 1}({','.join(hv)})")
    return parse_ucq(", ".join(padded) + f" <- {body}.")


def test_isolated_star():
    sb = shared("star")
    assert not is_isolated(sb, FreePath(("x1", "z", "x2"), 0))


def test_isolated_single_path():
    q = parse_ucq("Q(x,y,v,u) <- R1(x,z1),R2(z1,z2),R3(z2,z3),R4(z3,y),R5(y,v,u).")
    P = free_paths(q[0])[0]
    assert P.vars == ("x", "z1", "z2", "z3", "y")
    assert all(P == R for R in free_paths(q[0]))
    assert is_isolated(q, P)


def test_golden_verdicts():
    for name, (_, kind, hyp) in GOLDEN.items():
        v = classify(Q[name])
        assert v.kind == kind, name
        if hyp:
            assert v.hypothesis == hyp, name


def test_intractable_witnesses():
    v = classify(Q["body-iso-matmul"])
    assert v.certificate["path"] == ["w", "v", "y"]
    v = classify(Q["acyclic-4clique"])
    assert v.certificate["variable"] == "t"


def test_unknown_has_notes():
    for name in ("separated", "star", "cyclic-guarded-hard", "newtetra", "cyclic-free-path"):
        v = classify(Q[name])
        assert v.kind == UNKNOWN and v.notes


def test_redundancy_removed_note():
    v = classify(Q["redundancy"])
    assert v.kind == TRACTABLE
    assert any("redundant" in n for n in v.notes)


def test_verdict_json():
    doc = classify(Q["intro"]).to_json()
    json.dumps(doc)
    va = doc["certificate"]["extensions"][0]["virtual_atoms"][0]
    assert va["vars"] == ["x", "z", "y"] and va["provider"] == "Q2"


def test_determinism():
    for name in ("yellow", "star"):
        a, b = classify(Q[name]).to_json(), classify(Q[name]).to_json()
        assert a == b


def test_self_joins_skip_lower_bounds():
    q = parse_ucq("Q1(x,y) <- R(x,z), R(z,y).")
    v = classify(q)
    assert v.kind == UNKNOWN


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_never_intractable_when_search_succeeds(seed):
    q = gen_random_query(seed, disjuncts=2, atoms=3, variables=4)
    v = classify(q)
    if union_extension_search(v.query).ok:
        assert v.kind == TRACTABLE
    if v.kind == INTRACTABLE:
        assert v.hypothesis in ("mat-mul", "hyperclique", "4-clique")


def random_shared(seed, heads):
    import random

    rng = random.Random(seed)
    base = gen_random_query(seed, atoms=rng.randint(2, 4), variables=5, acyclic=True)[0]
    vs = sorted(base.vars)
    k = rng.randint(1, len(vs))
    hs = [",".join(rng.sample(vs, k)) for _ in range(heads)]
    body = ", ".join(str(a) for a in base.body)
    return parse_ucq(", ".join(f"Q{i + 1}({h})" for i, h in enumerate(hs)) + f" <- {body}.")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 1_000_000))
def test_two_guarded_implies_certificate(seed):
    q = random_shared(seed, 2)
    a, b = q
    if (free_path_guarded(a, b)[0] and free_path_guarded(b, a)[0]
            and bypass_guarded(a, b)[0] and bypass_guarded(b, a)[0]):
        assert union_extension_search(q).ok


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 1_000_000))
def test_guarded_isolated_implies_certificate(seed):
    q = random_shared(seed, 3)
    paths = [P for c in q for P in free_paths(c)]
    if all(union_guard_search(q, P) is not None and is_isolated(q, P) for P in paths):
        assert union_extension_search(q).ok
