import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucqenum.query import (
    ArityError,
    HeadArityError,
    HeadVariableError,
    ParseError,
    format_ucq,
    normalize_body_isomorphic,
    parse_ucq,
    remove_redundant,
)
from ucqenum.testkit import brute_force_cq, brute_force_eval, gen_random_query, random_rows

INTRO = "Q1(x,y,w) <- R1(x,z),R2(z,y),R3(y,w). Q2(x,y,w) <- R1(x,y),R2(y,w)."


def test_parse_intro():
    q = parse_ucq(INTRO)
    assert len(q) == 2
    assert q.head_arity == 3
    assert [a.relation for a in q[0].body] == ["R1", "R2", "R3"]
    assert q[0].free == {"x", "y", "w"}
    assert q[0].existential == {"z"}


def test_parse_minimal():
    q = parse_ucq("Q(x) <- R(x).")
    assert len(q) == 1 and len(q[0].body) == 1


def test_head_variable_missing():
    with pytest.raises(HeadVariableError):
        parse_ucq("Q(x) <- R(y).")


def test_arity_mismatch():
    with pytest.raises(ArityError):
        parse_ucq("Q1(x) <- R(x,y). Q2(x) <- R(x).")


def test_head_arity_mismatch():
    with pytest.raises(HeadArityError):
        parse_ucq("Q1(x) <- R(x,y). Q2(x,y) <- R(x,y).")


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_ucq("Q(x) <- R(x,.")
    assert e.value.line == 1
    assert e.value.column > 1


def test_comments_and_unicode_arrow():
    q = parse_ucq("% a comment\nQ(x) ← R(x,y).  % trailing\n")
    assert q[0].head == ("x",)


def test_multi_head_rule():
    q = parse_ucq("Q1(x,y,t), Q2(x,y,w) <- R1(x,w,t), R2(y,w,t).")
    assert len(q) == 2
    assert q[0].body == q[1].body


def test_self_join_flag():
    q = parse_ucq("Q(x) <- R(x,y), R(y,x).")
    assert not q[0].self_join_free


def test_remove_redundant_triangle():
    q = parse_ucq("Q1(x,y)<-R1(x,y),R2(y,z),R3(z,x). Q2(x,y)<-R1(x,y),R2(y,z).")
    r = remove_redundant(q)
    assert [c.name for c in r] == ["Q2"]


def test_remove_redundant_single():
    q = parse_ucq("Q(x) <- R(x,y).")
    assert remove_redundant(q) == q


def _contained_small(q1, q2, schema, domain=2):
    # brute force containment over every database on `domain` constants
    tuples = {r: list(itertools.product(range(domain), repeat=k)) for r, k in schema.items()}
    names = sorted(schema)
    choices = [list(itertools.chain.from_iterable(
        itertools.combinations(tuples[r], n) for n in range(len(tuples[r]) + 1))) for r in names]
    for pick in itertools.product(*choices):
        db = dict(zip(names, pick))
        if not brute_force_cq(q1, db) <= brute_force_cq(q2, db):
            return False
    return True


def test_remove_redundant_loop():
    q = parse_ucq("Q1(x) <- R(x,y). Q2(x) <- R(x,x).")
    r = remove_redundant(q)
    assert [c.name for c in r] == ["Q1"]
    # oracle: Q2 ⊆ Q1 and not the other way, over all databases on 2 constants
    assert _contained_small(q[1], q[0], {"R": 2})
    assert not _contained_small(q[0], q[1], {"R": 2})


def test_normalize_body_iso_matmul():
    q = parse_ucq("Q1(x,y,v)<-R1(x,z),R2(z,y),R3(y,v),R4(v,w). Q2(x,y,v)<-R1(w,v),R2(v,y),R3(y,z),R4(z,x).")
    sb = normalize_body_isomorphic(q)
    assert [str(a) for a in sb.body] == ["R1(w,v)", "R2(v,y)", "R3(y,z)", "R4(z,x)"]
    assert sb.heads == (("w", "y", "z"), ("x", "y", "v"))


def test_normalize_single():
    q = parse_ucq("Q(x) <- R(x,y).")
    sb = normalize_body_isomorphic(q)
    assert len(sb.heads) == 1


def test_normalize_fails():
    q = parse_ucq("Q1(x) <- R(x,y). Q2(x) <- S(x,y).")
    assert normalize_body_isomorphic(q) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_round_trip(seed, disjuncts):
    q = gen_random_query(seed, disjuncts=disjuncts)
    assert parse_ucq(format_ucq(q)) == q


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_remove_redundant_preserves_answers(seed):
    q = gen_random_query(seed, disjuncts=3, atoms=2, variables=3)
    r = remove_redundant(q)
    for k in range(5):
        db = random_rows(seed * 7 + k, q.arities, 3, 4)
        assert brute_force_eval(q, db) == brute_force_eval(r, db)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_normalize_preserves_answers(seed):
    base = gen_random_query(seed, atoms=3, variables=4)
    c = base[0]
    # a renamed copy is body-isomorphic by construction
    ren = {v: v + "_" for v in c.vars}
    text = f"{format_ucq(base)}\nQ2({','.join(ren[v] for v in c.head)}) <- " + ", ".join(
        f"{a.relation}({','.join(ren[v] for v in a.args)})" for a in c.body) + "."
    q = parse_ucq(text)
    if not all(d.self_join_free for d in q):
        return
    sb = normalize_body_isomorphic(q)
    assert sb is not None
    shared = sb.as_ucq()
    db = random_rows(seed, q.arities, 4, 3)
    for orig, new in zip(q, shared):
        assert brute_force_cq(orig, db) == brute_force_cq(new, db)
