import itertools
import json
import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from minmodel import (
    App,
    Budget,
    BudgetExceeded,
    LambdaError,
    Session,
    TermTypeError,
    canonical_rep,
    cellularize,
    count_classes,
    decide_equiv,
    dedup,
    is_hereditary_cellular,
    normalize,
    parse_term,
    parse_type,
    print_term,
    representatives,
)
from minmodel.model import check_fixpoint
from minmodel.oracle import brute_equiv, enumerate_terms, random_term

AB = ["a", "b"]

SMALL_TABLES = [
    ("o", "a"),
    ("o", "ab"),
    ("o->o", "a"),
    ("o->o", "ab"),
    ("o->o->o", "ab"),
    ("(o->o)->o", "a"),
    ("(o->o)->o", "ab"),
    ("o->(o->o)->o", "ab"),
    ("(o->o)->o->o", "ab"),
    ("((o->o)->o)->o", "a"),
]


def _table(ty, cs):
    return representatives(parse_type(ty), list(cs))


def _terms(table):
    return [print_term(t) for t in table.terms()]


# -- tables ----------------------------------------------------------------


def test_ground_table():
    table = _table("o", "ab")
    assert _terms(table) == ["a", "b"]
    assert table.arguments == ()


def test_unary_table_single_constant():
    table = _table("o->o", "a")
    (arg,) = table.arguments
    assert arg.bound == 2
    assert len(arg.fresh) == 2
    assert [print_term(v, canonical=False) for _, v in arg.candidates] == ["y0"]
    assert sorted(_terms(table)) == [r"\y0:o. a", r"\y0:o. y0"]


def test_unary_table_covers_three_classes(P):
    table = _table("o->o", "ab")
    terms = table.terms()
    for target in (r"\y:o. a", r"\y:o. b", r"\y:o. y"):
        assert any(decide_equiv(P(target), r, AB).equivalent for r in terms)


@pytest.mark.parametrize("ty, cs", SMALL_TABLES)
def test_table_invariants(ty, cs):
    table = _table(ty, cs)
    sig = set(cs)
    total = sum(len(a.candidates) for a in table.arguments)
    ids = {vid for a in table.arguments for vid, _ in a.candidates}
    for a in table.arguments:
        assert all(d.startswith("#") for d in a.fresh)
        assert not set(a.fresh) & sig
    for e in table.entries:
        assert e.term.is_closed
        assert e.term.type == parse_type(ty)
        assert e.term.constants <= sig
        assert e.used <= ids
        assert e.depth <= len(e.used) <= total
        assert is_hereditary_cellular(e.term)


@pytest.mark.parametrize("ty, cs", SMALL_TABLES)
def test_tables_are_saturated(ty, cs):
    assert check_fixpoint(_table(ty, cs)) == []


def test_used_sets_form_an_antichain_per_term():
    table = _table("(o->o)->o", "ab")
    by_term = {}
    for e in table.entries:
        by_term.setdefault(e.term, []).append(e.used)
    for sets in by_term.values():
        for x, y in itertools.permutations(sets, 2):
            assert not x <= y


def test_fresh_constant_levels():
    table = representatives(parse_type("o->o"), ["a", "#d0_1_1"])
    assert all(d.startswith("#d1_") for d in table.arguments[0].fresh)


def test_table_document():
    doc = _table("(o->o)->o", "ab").to_document()
    assert doc["type"] == "(o->o)->o"
    assert doc["constants"] == AB
    (arg,) = doc["arguments"]
    assert arg["bound"] == len(arg["fresh"])
    assert all(c["id"].startswith("v1.") for c in arg["candidates"])
    assert {"term", "used"} <= set(doc["entries"][0])
    assert json.loads(json.dumps(doc)) == doc


# -- dedup and counts ------------------------------------------------------


@pytest.mark.parametrize("ty, cs, n", [("o->o", "a", 1), ("o", "ab", 2), ("o->o->o", "ab", 4)])
def test_dedup_sizes(ty, cs, n):
    table = _table(ty, cs)
    reps = dedup(table)
    assert len(reps) == n
    for r, s in itertools.combinations(reps, 2):
        assert not decide_equiv(r, s, list(cs)).equivalent
    for t in table.terms():
        assert any(decide_equiv(t, r, list(cs)).equivalent for r in reps)


@pytest.mark.parametrize(
    "ty, cs, n",
    [
        ("o", "ab", 2),
        ("o->o", "a", 1),
        ("o->o", "ab", 3),
        ("o->o->o", "ab", 4),
        ("(o->o)->o", "ab", 4),
        ("o", "abc", 3),
        ("o->o", "abc", 4),
    ],
)
def test_count_classes(ty, cs, n):
    assert count_classes(parse_type(ty), list(cs)) == n


def test_count_classes_ground_matches_signature():
    for k in range(1, 5):
        cs = [f"c{i}" for i in range(k)]
        assert count_classes(parse_type("o"), cs) == k


# -- decisions -------------------------------------------------------------


def test_decide_examples(P):
    assert decide_equiv(P(r"\y:o. y", "a"), P(r"\y:o. a", "a"), ["a"]).equivalent
    v = decide_equiv(P(r"\y:o. y"), P(r"\y:o. a"), AB)
    assert not v.equivalent
    assert [print_term(w) for w in v.witness] == ["b"]
    assert (v.left, v.right) == ("b", "a")
    assert v.check_witness(P(r"\y:o. y"), P(r"\y:o. a"))


def test_identity_and_its_cellular_form(P):
    left = P(r"\y1:(o->o)->o. \y2:o->o. y1 (\z:o. y2 z)")
    right = P(r"\y1:(o->o)->o. \y2:o->o. y1 (\d:o. y2 (y1 (\z:o. z)))")
    assert decide_equiv(left, right, AB).equivalent


def test_decide_errors(P):
    with pytest.raises(TermTypeError):
        decide_equiv(P(r"\y:o. y"), P("a"), AB)
    with pytest.raises(LambdaError):
        decide_equiv(P(r"\y:o. b"), P(r"\y:o. y"), ["a"])
    with pytest.raises(ValueError):
        representatives(parse_type("o"), [])


def test_witness_is_first_in_order(P):
    t = P(r"\y:o->o->o. y a b")
    u = P(r"\y:o->o->o. y b a")
    v = decide_equiv(t, u, AB)
    assert not v.equivalent
    pool = Session().classes(parse_type("o->o->o"), AB)
    first = next(r for r in pool if normalize(App(t, r)) != normalize(App(u, r)))
    assert v.witness == (first,)
    assert v.check_witness(t, u)


def _pairs(ty, cs, bound):
    terms = enumerate_terms(parse_type(ty), cs, bound)
    return terms, list(itertools.combinations(terms, 2))


@pytest.mark.parametrize("ty, bound", [("o->o->o", 8), ("(o->o)->o", 9), ("(o->o)->o->o", 9)])
def test_equivalence_implies_no_bounded_witness(ty, bound):
    terms, pairs = _pairs(ty, AB, bound)
    for t, u in pairs:
        if decide_equiv(t, u, AB).equivalent:
            b = brute_equiv(t, u, AB, 7)
            assert b.equivalent and b.bounded


@pytest.mark.parametrize("ty, bound", [("o->o->o", 8), ("(o->o)->o", 9), ("((o->o)->o)->o", 9)])
def test_witnesses_recheck(ty, bound):
    terms, pairs = _pairs(ty, AB, bound)
    found = 0
    for t, u in pairs:
        v = decide_equiv(t, u, AB)
        if not v.equivalent:
            found += 1
            assert v.check_witness(t, u)
    assert found


@pytest.mark.parametrize("ty", ["(o->o)->o", "o->o->o", "((o->o)->o)->o"])
def test_equivalence_laws(ty):
    terms = enumerate_terms(parse_type(ty), AB, 9)
    rng = random.Random(3)
    sample = [rng.choice(terms) for _ in range(40)]
    eq = {(t, u): decide_equiv(t, u, AB).equivalent for t in sample for u in sample}
    for t in sample:
        assert eq[t, t]
    for t, u in itertools.product(sample, repeat=2):
        assert eq[t, u] == eq[u, t]
    for t, u, w in itertools.product(sample[:20], repeat=3):
        if eq[t, u] and eq[u, w]:
            assert eq[t, w]


@pytest.mark.parametrize("arg, result", [("(o->o)->o", "o"), ("o->(o->o)->o", "o->o"), ("(o->o)->o", "(o->o)->o")])
def test_congruence(arg, result):
    aty = parse_type(arg)
    fty = parse_type(f"({arg})->{result}")
    args = enumerate_terms(aty, AB, 9)
    rng = random.Random(8)
    eq_pairs = [(u, w) for u, w in itertools.combinations(args, 2) if u != w and decide_equiv(u, w, AB).equivalent]
    assert eq_pairs
    for _ in range(60):
        t = random_term(fty, AB, rng, max_size=25, var_bias=0.95, fill=0.8)
        u, w = rng.choice(eq_pairs)
        assert decide_equiv(normalize(App(t, u)), normalize(App(t, w)), AB).equivalent


# -- canonical selector ----------------------------------------------------


def test_canonical_examples(P):
    assert canonical_rep(P(r"\y:o->o. y (y a)"), AB) == canonical_rep(P(r"\y:o->o. y a"), AB)
    for ty in ("o->o", "o->o->o", "(o->o)->o", "((o->o)->o)->o"):
        for r in Session().classes(parse_type(ty), AB):
            assert canonical_rep(r, AB) == r


def test_canonical_invariant_under_cellularize():
    rng = random.Random(12)
    ty = parse_type("((o->o)->o)->o")
    for _ in range(60):
        t = random_term(ty, AB, rng, max_size=30, var_bias=0.97, fill=0.9)
        assert canonical_rep(t, AB) == canonical_rep(cellularize(t), AB)


# -- budgets, sessions ------------------------------------------------------


def test_budget_exceeded():
    s = Session(Budget(max_entries=50))
    with pytest.raises(BudgetExceeded):
        s.representatives(parse_type("((o->o)->o)->o"), AB)
    s = Session(Budget(max_candidates=5))
    with pytest.raises(BudgetExceeded):
        s.count_classes(parse_type("(o->o->o)->o"), ["a"])
    s = Session(Budget(time_limit=0.05))
    with pytest.raises(BudgetExceeded):
        s.count_classes(parse_type("(o->o->o)->o"), ["a"])


@pytest.mark.parametrize("kwargs", [{"max_entries": 0}, {"max_nodes": -1}, {"time_limit": 0}])
def test_budget_must_be_positive(kwargs):
    with pytest.raises(ValueError):
        Budget(**kwargs)


def test_memo_is_transparent(P):
    ty = parse_type("((o->o)->o)->o")
    warm = Session()
    warm.count_classes(ty, AB)
    cold = Session()
    t = P(r"\y:(o->o)->o. y (\z:o. y (\w:o. z))")
    assert warm.canonical_rep(t, AB) == cold.canonical_rep(t, AB)
    assert [print_term(r) for r in warm.classes(ty, AB)] == [print_term(r) for r in cold.classes(ty, AB)]


def test_concurrent_queries_agree():
    ty = parse_type("(o->o)->o->o")
    terms = enumerate_terms(ty, AB, 9)
    shared = Session()
    expected = [print_term(Session().canonical_rep(t, AB)) for t in terms]
    with ThreadPoolExecutor(max_workers=4) as pool:
        got = list(pool.map(lambda t: print_term(shared.canonical_rep(t, AB)), terms))
    assert got == expected


def test_session_records_tables():
    s = Session()
    s.count_classes(parse_type("o->o->o"), AB)
    types = {str(t.for_type) for t in s.tables()}
    assert {"o", "o->o->o"} <= types


def test_parse_constants_from_reserved_names():
    # generated constants may be parsed back when they are in the signature
    t = parse_term(r"\y:o. #d0_1_1", ["a", "#d0_1_1"])
    assert t.constants == {"#d0_1_1"}
