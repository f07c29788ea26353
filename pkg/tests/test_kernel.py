import random

import pytest
from hypothesis import given, settings, strategies as st

from minmodel import (
    App,
    Arrow,
    Const,
    Lam,
    O,
    ParseError,
    TermTypeError,
    Var,
    alpha_eq,
    apply,
    beta_normalize,
    eta_long,
    identity,
    normalize,
    parse_raw,
    parse_signature,
    parse_term,
    parse_type,
    print_term,
    substitute,
)
from minmodel.kernel import (
    Signature,
    UnboundVariable,
    arg_types,
    canonical_names,
    evaluate,
    strip_lams,
    substitute_raw,
    type_of,
)
from minmodel.oracle import random_term

from corpus import ORDER4_TYPES

seeds = st.integers(min_value=0, max_value=2**32 - 1)
type_names = st.sampled_from(ORDER4_TYPES + ["o", "o->o->o", "(o->o)->o"])


def _random(seed, ty, size=30):
    rng = random.Random(seed)
    return random_term(parse_type(ty), ["a", "b"], rng, max_size=size, var_bias=0.95, fill=0.8)


# -- types ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, expected",
    [
        ("o", O),
        ("o->o->o", Arrow(O, Arrow(O, O))),
        ("(o->o)->o", Arrow(Arrow(O, O), O)),
        ("((o->o)->o)->((o->o)->o)", Arrow(Arrow(Arrow(O, O), O), Arrow(Arrow(O, O), O))),
    ],
)
def test_parse_type(text, expected):
    assert parse_type(text) == expected
    assert parse_type(str(expected)) == expected


@pytest.mark.parametrize("text, order", [("o", 1), ("o->o", 2), ("o->o->o", 2), ("(o->o)->o", 3), ("((o->o)->o)->(o->o)->o", 4)])
def test_order(text, order):
    assert parse_type(text).order == order


@pytest.mark.parametrize("text", ["", "o->", "(o", "o o", "p", "o->(o->)"])
def test_bad_types(text):
    with pytest.raises(ParseError):
        parse_type(text)


# -- parsing and printing -----------------------------------------------


def test_parse_identity_at_ground(P):
    t = P(r"\y:o. y", "a")
    assert alpha_eq(t, Lam("z", O, Var("z", O)))
    assert print_term(t) == r"\y0:o. y0"


def test_redex_collapses(P):
    assert P(r"(\x:o. x) a", "a") == Const("a")
    assert print_term(Const("a")) == "a"


def test_nested_term_type(P):
    t = P(r"\y1:(o->o)->o. \y2:(o->o)->o. y1 (\z:o. y2 (\w:o. z))")
    assert t.type == parse_type("((o->o)->o)->((o->o)->o)->o")


@pytest.mark.parametrize(
    "text, message",
    [
        (r"\y:o. y y", "type error"),
        (r"\y:o. c", "unknown identifier"),
        (r"\y:o y", "expected"),
        (r"(\y:o. y", "expected"),
        (r"\y:o. y )", "unexpected"),
        (r"\y:o. y $", "unexpected character"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_term(text, ["a"])
    assert info.value.pos >= 0


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_term(r"\y:o. q", ["a"])
    assert info.value.pos == 6


def test_signature_rules():
    assert list(parse_signature("a, b")) == ["a", "b"]
    with pytest.raises(ValueError):
        parse_signature("a,#d")
    with pytest.raises(ValueError):
        parse_signature("")
    with pytest.raises(ValueError):
        Signature(["a", "a"])
    with pytest.raises(ValueError):
        Signature(["1a"])


def test_lambda_synonym(P):
    assert P("λy:o. y") == P(r"\y:o. y")


# -- typing ---------------------------------------------------------------


def test_type_of():
    assert type_of(Const("a")) == O
    assert type_of(Lam("y", O, Var("y", O))) == Arrow(O, O)
    f = parse_type("(o->o)->o")
    assert type_of(Var("y1", f), {"y1": f}) == f
    with pytest.raises(UnboundVariable):
        type_of(Var("y1", f))
    with pytest.raises(TermTypeError):
        type_of(Var("y1", f), {"y1": O})


def test_ill_typed_application():
    with pytest.raises(TermTypeError):
        App(Const("a"), Const("b"))
    with pytest.raises(TermTypeError):
        App(Var("f", Arrow(O, O)), Lam("x", O, Var("x", O)))


# -- normalization ---------------------------------------------------------


def test_beta_examples(P):
    assert beta_normalize(parse_raw(r"(\x:o. x) a", ["a"])) == Const("a")
    t = parse_raw(r"(\f:o->o. \x:o. f (f x)) (\y:o. a) b", ["a", "b"])
    assert beta_normalize(t) == Const("a")
    n = P(r"\y:o->o. y (y a)")
    assert beta_normalize(n) == n


def test_eta_examples():
    oo = Arrow(O, O)
    t = Lam("y", oo, Var("y", oo))
    assert alpha_eq(eta_long(t), Lam("y", oo, Lam("x", O, App(Var("y", oo), Var("x", O)))))
    assert eta_long(Const("a")) == Const("a")


def test_identity_is_eta_long(P):
    ident = identity(parse_type("(o->o)->o"))
    assert ident.type == parse_type("((o->o)->o)->((o->o)->o)")
    assert ident == P(r"\y1:(o->o)->o. \y2:o->o. y1 (\z:o. y2 z)")


@pytest.mark.parametrize(
    "left, right, expected",
    [
        (r"\y:o. y", r"\z:o. z", True),
        (r"\y:o. a", r"\y:o. b", False),
        (r"\y1:(o->o)->o. \y2:o->o. y1 (\z:o. y2 z)", r"\u:(o->o)->o. \v:o->o. u (\w:o. v w)", True),
        (r"\y1:o. \y2:o. y1", r"\y1:o. \y2:o. y2", False),
    ],
)
def test_alpha_eq(P, left, right, expected):
    assert alpha_eq(parse_raw(left, ["a", "b"]), parse_raw(right, ["a", "b"])) is expected
    assert (P(left) == P(right)) is expected


def test_canonical_names_skip_free_names():
    t = Lam("x", O, App(Var("y0", Arrow(O, O)), Var("x", O)))
    c = canonical_names(t)
    assert c.var == "y1"
    assert alpha_eq(c, t)


# -- substitution -------------------------------------------------------------


def test_substitute_examples():
    oo = Arrow(O, O)
    t = App(Var("y", oo), Var("x", O))
    assert substitute(t, Var("x", O), Const("a")) == App(Var("y", oo), Const("a"))
    u = Lam("z", O, Var("x", O))
    r = substitute(u, "x", Var("z", O))
    assert alpha_eq(r, Lam("w", O, Var("z", O)))
    assert r.free_vars == {"z": O}
    v = App(Var("y1", oo), Const("#d0_1_1"))
    assert substitute(v, Const("#d0_1_1"), Const("a")) == App(Var("y1", oo), Const("a"))


def test_substitute_type_mismatch():
    with pytest.raises(TermTypeError):
        substitute(App(Var("y", Arrow(O, O)), Var("x", O)), "x", Lam("z", O, Var("z", O)))
    with pytest.raises(TermTypeError):
        substitute(Const("a"), Const("a"), Lam("z", O, Var("z", O)))


# -- properties -----------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(seed=seeds, ty=type_names)
def test_print_parse_round_trip(seed, ty):
    t = _random(seed, ty)
    text = print_term(t)
    back = parse_term(text, ["a", "b"])
    assert alpha_eq(back, t)
    assert print_term(back) == text


@settings(max_examples=150, deadline=None)
@given(seed=seeds, ty=type_names)
def test_normalize_idempotent(seed, ty):
    t = _random(seed, ty)
    assert normalize(t) == t
    assert beta_normalize(beta_normalize(t)) == beta_normalize(t)
    assert eta_long(eta_long(t)) == eta_long(t)


def _redex(seed, ty):
    """A closed ``(\\x. body) w`` of the codomain, with its parts."""
    fty = parse_type(ty)
    f = _random(seed, ty, size=20)
    w = _random(seed + 1, str(arg_types(fty)[0]), size=12)
    return f, w


redex_types = st.sampled_from(["(o->o)->o", "((o->o)->o)->(o->o)->o", "o->o->o", "(o->o)->o->o", "((o->o)->o)->o"])


@settings(max_examples=150, deadline=None)
@given(seed=seeds, ty=redex_types)
def test_substitution_matches_beta(seed, ty):
    f, w = _redex(seed, ty)
    [(x, _)], body = strip_lams(f, 1)
    lhs = normalize(App(f, w))
    rhs = substitute(body, x, w)
    assert lhs == rhs


@settings(max_examples=150, deadline=None)
@given(seed=seeds, ty=redex_types)
def test_subject_reduction_and_unique_normal_form(seed, ty):
    f, w = _redex(seed, ty)
    raw = App(f, w)
    [(x, _)], body = strip_lams(f, 1)
    other = substitute_raw(body, {x: w})
    assert beta_normalize(raw).type == raw.type
    assert eta_long(beta_normalize(raw)).type == raw.type
    assert normalize(raw) == normalize(other)


@settings(max_examples=100, deadline=None)
@given(seed=seeds, ty=redex_types)
def test_evaluate_agrees_with_normalization(seed, ty):
    f, w = _redex(seed, ty)
    t = normalize(App(f, w))
    rest = [_random(seed + 2 + j, str(a), size=10) for j, a in enumerate(arg_types(t.type))]
    expected = beta_normalize(apply(t, rest))
    got = evaluate(t)
    for r in rest:
        got = got(evaluate(r))
    assert got == expected.name
