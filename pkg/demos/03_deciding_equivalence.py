"""Deciding equivalence, reading off witnesses, and picking canonical terms."""
from minmodel import Session, parse_term, print_term

AB = ["a", "b"]
session = Session()

pairs = [
    (r"\y:o. y", r"\y:o. a"),
    (r"\y:o->o. y a", r"\y:o->o. y (y a)"),
    (r"\F:(o->o)->o. F (\z:o. F (\w:o. z))", r"\F:(o->o)->o. F (\z:o. z)"),
    (r"\F:(o->o)->o. F (\z:o. a)", r"\F:(o->o)->o. F (\z:o. F (\w:o. a))"),
]

for left, right in pairs:
    t, u = parse_term(left, AB), parse_term(right, AB)
    v = session.decide(t, u, AB)
    print(print_term(t))
    print(print_term(u))
    if v.equivalent:
        print("  equivalent")
    else:
        args = " ".join(print_term(w) for w in v.witness)
        print(f"  differ on [{args}]: {v.left} vs {v.right}; rechecked: {v.check_witness(t, u)}")
    print("  canonical:", print_term(session.canonical_rep(t, AB)))
    print()
