"""Class counts from the decider next to brute-force and full-model counts."""
import itertools

from minmodel import Session, parse_type
from minmodel.oracle import enumerate_terms, full_model_eval, quotient_classes

AB = ["a", "b"]
session = Session()

for ty, bound in [("o", 1), ("o->o", 6), ("o->o->o", 8), ("(o->o)->o", 10)]:
    t = parse_type(ty)
    q = quotient_classes(t, AB, bound, arg_bound=7, session=session)
    print(f"{ty:12} terms<={bound:2}: {q.terms:3} enumerated, decider {q.decider}, brute {q.brute}, table {session.count_classes(t, AB)}")

# equal denotations in the full hierarchy force equivalence
terms = enumerate_terms(parse_type("o->o->o"), AB, 10)
agree = sum(
    (full_model_eval(t, AB) == full_model_eval(u, AB)) == session.decide(t, u, AB).equivalent
    for t, u in itertools.product(terms, repeat=2)
)
print(f"full model and decider agree on {agree}/{len(terms) ** 2} pairs at o->o->o")
