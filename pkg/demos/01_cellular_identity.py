"""The identity at (o->o)->o is not cellular; cellularize repairs it."""
from minmodel import (
    cellularize,
    decide_equiv,
    identity,
    is_cellular,
    is_semi_cellular,
    parse_type,
    print_term,
)

ident = identity(parse_type("(o->o)->o"))
print("identity        ", print_term(ident))
print("cellular?       ", is_cellular(ident))
print("semi-cellular?  ", is_semi_cellular(ident))

c = cellularize(ident)
print("cellularized    ", print_term(c))
print("cellular?       ", is_cellular(c))

# same class in the minimal model over {a, b}
print("equivalent?     ", decide_equiv(ident, c, ["a", "b"]).equivalent)
