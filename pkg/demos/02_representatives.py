"""Representative tables and their classes at a few small types."""
from minmodel import Session, parse_type, print_term, print_type

session = Session()

for ty, cs in [("o->o", "ab"), ("(o->o)->o", "ab"), ("o->(o->o)->o", "ab"), ("((o->o)->o)->o", "ab")]:
    t = parse_type(ty)
    table = session.representatives(t, list(cs))
    classes = session.dedup(table)
    print(f"{print_type(t)} over {{{', '.join(cs)}}}: {len(table.entries)} entries, {len(classes)} classes")
    for arg in table.arguments:
        print(f"  argument {arg.index}: {print_type(arg.type)}, bound {arg.bound}, {len(arg.candidates)} candidates")
    for rep in classes:
        print("   ", print_term(rep))
