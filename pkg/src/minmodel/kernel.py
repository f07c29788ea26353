"""Simply-typed lambda terms over a single ground type.

Terms are immutable trees.  Every node knows its type, its free variables and
its size, so the algorithms built on top never re-derive them.  The public
constructors here do not normalize; :func:`normalize` brings a term to the
canonical shape used everywhere else (beta-normal, eta-long, binders renamed
``y0, y1, ...`` in preorder).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union


class LambdaError(Exception):
    """Base class for errors raised by the kernel."""


class TermTypeError(LambdaError, TypeError):
    pass


class UnboundVariable(LambdaError, KeyError):
    def __str__(self):
        return f"unbound variable {self.args[0]!r}"


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Ground:
    def __str__(self):
        return "o"

    @property
    def arity(self) -> int:
        return 0

    @property
    def order(self) -> int:
        return 1


@dataclass(frozen=True)
class Arrow:
    domain: "SimpleType"
    codomain: "SimpleType"

    def __str__(self):
        dom = str(self.domain)
        if isinstance(self.domain, Arrow):
            dom = f"({dom})"
        return f"{dom}->{self.codomain}"

    @property
    def arity(self) -> int:
        return 1 + self.codomain.arity

    @property
    def order(self) -> int:
        return max(self.domain.order + 1, self.codomain.order)


SimpleType = Union[Ground, Arrow]
O = Ground()


def arrow(*types: SimpleType) -> SimpleType:
    """``arrow(A, B, C)`` is ``A -> B -> C``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def arg_types(ty: SimpleType) -> Tuple[SimpleType, ...]:
    """The ``A1 ... An`` of ``A1 -> ... -> An -> o``."""
    out = []
    while isinstance(ty, Arrow):
        out.append(ty.domain)
        ty = ty.codomain
    return tuple(out)


def from_arg_types(args: Sequence[SimpleType]) -> SimpleType:
    return arrow(*args, O)


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ("type", "_hash", "_fv", "_consts", "_size")

    def _init(self, ty, key):
        object.__setattr__(self, "type", ty)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_fv", None)
        object.__setattr__(self, "_consts", None)
        object.__setattr__(self, "_size", None)

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import print_term

        return f"<{print_term(self, canonical=False)} : {self.type}>"

    @property
    def free_vars(self) -> Dict[str, SimpleType]:
        """Free variable names mapped to their types."""
        if self._fv is None:
            object.__setattr__(self, "_fv", self._compute_fv())
        return self._fv

    @property
    def constants(self) -> frozenset:
        if self._consts is None:
            object.__setattr__(self, "_consts", frozenset(self._compute_consts()))
        return self._consts

    @property
    def size(self) -> int:
        """Node count."""
        if self._size is None:
            object.__setattr__(self, "_size", 1 + sum(c.size for c in self.children()))
        return self._size

    def children(self) -> Tuple["Term", ...]:
        return ()

    @property
    def is_closed(self) -> bool:
        return not self.free_vars

    def _compute_fv(self):
        out: Dict[str, SimpleType] = {}
        for c in self.children():
            out.update(c.free_vars)
        return out

    def _compute_consts(self):
        out = set()
        for c in self.children():
            out |= c.constants
        return out


class Const(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(O, ("c", name))

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return isinstance(other, Const) and other.name == self.name

    def _compute_consts(self):
        return {self.name}


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str, ty: SimpleType):
        object.__setattr__(self, "name", name)
        self._init(ty, ("v", name, ty))

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name and other.type == self.type

    def _compute_fv(self):
        return {self.name: self.type}


class Lam(Term):
    __slots__ = ("var", "var_type", "body")

    def __init__(self, var: str, var_type: SimpleType, body: Term):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "var_type", var_type)
        object.__setattr__(self, "body", body)
        self._init(Arrow(var_type, body.type), ("l", var, var_type, body._hash))

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return (
            isinstance(other, Lam)
            and self._hash == other._hash
            and self.var == other.var
            and self.var_type == other.var_type
            and self.body == other.body
        )

    def children(self):
        return (self.body,)

    def _compute_fv(self):
        out = dict(self.body.free_vars)
        out.pop(self.var, None)
        return out


class App(Term):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        fty = fun.type
        if not isinstance(fty, Arrow):
            raise TermTypeError(f"cannot apply a term of type {fty}")
        if fty.domain != arg.type:
            raise TermTypeError(f"argument of type {arg.type} where {fty.domain} is expected")
        object.__setattr__(self, "fun", fun)
        object.__setattr__(self, "arg", arg)
        self._init(fty.codomain, ("a", fun._hash, arg._hash))

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fun == other.fun
            and self.arg == other.arg
        )

    def children(self):
        return (self.fun, self.arg)


class Hole(Term):
    """A numbered ground-type hole; only appears inside contexts."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        object.__setattr__(self, "index", index)
        self._init(O, ("h", index))

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return isinstance(other, Hole) and other.index == self.index


TypingEnv = Mapping[str, SimpleType]


# ---------------------------------------------------------------------------
# Small structural helpers


def apply(head: Term, args: Iterable[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> Tuple[Term, List[Term]]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def strip_lams(t: Term, limit: Optional[int] = None) -> Tuple[List[Tuple[str, SimpleType]], Term]:
    binders = []
    while isinstance(t, Lam) and (limit is None or len(binders) < limit):
        binders.append((t.var, t.var_type))
        t = t.body
    return binders, t


def lams(binders: Sequence[Tuple[str, SimpleType]], body: Term) -> Term:
    for name, ty in reversed(binders):
        body = Lam(name, ty, body)
    return body


def head_name(t: Term) -> Optional[str]:
    """Name of the head variable of a spine, or None for constant/hole heads."""
    h, _ = spine(t)
    return h.name if isinstance(h, Var) else None


def subterms(t: Term, path: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    """Preorder walk yielding ``(path, subterm)``; paths index :meth:`Term.children`."""
    yield path, t
    for i, c in enumerate(t.children()):
        yield from subterms(c, path + (i,))


def subterm_at(t: Term, path: Sequence[int]) -> Term:
    for i in path:
        kids = t.children()
        if i >= len(kids):
            raise IndexError(f"bad position {tuple(path)}")
        t = kids[i]
    return t


def replace_at(t: Term, path: Sequence[int], new: Term) -> Term:
    """Context filling at ``path``: no renaming, capture is intended."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Lam) and i == 0:
        return Lam(t.var, t.var_type, replace_at(t.body, rest, new))
    if isinstance(t, App) and i in (0, 1):
        if i == 0:
            return App(replace_at(t.fun, rest, new), t.arg)
        return App(t.fun, replace_at(t.arg, rest, new))
    raise IndexError(f"bad position {tuple(path)}")


def binders_along(t: Term, path: Sequence[int]) -> List[Tuple[str, SimpleType]]:
    """The lambda binders crossed when walking down ``path``."""
    out = []
    for i in path:
        if isinstance(t, Lam):
            out.append((t.var, t.var_type))
        t = t.children()[i]
    return out


def fill_holes(ctx: Term, fillers: Mapping[int, Term]) -> Term:
    if isinstance(ctx, Hole):
        return fillers.get(ctx.index, ctx)
    if isinstance(ctx, Lam):
        return Lam(ctx.var, ctx.var_type, fill_holes(ctx.body, fillers))
    if isinstance(ctx, App):
        return App(fill_holes(ctx.fun, fillers), fill_holes(ctx.arg, fillers))
    return ctx


def holes(ctx: Term) -> List[int]:
    """Hole indices in leftmost-outermost order (with repetitions)."""
    return [s.index for _, s in subterms(ctx) if isinstance(s, Hole)]


def type_of(t: Term, env: Optional[TypingEnv] = None) -> SimpleType:
    """Church type of ``t``; free variables must be declared in ``env``."""
    env = env or {}
    for name, ty in t.free_vars.items():
        if name not in env:
            raise UnboundVariable(name)
        if env[name] != ty:
            raise TermTypeError(f"variable {name} used at {ty} but declared {env[name]}")
    return t.type


# ---------------------------------------------------------------------------
# Names

_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, avoid) -> str:
    stem = _TRAILING_DIGITS.sub("", base) or "x"
    k = 0
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def canonical_names(t: Term, prefix: str = "y") -> Term:
    """Rename every binder to ``prefix0, prefix1, ...`` in preorder.

    Names already used by free variables or constants are skipped, so the
    result is hygienic: no name is both free and bound, no binder shadows
    another, and alpha-equivalent terms become equal.
    """
    avoid = set(t.free_vars) | set(t.constants)
    counter = [0]

    def next_name():
        while f"{prefix}{counter[0]}" in avoid:
            counter[0] += 1
        name = f"{prefix}{counter[0]}"
        counter[0] += 1
        return name

    def go(t, env):
        if isinstance(t, Var):
            new = env.get(t.name)
            return t if new is None else Var(new, t.type)
        if isinstance(t, Lam):
            new = next_name()
            return Lam(new, t.var_type, go(t.body, {**env, t.var: new}))
        if isinstance(t, App):
            return App(go(t.fun, env), go(t.arg, env))
        return t

    return go(t, {})


def alpha_eq(t: Term, u: Term) -> bool:
    if t.type != u.type:
        return False
    return canonical_names(t) == canonical_names(u)


# ---------------------------------------------------------------------------
# Substitution and normalization


def substitute_raw(t: Term, var_map: Mapping[str, Term], const_map: Mapping[str, Term] = {}) -> Term:
    """Simultaneous capture-avoiding substitution; no normalization."""
    if not var_map and not const_map:
        return t
    incoming = set()
    for s in list(var_map.values()) + list(const_map.values()):
        incoming.update(s.free_vars)
    return _subst(t, dict(var_map), const_map, incoming)


def _subst(t, var_map, const_map, incoming):
    if isinstance(t, Var):
        return var_map.get(t.name, t)
    if isinstance(t, Const):
        return const_map.get(t.name, t)
    if isinstance(t, App):
        return App(_subst(t.fun, var_map, const_map, incoming), _subst(t.arg, var_map, const_map, incoming))
    if isinstance(t, Lam):
        body_fv = t.body.free_vars
        live = {k: v for k, v in var_map.items() if k != t.var and k in body_fv}
        live_consts = {k: v for k, v in const_map.items() if k in t.body.constants}
        if not live and not live_consts:
            return t
        var = t.var
        if var in incoming:
            var = fresh_name(var, incoming | set(body_fv) | set(live))
            live[t.var] = Var(var, t.var_type)
        return Lam(var, t.var_type, _subst(t.body, live, live_consts, incoming))
    return t


def beta_normalize(t: Term) -> Term:
    """Normal-order (leftmost-outermost) reduction to beta-normal form."""
    if isinstance(t, Lam):
        return Lam(t.var, t.var_type, beta_normalize(t.body))
    head, args = spine(t)
    while isinstance(head, Lam) and args:
        head = substitute_raw(head.body, {head.var: args.pop(0)})
        inner_head, inner_args = spine(head)
        head, args = inner_head, inner_args + args
    if not args:
        return beta_normalize(head) if isinstance(head, Lam) else head
    return apply(head, [beta_normalize(a) for a in args])


def eta_long(t: Term) -> Term:
    """Eta-expand a beta-normal term so every spine ends at ground type."""
    if isinstance(t, Lam):
        return Lam(t.var, t.var_type, eta_long(t.body))
    head, args = spine(t)
    if isinstance(head, Lam):
        raise LambdaError("eta_long expects a beta-normal term")
    res = apply(head, [eta_long(a) for a in args])
    extra = []
    ty = res.type
    avoid = set(res.free_vars) | set(res.constants)
    while isinstance(ty, Arrow):
        name = fresh_name("x", avoid)
        avoid.add(name)
        extra.append((name, ty.domain))
        res = App(res, eta_long(Var(name, ty.domain)))
        ty = ty.codomain
    return lams(extra, res)


def normalize(t: Term) -> Term:
    """Canonical form: beta-normal, eta-long, canonically named."""
    return canonical_names(eta_long(beta_normalize(t)))


def substitute(t: Term, x: Union[Var, Const, str], s: Term) -> Term:
    """``t[s/x]`` re-normalized; ``x`` may be a variable or a ground constant."""
    return substitute_all(t, {x: s})


def substitute_all(t: Term, mapping: Mapping[Union[Var, Const, str], Term]) -> Term:
    var_map, const_map = {}, {}
    for key, s in mapping.items():
        if isinstance(key, Const):
            if s.type != O:
                raise TermTypeError(f"constant {key.name} replaced by a term of type {s.type}")
            const_map[key.name] = s
            continue
        name = key.name if isinstance(key, Var) else key
        expected = t.free_vars.get(name, key.type if isinstance(key, Var) else None)
        if expected is not None and expected != s.type:
            raise TermTypeError(f"{name} : {expected} replaced by a term of type {s.type}")
        var_map[name] = s
    return normalize(substitute_raw(t, var_map, const_map))


# ---------------------------------------------------------------------------
# Evaluation of closed terms

Value = Union[str, Callable]


def evaluate(t: Term, env: Optional[Dict[str, Value]] = None) -> Value:
    """Evaluate with Python closures; a closed ground term yields a constant name.

    Agrees with :func:`beta_normalize` on closed terms of ground type, only
    much faster.  Used on the hot path of the equivalence decider.
    """
    return _eval(t, env or {})


def _eval(t, env):
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, App):
        return _eval(t.fun, env)(_eval(t.arg, env))
    if isinstance(t, Lam):
        var, body = t.var, t.body
        return lambda v: _eval(body, {**env, var: v})
    raise LambdaError("cannot evaluate a context with holes")


def identity(ty: SimpleType) -> Term:
    """Eta-long identity at ``ty``."""
    return normalize(Lam("x", ty, Var("x", ty)))


# ---------------------------------------------------------------------------
# Signatures

_IDENT = re.compile(r"#?[A-Za-z][A-Za-z0-9_]*$|#[A-Za-z0-9_]+$")


class Signature(tuple):
    """Ordered, duplicate-free tuple of ground constant names.

    Names starting with ``#`` are reserved for generated constants; user
    input goes through :func:`parse_signature`, which rejects them.
    """

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("a signature needs at least one constant")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constant in {names}")
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise ValueError(f"bad constant name {n!r}")
        return super().__new__(cls, names)

    def extend(self, names: Iterable[str]) -> "Signature":
        return Signature(tuple(self) + tuple(names))

    def __repr__(self):
        return f"Signature({','.join(self)})"


def parse_signature(text: str) -> Signature:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n.startswith("#"):
            raise ValueError(f"{n!r}: names starting with '#' are reserved")
    return Signature(names)
