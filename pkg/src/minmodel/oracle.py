"""Brute-force instruments used to cross-check the decider.

Nothing in here relies on :mod:`minmodel.model` except :func:`quotient_classes`,
which reports the decider's count next to an independent one.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .kernel import (
    App,
    Arrow,
    Const,
    Lam,
    LambdaError,
    Signature,
    SimpleType,
    Term,
    Var,
    apply,
    arg_types,
    beta_normalize,
    canonical_names,
    lams,
)
from .model import BudgetExceeded, Session, Verdict, default_session


# ---------------------------------------------------------------------------
# Enumeration of long normal forms


def _min_size(ty: SimpleType) -> int:
    # \x1..xk. c
    return len(arg_types(ty)) + 1


def _compositions(total: int, mins: Sequence[int]):
    """All tuples ``(s1..sq)`` with ``si >= mins[i]`` summing to ``total``."""
    if not mins:
        if total == 0:
            yield ()
        return
    rest_min = sum(mins[1:])
    for first in range(mins[0], total - rest_min + 1):
        for tail in _compositions(total - first, mins[1:]):
            yield (first,) + tail


@lru_cache(maxsize=None)
def _terms_exact(ty: SimpleType, env: Tuple[SimpleType, ...], n: int, consts: Tuple[str, ...]) -> Tuple[Term, ...]:
    binders = arg_types(ty)
    k = len(binders)
    if n < k + 1:
        return ()
    inner = env + binders
    names = [(f"%{len(env) + j}", b) for j, b in enumerate(binders)]
    return tuple(lams(names, body) for body in _ground_exact(inner, n - k, consts))


@lru_cache(maxsize=None)
def _ground_exact(env: Tuple[SimpleType, ...], m: int, consts: Tuple[str, ...]) -> Tuple[Term, ...]:
    out: List[Term] = []
    if m == 1:
        out.extend(Const(c) for c in consts)
    for level, ty in enumerate(env):
        params = arg_types(ty)
        q = len(params)
        room = m - 1 - q
        mins = [_min_size(p) for p in params]
        if room < sum(mins):
            continue
        head = Var(f"%{level}", ty)
        for sizes in _compositions(room, mins):
            pools = [_terms_exact(p, env, s, consts) for p, s in zip(params, sizes)]
            for args in itertools.product(*pools):
                out.append(apply(head, args))
    return tuple(out)


def enumerate_terms(ty: SimpleType, constants: Sequence[str], size_bound: int) -> List[Term]:
    """Every closed long normal term of ``ty`` with at most ``size_bound`` nodes.

    Ordered by size, then head (constants in signature order before
    variables, outermost binder first), then arguments.
    """
    consts = tuple(Signature(constants))
    out = []
    for n in range(1, size_bound + 1):
        out.extend(canonical_names(t) for t in _terms_exact(ty, (), n, consts))
    return out


# ---------------------------------------------------------------------------
# Bounded observational probing


def brute_equiv(t: Term, u: Term, constants: Sequence[str], size_bound: int) -> Verdict:
    """Search argument tuples of size <= ``size_bound`` for a distinguishing one.

    An equivalent verdict is marked ``bounded``: it only says no witness
    exists within the bound.
    """
    if t.type != u.type:
        raise LambdaError(f"cannot compare terms of types {t.type} and {u.type}")
    pools = [enumerate_terms(a, constants, size_bound) for a in arg_types(t.type)]
    for args in itertools.product(*pools):
        left = beta_normalize(apply(t, args))
        right = beta_normalize(apply(u, args))
        if left != right:
            return Verdict(False, tuple(args), _const_name(left), _const_name(right))
    return Verdict(True, bounded=True)


def _const_name(t: Term) -> str:
    if not isinstance(t, Const):
        raise LambdaError(f"closed ground term did not normalize to a constant: {t!r}")
    return t.name


def brute_signature(t: Term, constants: Sequence[str], size_bound: int) -> Tuple[str, ...]:
    pools = [enumerate_terms(a, constants, size_bound) for a in arg_types(t.type)]
    return tuple(_const_name(beta_normalize(apply(t, args))) for args in itertools.product(*pools))


# ---------------------------------------------------------------------------
# The full type hierarchy


class FunctionTable:
    """A value of the full set-theoretic hierarchy over the ground carrier ``C``.

    At ``o`` the value is a constant name; at ``A -> B`` it is a tuple with one
    entry per element of the hierarchy at ``A`` (in :func:`universe` order).
    """

    __slots__ = ("type", "constants", "value")

    def __init__(self, ty: SimpleType, constants: Tuple[str, ...], value):
        self.type = ty
        self.constants = constants
        self.value = value

    def __eq__(self, other):
        return (
            isinstance(other, FunctionTable)
            and self.type == other.type
            and self.constants == other.constants
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.type, self.constants, self.value))

    def __repr__(self):
        return f"FunctionTable({self.type}, {self.value!r})"

    def __call__(self, arg: "FunctionTable") -> "FunctionTable":
        if not isinstance(self.type, Arrow) or arg.type != self.type.domain:
            raise LambdaError("ill-typed application of a function table")
        idx = _index(self.type.domain, self.constants)[arg.value]
        return FunctionTable(self.type.codomain, self.constants, self.value[idx])

    def as_mapping(self) -> Dict["FunctionTable", "FunctionTable"]:
        if not isinstance(self.type, Arrow):
            raise LambdaError("ground values are not maps")
        dom = universe(self.type.domain, self.constants)
        return {
            FunctionTable(self.type.domain, self.constants, d): FunctionTable(self.type.codomain, self.constants, r)
            for d, r in zip(dom, self.value)
        }


DEFAULT_MAX_UNIVERSE = 70_000


def universe_size(ty: SimpleType, n_constants: int, cap: Optional[int] = None) -> int:
    """``|C|`` at ``o`` and ``size(B) ** size(A)`` at ``A -> B``.

    With ``cap`` the result saturates at ``cap + 1``, so huge hierarchies are
    rejected without computing their size.
    """
    if not isinstance(ty, Arrow):
        size = n_constants
    else:
        dom = universe_size(ty.domain, n_constants, cap)
        cod = universe_size(ty.codomain, n_constants, cap)
        if cap is not None and cod > 1 and dom * math.log2(cod) > math.log2(cap + 1):
            return cap + 1
        size = cod ** dom
    return size if cap is None else min(size, cap + 1)


@lru_cache(maxsize=None)
def universe(ty: SimpleType, constants: Tuple[str, ...], max_size: int = DEFAULT_MAX_UNIVERSE) -> Tuple:
    """All raw values at ``ty``, in a fixed order."""
    if universe_size(ty, len(constants), cap=max_size) > max_size:
        raise BudgetExceeded(f"the full hierarchy at {ty} has more than {max_size} elements")
    if not isinstance(ty, Arrow):
        return tuple(constants)
    dom = universe(ty.domain, constants, max_size)
    cod = universe(ty.codomain, constants, max_size)
    return tuple(itertools.product(cod, repeat=len(dom)))


@lru_cache(maxsize=None)
def _index(ty: SimpleType, constants: Tuple[str, ...]) -> Dict:
    return {v: i for i, v in enumerate(universe(ty, constants))}


def full_model_eval(t: Term, constants: Sequence[str], max_size: int = DEFAULT_MAX_UNIVERSE) -> FunctionTable:
    """Denotation of the closed term ``t`` in the full hierarchy over ``constants``."""
    consts = tuple(Signature(constants))
    if not t.is_closed:
        raise LambdaError("full_model_eval expects a closed term")
    extra = t.constants - set(consts)
    if extra:
        raise LambdaError(f"constants {sorted(extra)} are not in the carrier")
    return FunctionTable(t.type, consts, _denote(t, {}, consts, max_size))


def _denote(t: Term, env, consts, max_size):
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, App):
        f = _denote(t.fun, env, consts, max_size)
        a = _denote(t.arg, env, consts, max_size)
        return f[_index(t.arg.type, consts)[a]]
    if isinstance(t, Lam):
        dom = universe(t.var_type, consts, max_size)
        return tuple(_denote(t.body, {**env, t.var: d}, consts, max_size) for d in dom)
    raise LambdaError("cannot denote a context with holes")


# ---------------------------------------------------------------------------
# Class counting


@dataclass(frozen=True)
class QuotientCounts:
    terms: int
    decider: int
    brute: int
    arg_bound: int


def quotient_classes(
    ty: SimpleType,
    constants: Sequence[str],
    size_bound: int,
    arg_bound: Optional[int] = None,
    session: Optional[Session] = None,
) -> QuotientCounts:
    """Count classes among enumerated terms, once with the decider and once by brute force.

    The brute-force count uses argument terms up to ``arg_bound`` nodes
    (default ``size_bound + 2``); it can only merge classes, never split them.
    """
    session = session or default_session()
    arg_bound = size_bound + 2 if arg_bound is None else arg_bound
    terms = enumerate_terms(ty, constants, size_bound)
    dec = {session.signature(t, constants) for t in terms}
    brute = {brute_signature(t, constants, arg_bound) for t in terms}
    return QuotientCounts(len(terms), len(dec), len(brute), arg_bound)


# ---------------------------------------------------------------------------
# Random corpora


def random_term(
    ty: SimpleType,
    constants: Sequence[str],
    rng: random.Random,
    max_size: int = 40,
    var_bias: float = 0.75,
    fill: float = 0.0,
) -> Term:
    """A random closed long normal term of ``ty`` with at most ``max_size`` nodes.

    ``fill`` is the least fraction of spare room handed down to the
    arguments of each variable head; raising it gives larger terms.
    """
    consts = tuple(Signature(constants))
    if _min_size(ty) > max_size:
        raise ValueError(f"no closed term of {ty} fits in {max_size} nodes")

    def term(ty, env, room):
        binders = arg_types(ty)
        names = [(f"%{len(env) + j}", b) for j, b in enumerate(binders)]
        inner = env + names
        return lams(names, ground(inner, room - len(binders)))

    def ground(env, room):
        heads = []
        for name, ty in env:
            params = arg_types(ty)
            need = 1 + len(params) + sum(_min_size(p) for p in params)
            if need <= room:
                heads.append((name, ty, params))
        if not heads or rng.random() > var_bias:
            return Const(rng.choice(consts))
        branching = [h for h in heads if h[2]]
        if branching and rng.random() < fill:
            heads = branching
        name, ty, params = rng.choice(heads)
        spare = room - 1 - len(params) - sum(_min_size(p) for p in params)
        shares = [_min_size(p) for p in params]
        for _ in range(rng.randint(int(spare * fill), spare)):
            if shares:
                shares[rng.randrange(len(shares))] += 1
        return apply(Var(name, ty), [term(p, env, s) for p, s in zip(params, shares)])

    return canonical_names(term(ty, [], max_size))
