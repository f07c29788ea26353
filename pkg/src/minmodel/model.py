"""Finite representative sets, the equivalence decider and the class selector.

For a type ``A = A1 -> ... -> An -> o`` and ground constants ``C``,
:func:`representatives` saturates the least set of closed terms containing
``\\y.a`` for every constant ``a`` and closed under plugging earlier entries
into the fresh constants of a candidate ``yi w1 .. wp``, provided that
candidate was not used anywhere in the construction of the plugged entries.
Every observational-equivalence class at ``A`` over ``C`` has a member in the
resulting table.

Deciding ``t == u`` then reduces to comparing ``t r1..rn`` and ``u r1..rn``
for class representatives ``ri`` of each argument type.  All of this is
memoized per :class:`Session`; results do not depend on the cache.
"""
from __future__ import annotations

import itertools
import math
import re
import threading
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .cellular import _body_under
from .kernel import (
    Const,
    LambdaError,
    Signature,
    SimpleType,
    Term,
    TermTypeError,
    Var,
    apply,
    arg_types,
    beta_normalize,
    canonical_names,
    evaluate,
    lams,
    substitute_raw,
)
from .syntax import print_term


class BudgetExceeded(LambdaError, RuntimeError):
    pass


class InvariantViolation(LambdaError, AssertionError):
    """Raised when a result contradicts the completeness of the tables."""


@dataclass(frozen=True)
class Budget:
    """Ceilings that keep the (non-elementary) construction at desk scale."""

    max_entries: int = 20_000
    max_candidates: int = 400
    max_nodes: int = 500
    time_limit: Optional[float] = None

    def __post_init__(self):
        for name in ("max_entries", "max_candidates", "max_nodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass(frozen=True)
class Verdict:
    """Outcome of an equivalence query.

    ``witness`` is a tuple of closed argument terms with
    ``t witness ->> left`` and ``u witness ->> right``, ``left != right``.
    ``bounded`` marks an "equivalent" answer that only holds up to a search
    bound (produced by the brute-force oracle, never by the decider).
    """

    equivalent: bool
    witness: Optional[Tuple[Term, ...]] = None
    left: Optional[str] = None
    right: Optional[str] = None
    bounded: bool = False

    def __bool__(self):
        return self.equivalent

    def check_witness(self, t: Term, u: Term) -> bool:
        """Re-verify an inequivalence by plain beta-normalization."""
        if self.equivalent:
            raise ValueError("only inequivalent verdicts carry a witness")
        lhs = beta_normalize(apply(t, self.witness))
        rhs = beta_normalize(apply(u, self.witness))
        return (
            isinstance(lhs, Const)
            and isinstance(rhs, Const)
            and lhs.name == self.left
            and rhs.name == self.right
            and lhs != rhs
        )

    def to_document(self) -> dict:
        doc = {"equivalent": self.equivalent}
        if self.bounded:
            doc["bounded"] = True
        if not self.equivalent:
            doc["witness"] = [print_term(r) for r in self.witness]
            doc["left"] = self.left
            doc["right"] = self.right
        return doc


@dataclass(frozen=True)
class RepEntry:
    term: Term
    used: FrozenSet[str]
    depth: int


@dataclass(frozen=True)
class ArgumentFamily:
    """Per-argument data of a table: the bound, fresh constants and candidates."""

    index: int
    type: SimpleType
    bound: int
    fresh: Tuple[str, ...]
    families: Tuple[Tuple[Term, ...], ...]
    candidates: Tuple[Tuple[str, Term], ...]


@dataclass(frozen=True)
class RepTable:
    for_type: SimpleType
    constants: Signature
    binders: Tuple[Tuple[str, SimpleType], ...]
    arguments: Tuple[ArgumentFamily, ...]
    entries: Tuple[RepEntry, ...]

    def terms(self) -> List[Term]:
        """Distinct entry terms in entry order."""
        seen = set()
        out = []
        for e in self.entries:
            if e.term not in seen:
                seen.add(e.term)
                out.append(e.term)
        return out

    def to_document(self) -> dict:
        return {
            "type": str(self.for_type),
            "constants": list(self.constants),
            "arguments": [
                {
                    "index": a.index,
                    "type": str(a.type),
                    "bound": a.bound,
                    "fresh": list(a.fresh),
                    "candidates": [{"id": vid, "term": print_term(v)} for vid, v in a.candidates],
                }
                for a in self.arguments
            ],
            "entries": [{"term": print_term(e.term), "used": sorted(e.used)} for e in self.entries],
        }


_FRESH = re.compile(r"#d(\d+)_")


def _level(constants: Sequence[str]) -> int:
    levels = [int(m.group(1)) for c in constants for m in [_FRESH.match(c)] if m]
    return max(levels) + 1 if levels else 0


def _binder_names(n: int, constants: Iterable[str]) -> List[str]:
    taken = set(constants)
    names = []
    k = 0
    while len(names) < n:
        if f"y{k}" not in taken:
            names.append(f"y{k}")
        k += 1
    return names


class Session:
    """Memo tables for one logical job; safe to share between threads."""

    def __init__(self, budget: Optional[Budget] = None):
        self.budget = budget or Budget()
        self._tables: Dict[Tuple[str, Tuple[str, ...]], RepTable] = {}
        self._classes: Dict[Tuple[str, Tuple[str, ...]], Tuple[Term, ...]] = {}
        self._values: Dict[Tuple[str, Tuple[str, ...]], list] = {}
        self._lock = threading.RLock()
        self._deadline = None

    # -- budget ---------------------------------------------------------
    def _tick(self):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise BudgetExceeded(f"time limit of {self.budget.time_limit}s exceeded")

    def _start(self):
        if self.budget.time_limit is not None and self._deadline is None:
            self._deadline = time.monotonic() + self.budget.time_limit
            return True
        return False

    def _run(self, fn, *args):
        with self._lock:
            owner = self._start()
            try:
                return fn(*args)
            finally:
                if owner:
                    self._deadline = None

    # -- representatives --------------------------------------------------
    def representatives(self, ty: SimpleType, constants: Sequence[str]) -> RepTable:
        return self._run(self._representatives, ty, Signature(constants))

    def tables(self) -> List[RepTable]:
        """Every table built so far, in order of completion."""
        with self._lock:
            return list(self._tables.values())

    def _representatives(self, ty: SimpleType, sig: Signature) -> RepTable:
        key = (str(ty), tuple(sig))
        if key not in self._tables:
            self._tables[key] = self._build(ty, sig)
        return self._tables[key]

    def _build(self, ty: SimpleType, sig: Signature) -> RepTable:
        budget = self.budget
        args = arg_types(ty)
        names = _binder_names(len(args), sig)
        binders = tuple(zip(names, args))
        level = _level(sig)

        families = []
        for i, ai in enumerate(args, start=1):
            bs = arg_types(ai)
            exponent = 1
            for b in bs:
                exponent *= len(self._classes_of(b, sig))
            if len(sig) > 1 and exponent * math.log(len(sig)) > math.log(budget.max_candidates * 64):
                raise BudgetExceeded(f"bound for argument {i} of {ty} is {len(sig)}^{exponent} + 1")
            bound = len(sig) ** exponent + 1
            if bs and (len(sig) + bound) ** len(bs) > budget.max_candidates:
                raise BudgetExceeded(f"more than {budget.max_candidates} candidates for argument {i} of {ty}")
            fresh = tuple(f"#d{level}_{i}_{k}" for k in range(1, bound + 1))
            wide = sig.extend(fresh)
            fam = tuple(self._classes_of(b, wide) for b in bs)
            head = Var(names[i - 1], ai)
            cands = tuple(
                (f"v{i}.{m}", apply(head, combo))
                for m, combo in enumerate(itertools.product(*fam), start=1)
            )
            if len(cands) > budget.max_candidates:
                raise BudgetExceeded(f"{len(cands)} candidates for argument {i} of {ty}")
            families.append(ArgumentFamily(i, ai, bound, fresh, fam, cands))

        entries = self._saturate(binders, sig, families)
        return RepTable(ty, sig, binders, tuple(families), tuple(entries))

    def _saturate(self, binders, sig, families) -> List[RepEntry]:
        budget = self.budget
        entries: List[RepEntry] = []
        alive: List[bool] = []
        minimal: Dict[Term, List[int]] = {}
        bodies: Dict[Term, Term] = {}

        def add(term: Term, used: FrozenSet[str], depth: int) -> bool:
            if term.size > budget.max_nodes:
                raise BudgetExceeded(f"representative with {term.size} nodes")
            slots = minimal.setdefault(term, [])
            for j in slots:
                if entries[j].used <= used:
                    return False
            for j in slots:
                if used <= entries[j].used:
                    alive[j] = False
            slots[:] = [j for j in slots if alive[j]]
            slots.append(len(entries))
            entries.append(RepEntry(term, used, depth))
            alive.append(True)
            if sum(alive) > budget.max_entries:
                raise BudgetExceeded(f"more than {budget.max_entries} representative entries")
            return True

        def body(term: Term) -> Term:
            if term not in bodies:
                bodies[term] = _body_under(term, binders)
            return bodies[term]

        def close(b: Term) -> Term:
            return canonical_names(lams(binders, b))

        for a in sig:
            add(close(Const(a)), frozenset(), 0)

        # each candidate with the fresh constants it actually mentions
        plans = []
        for fam in families:
            for vid, v in fam.candidates:
                occurring = [d for d in fam.fresh if d in v.constants]
                plans.append((vid, v, occurring))

        for vid, v, occ in plans:
            if not occ:
                add(close(v), frozenset([vid]), 1)

        delta_start = 0
        while True:
            self._tick()
            snapshot = [j for j in range(len(entries)) if alive[j]]
            fresh_ids = [j for j in snapshot if j >= delta_start]
            if not fresh_ids:
                break
            old = [j for j in snapshot if j < delta_start]
            delta_start = len(entries)
            for vid, v, occ in plans:
                if not occ:
                    continue
                m = len(occ)
                # tuples over the snapshot with at least one component from the delta
                for first_new in range(m):
                    pools = [old] * first_new + [fresh_ids] + [snapshot] * (m - first_new - 1)
                    for combo in itertools.product(*pools):
                        self._tick()
                        used = frozenset()
                        blocked = False
                        for j in combo:
                            if vid in entries[j].used:
                                blocked = True
                                break
                            used |= entries[j].used
                        if blocked:
                            continue
                        sub = {d: body(entries[j].term) for d, j in zip(occ, combo)}
                        new_body = substitute_raw(v, {}, sub)
                        depth = 1 + max(entries[j].depth for j in combo)
                        add(close(new_body), used | {vid}, depth)
        return [e for e, ok in zip(entries, alive) if ok]

    # -- classes and decisions -------------------------------------------
    def classes(self, ty: SimpleType, constants: Sequence[str]) -> Tuple[Term, ...]:
        """Deduplicated representatives: one term per class, in entry order."""
        return self._run(self._classes_of, ty, Signature(constants))

    def _classes_of(self, ty: SimpleType, sig: Signature) -> Tuple[Term, ...]:
        key = (str(ty), tuple(sig))
        if key not in self._classes:
            table = self._representatives(ty, sig)
            self._classes[key] = tuple(self._dedup(table))
        return self._classes[key]

    def _dedup(self, table: RepTable) -> List[Term]:
        seen = set()
        out = []
        for term in table.terms():
            sig = self._signature(term, table.constants)
            if sig not in seen:
                seen.add(sig)
                out.append(term)
        return out

    def dedup(self, table: RepTable) -> List[Term]:
        return self._run(self._dedup, table)

    def _argument_values(self, ty: SimpleType, sig: Signature):
        key = (str(ty), tuple(sig))
        if key not in self._values:
            pools = [self._classes_of(a, sig) for a in arg_types(ty)]
            terms = list(itertools.product(*pools))
            vals = [[evaluate(r) for r in rs] for rs in terms]
            self._values[key] = list(zip(terms, vals))
        return self._values[key]

    def _signature(self, t: Term, sig: Signature) -> Tuple[str, ...]:
        f = evaluate(t)
        out = []
        for _, vals in self._argument_values(t.type, sig):
            r = f
            for x in vals:
                r = r(x)
            out.append(r)
        return tuple(out)

    def _check_pair(self, t: Term, u: Term, sig: Signature):
        if t.type != u.type:
            raise TermTypeError(f"cannot compare terms of types {t.type} and {u.type}")
        for x in (t, u):
            if not x.is_closed:
                raise LambdaError("decide_equiv expects closed terms")
            extra = x.constants - set(sig)
            if extra:
                raise LambdaError(f"constants {sorted(extra)} are not in the signature")

    def decide(self, t: Term, u: Term, constants: Sequence[str]) -> Verdict:
        sig = Signature(constants)
        self._check_pair(t, u, sig)
        return self._run(self._decide, t, u, sig)

    def _decide(self, t: Term, u: Term, sig: Signature) -> Verdict:
        ft, fu = evaluate(t), evaluate(u)
        for terms, vals in self._argument_values(t.type, sig):
            a, b = ft, fu
            for x in vals:
                a, b = a(x), b(x)
            if a != b:
                return Verdict(False, tuple(terms), a, b)
        return Verdict(True)

    def signature(self, t: Term, constants: Sequence[str]) -> Tuple[str, ...]:
        """Results of ``t`` on every tuple of argument representatives."""
        sig = Signature(constants)
        self._check_pair(t, t, sig)
        return self._run(self._signature, t, sig)

    def count_classes(self, ty: SimpleType, constants: Sequence[str]) -> int:
        return len(self.classes(ty, constants))

    def canonical_rep(self, t: Term, constants: Sequence[str]) -> Term:
        sig = Signature(constants)
        self._check_pair(t, t, sig)
        return self._run(self._canonical, t, sig)

    def _canonical(self, t: Term, sig: Signature) -> Term:
        target = self._signature(t, sig)
        for r in self._classes_of(t.type, sig):
            if self._signature(r, sig) == target:
                return r
        raise InvariantViolation(f"no representative matches {print_term(t)}")


_sessions: Dict[Budget, Session] = {}
_sessions_lock = threading.Lock()


def default_session(budget: Optional[Budget] = None) -> Session:
    budget = budget or Budget()
    with _sessions_lock:
        if budget not in _sessions:
            _sessions[budget] = Session(budget)
        return _sessions[budget]


def representatives(ty: SimpleType, constants: Sequence[str], session: Optional[Session] = None) -> RepTable:
    return (session or default_session()).representatives(ty, constants)


def dedup(table: RepTable, session: Optional[Session] = None) -> List[Term]:
    return (session or default_session()).dedup(table)


def decide_equiv(t: Term, u: Term, constants: Sequence[str], session: Optional[Session] = None) -> Verdict:
    return (session or default_session()).decide(t, u, constants)


def count_classes(ty: SimpleType, constants: Sequence[str], session: Optional[Session] = None) -> int:
    return (session or default_session()).count_classes(ty, constants)


def canonical_rep(t: Term, constants: Sequence[str], session: Optional[Session] = None) -> Term:
    return (session or default_session()).canonical_rep(t, constants)


def check_fixpoint(table: RepTable) -> List[Tuple[Term, FrozenSet[str]]]:
    """Re-apply both closure rules to a finished table.

    Returns every derivable ``(term, used)`` pair not dominated by an entry
    (same term, used-set included in it); empty for a saturated table.
    """
    minimal: Dict[Term, List[FrozenSet[str]]] = {}
    for e in table.entries:
        minimal.setdefault(e.term, []).append(e.used)

    def covered(term, used):
        return any(u <= used for u in minimal.get(term, []))

    missing = []
    for a in table.constants:
        t = canonical_names(lams(table.binders, Const(a)))
        if not covered(t, frozenset()):
            missing.append((t, frozenset()))
    for fam in table.arguments:
        for vid, v in fam.candidates:
            occ = [d for d in fam.fresh if d in v.constants]
            for combo in itertools.product(table.entries, repeat=len(occ)):
                if any(vid in e.used for e in combo):
                    continue
                sub = {d: _body_under(e.term, table.binders) for d, e in zip(occ, combo)}
                t = canonical_names(lams(table.binders, substitute_raw(v, {}, sub)))
                used = frozenset([vid]).union(*[e.used for e in combo])
                if not covered(t, used):
                    missing.append((t, used))
    return missing
