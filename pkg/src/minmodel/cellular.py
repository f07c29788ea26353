"""Cells, cellular terms and the cellularization procedure.

A closed term ``\\y1..yn. u`` is *cellular* when every subterm of ``u`` headed
by one of the outer binders ``yi`` only mentions outer binders.  Every closed
term has an observationally equivalent cellular term; :func:`cellularize`
computes one.

All functions take closed terms and canonicalize binder names on entry, so
callers may pass any alpha-variant.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .kernel import (
    App,
    Const,
    Hole,
    Lam,
    LambdaError,
    O,
    Term,
    Var,
    apply,
    binders_along,
    canonical_names,
    fill_holes,
    fresh_name,
    holes,
    lams,
    replace_at,
    spine,
    strip_lams,
    subterm_at,
    substitute_raw,
    subterms,
)

Path = Tuple[int, ...]


class CellError(LambdaError, ValueError):
    """A term does not have the shape an operation requires."""


@dataclass(frozen=True)
class MultiContext:
    """A term with numbered ground holes ``[]1 .. []K`` (indices start at 1)."""

    term: Term
    hole_count: int

    @property
    def hole_order(self) -> List[int]:
        return holes(self.term)

    def hole_binders(self) -> Dict[int, List[Tuple[str, object]]]:
        """Binders in scope at each hole."""
        return {
            s.index: binders_along(self.term, path)
            for path, s in subterms(self.term)
            if isinstance(s, Hole)
        }

    def fill(self, fillers: Sequence[Term]) -> Term:
        if len(fillers) != self.hole_count:
            raise ValueError(f"expected {self.hole_count} fillers, got {len(fillers)}")
        return fill_holes(self.term, {i + 1: f for i, f in enumerate(fillers)})


@dataclass(frozen=True)
class Cell:
    """``y C1 .. Cp`` where each ``Cj`` is a closed context with ground holes."""

    head: Var
    args: Tuple[Term, ...]
    hole_count: int

    @property
    def context(self) -> MultiContext:
        return MultiContext(apply(self.head, self.args), self.hole_count)

    def fill(self, fillers: Sequence[Term]) -> Term:
        return self.context.fill(fillers)

    def abstracted_args(self) -> List[Term]:
        """Each ``\\x1..xK. Cj[x1]..[xK]`` as a closed canonical term."""
        out = []
        for arg in self.args:
            avoid = {n for _, s in subterms(arg) if isinstance(s, Lam) for n in [s.var]}
            names = []
            for _ in range(self.hole_count):
                names.append(fresh_name("x", avoid))
                avoid.add(names[-1])
            body = fill_holes(arg, {i + 1: Var(n, O) for i, n in enumerate(names)})
            out.append(canonical_names(lams([(n, O) for n in names], body)))
        return out


def _open(t: Term) -> Tuple[List[Tuple[str, object]], Term]:
    if not t.is_closed:
        raise CellError(f"expected a closed term, free variables {sorted(t.free_vars)}")
    return strip_lams(canonical_names(t))


def _head_var(u: Term) -> Optional[Var]:
    h, _ = spine(u)
    return h if isinstance(h, Var) else None


def _outer_headed(s: Term, outer) -> bool:
    if s.type != O:
        return False
    h = _head_var(s)
    return h is not None and h.name in outer


def is_cellular(t: Term) -> bool:
    binders, u = _open(t)
    outer = {n for n, _ in binders}
    for _, s in subterms(u):
        if _outer_headed(s, outer) and not set(s.free_vars) <= outer:
            return False
    return True


def is_semi_cellular(t: Term) -> bool:
    if is_cellular(t):
        return True
    binders, u = _open(t)
    outer = {n for n, _ in binders}
    h, args = spine(u)
    if not isinstance(h, Var) or h.name not in outer:
        return False
    return all(is_cellular(lams(binders, a)) for a in args)


# ---------------------------------------------------------------------------
# Carving holes


def _carve(s: Term, outer, fillers: List[Term], paths: List[Path], path: Path) -> Term:
    """Replace maximal outer-headed ground subterms of ``s`` by fresh holes."""
    if _outer_headed(s, outer):
        fillers.append(s)
        paths.append(path)
        return Hole(len(fillers))
    if isinstance(s, Lam):
        return Lam(s.var, s.var_type, _carve(s.body, outer, fillers, paths, path + (0,)))
    if isinstance(s, App):
        return App(
            _carve(s.fun, outer, fillers, paths, path + (0,)),
            _carve(s.arg, outer, fillers, paths, path + (1,)),
        )
    return s


def _carve_args(u: Term, outer) -> Tuple[Term, List[Term], List[Path]]:
    """Carve below the root spine of ``u``; the root head stays in place."""
    h, args = spine(u)
    fillers: List[Term] = []
    paths: List[Path] = []
    p = len(args)
    new_args = []
    for j, a in enumerate(args):
        # path of argument j inside the spine: (0,)*(p-1-j) + (1,)
        base = (0,) * (p - 1 - j) + (1,)
        new_args.append(_carve(a, outer, fillers, paths, base))
    return apply(h, new_args), fillers, paths


def factor_cell(t: Term, outer: Iterable) -> Tuple[Cell, List[Term]]:
    """Split a ground term ``y v1..vp`` into a cell and its hole fillers.

    ``outer`` is a collection of binder names (or ``(name, type)`` pairs).
    Fillers are the maximal ground subterms of the ``vj`` headed by an outer
    variable, numbered leftmost-outermost.
    """
    outer = {o[0] if isinstance(o, tuple) else o for o in outer}
    if t.type != O:
        raise CellError("a cell occurrence has ground type")
    head = _head_var(t)
    if head is None or head.name not in outer:
        raise CellError("the head of a cell occurrence must be an outer variable")
    ctx, fillers, paths = _carve_args(t, outer)
    _, args = spine(ctx)
    for a in args:
        if a.free_vars:
            raise CellError(f"cell context keeps free variables {sorted(a.free_vars)}")
    for f, p in zip(fillers, paths):
        bound = {n for n, _ in binders_along(t, p)}
        if bound & set(f.free_vars):
            raise CellError(f"filler uses variables {sorted(bound & set(f.free_vars))} bound in the cell")
    return Cell(head, tuple(args), len(fillers)), fillers


def minimal_shell(u: Term, outer: Iterable) -> Tuple[MultiContext, List[Term]]:
    """Smallest non-hole context ``M`` with ``u = M[t1]..[tK]``, each ``tk`` outer-headed."""
    outer = {o[0] if isinstance(o, tuple) else o for o in outer}
    head = _head_var(u)
    if u.type != O or head is None or head.name not in outer:
        raise CellError("minimal_shell expects a ground term headed by an outer variable")
    ctx, fillers, _ = _carve_args(u, outer)
    return MultiContext(ctx, len(fillers)), fillers


# ---------------------------------------------------------------------------
# Equivalence-preserving rewrites


def _ground_path(body: Term, path: Path) -> Term:
    try:
        s = subterm_at(body, path)
    except IndexError:
        raise CellError(f"position {path} is not in the term") from None
    if s.type != O:
        raise CellError(f"position {path} addresses a subterm of type {s.type}, not o")
    return s


def stretch(t: Term, path: Path) -> Term:
    """``\\y.M[u]`` to ``\\y.M[M[u]]``, with ``u`` the ground subterm at ``path``.

    ``path`` is relative to the body below all outer binders.
    """
    binders, body = _open(t)
    _ground_path(body, tuple(path))
    return canonical_names(lams(binders, replace_at(body, tuple(path), body)))


def _generalize(s1: Term, s2: Term, outer) -> Tuple[Cell, List[Term], List[Term], List[Path]]:
    """Most specific cell covering both occurrences, with both filler lists.

    Also returns the path of each hole inside ``s1``.
    """
    w: List[Term] = []
    v: List[Term] = []
    paths: List[Path] = []

    def hole(p, q, bound, ren, path):
        if set(p.free_vars) & bound or set(q.free_vars) & set(ren):
            raise CellError("occurrences differ at a position using a variable bound inside the cell")
        w.append(p)
        v.append(q)
        paths.append(path)
        return Hole(len(w))

    def go(p, q, bound, ren, path):
        if isinstance(p, Lam) and isinstance(q, Lam) and p.var_type == q.var_type:
            return Lam(p.var, p.var_type, go(p.body, q.body, bound | {p.var}, {**ren, q.var: p.var}, path + (0,)))
        if p.type != O or q.type != O:
            raise CellError("cannot generalize non-ground positions of different shapes")
        hp, ap = spine(p)
        hq, aq = spine(q)
        if _outer_headed(p, outer) or _outer_headed(q, outer):
            return hole(p, q, bound, ren, path)
        same = (isinstance(hp, Const) and isinstance(hq, Const) and hp.name == hq.name) or (
            isinstance(hp, Var)
            and isinstance(hq, Var)
            and hp.name in bound
            and ren.get(hq.name) == hp.name
        )
        if not same or len(ap) != len(aq):
            return hole(p, q, bound, ren, path)
        n = len(ap)
        args = [go(a, b, bound, ren, path + (0,) * (n - 1 - j) + (1,)) for j, (a, b) in enumerate(zip(ap, aq))]
        return apply(hp, args)

    h1, a1 = spine(s1)
    h2, a2 = spine(s2)
    if not isinstance(h1, Var) or h1 != h2 or h1.name not in outer:
        raise CellError("both occurrences must share the same outer head variable")
    n = len(a1)
    args = [go(a, b, frozenset(), {}, (0,) * (n - 1 - j) + (1,)) for j, (a, b) in enumerate(zip(a1, a2))]
    return Cell(h1, tuple(args), len(w)), w, v, paths


def shrink(t: Term, outer_path: Path, inner_path: Path, k: Optional[int] = None) -> Term:
    """Collapse a nested repetition of one cell.

    ``outer_path`` and ``inner_path`` (relative to the body) address two
    occurrences ``S[w1]..[wK]`` and ``S[v1]..[vK]`` of the same cell ``S``, the
    second inside ``wk``.  The inner occurrence is replaced by ``vk``.  The
    cell is the most specific one covering both occurrences; ``k`` is
    1-based and inferred when omitted.
    """
    binders, body = _open(t)
    outer = {n for n, _ in binders}
    outer_path, inner_path = tuple(outer_path), tuple(inner_path)
    s1 = _ground_path(body, outer_path)
    s2 = _ground_path(body, inner_path)
    if inner_path[: len(outer_path)] != outer_path or inner_path == outer_path:
        raise CellError("the inner occurrence must lie strictly inside the outer one")
    rel = inner_path[len(outer_path):]
    cell, w, v, paths = _generalize(s1, s2, outer)
    found = [i + 1 for i, p in enumerate(paths) if rel[: len(p)] == p]
    if not found:
        raise CellError("the inner occurrence is not inside a hole of the outer cell")
    if k is None:
        k = found[0]
    elif not 1 <= k <= cell.hole_count:
        raise CellError(f"hole index {k} out of range 1..{cell.hole_count}")
    elif k != found[0]:
        raise CellError(f"the inner occurrence lies in hole {found[0]}, not {k}")
    return canonical_names(lams(binders, replace_at(body, inner_path, v[k - 1])))


def shrink_sites(t: Term) -> List[Tuple[Path, Path, int]]:
    """All ``(outer_path, inner_path, k)`` triples where :func:`shrink` applies."""
    binders, body = _open(t)
    outer = {n for n, _ in binders}
    occ = [(p, s) for p, s in subterms(body) if _outer_headed(s, outer)]
    out = []
    for p1, s1 in occ:
        for p2, s2 in occ:
            if len(p2) <= len(p1) or p2[: len(p1)] != p1 or _head_var(s1) != _head_var(s2):
                continue
            try:
                _, _, _, paths = _generalize(s1, s2, outer)
            except CellError:
                continue
            rel = p2[len(p1):]
            ks = [i + 1 for i, p in enumerate(paths) if rel[: len(p)] == p]
            if ks:
                out.append((p1, p2, ks[0]))
    return out


def ground_positions(t: Term) -> List[Path]:
    """Paths (relative to the body) of every ground subterm, for :func:`stretch`."""
    _, body = _open(t)
    return [p for p, s in subterms(body) if s.type == O]


# ---------------------------------------------------------------------------
# Cellularization


def _body_under(t: Term, binders: Sequence[Tuple[str, object]]) -> Term:
    """Strip ``len(binders)`` lambdas from ``t`` and rename them to ``binders``."""
    got, body = strip_lams(t, len(binders))
    ren = {old: Var(new, ty) for (old, ty), (new, _) in zip(got, binders) if old != new}
    return substitute_raw(body, ren)


def cellularize_semi(t: Term) -> Term:
    """A cellular term equivalent to the semi-cellular ``t``."""
    if not t.is_closed:
        raise CellError("expected a closed term")
    return _cellularize_semi(canonical_names(t))


@lru_cache(maxsize=None)
def _cellularize_semi(t: Term) -> Term:
    if is_cellular(t):
        return t
    if not is_semi_cellular(t):
        raise CellError("input is not semi-cellular")
    binders, u = strip_lams(t)
    outer = {n for n, _ in binders}
    h, args = spine(u)
    shell, ts, paths = _carve_args(u, outer)
    cells = []
    for tk, pk in zip(ts, paths):
        # outer binders of the enclosing argument's closure: the y's plus the
        # leading lambdas of that argument
        arg_index = len(args) - 1 - pk.index(1)
        lead, _ = strip_lams(args[arg_index])
        cells.append(factor_cell(tk, outer | {n for n, _ in lead}))
    blocks = []
    for k, (cell, fillers) in enumerate(cells):
        parts = []
        for w in fillers:
            n_kl = fill_holes(shell, {m + 1: (w if m == k else ts[m]) for m in range(len(ts))})
            closure = canonical_names(lams(binders, n_kl))
            assert closure.size < t.size, "cellularization must recurse on shorter terms"
            parts.append(_body_under(_cellularize_semi(closure), binders))
        blocks.append(cell.fill(parts))
    u_new = fill_holes(shell, {k + 1: b for k, b in enumerate(blocks)})
    return canonical_names(lams(binders, u_new))


def cellularize(t: Term) -> Term:
    """A cellular term observationally equivalent to the closed term ``t``."""
    if not t.is_closed:
        raise CellError("expected a closed term")
    return _cellularize(canonical_names(t))


@lru_cache(maxsize=None)
def _cellularize(t: Term) -> Term:
    binders, u = strip_lams(t)
    h, args = spine(u)
    if isinstance(h, Const):
        return t
    new_args = []
    for a in args:
        sub = _cellularize(canonical_names(lams(binders, a)))
        new_args.append(_body_under(sub, binders))
    semi = canonical_names(lams(binders, apply(h, new_args)))
    return _cellularize_semi(semi)


def is_hereditary_cellular(t: Term) -> bool:
    if not t.is_closed:
        raise CellError("expected a closed term")
    return _hereditary(canonical_names(t))


@lru_cache(maxsize=None)
def _hereditary(t: Term) -> bool:
    if not is_cellular(t):
        return False
    binders, u = strip_lams(t)
    if isinstance(spine(u)[0], Const):
        return True
    cell, fillers = factor_cell(u, [n for n, _ in binders])
    if not all(_hereditary(c) for c in cell.abstracted_args()):
        return False
    return all(_hereditary(canonical_names(lams(binders, w))) for w in fillers)
