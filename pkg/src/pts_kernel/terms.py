"""Term syntax: sorts, de Bruijn terms, alpha-equality, shifting, substitution.

Binding is by de Bruijn index; every binder and variable carries a display
hint that is ignored by equality, hashing, and substitution.  Each node caches
a structural hash (``shash``) and the number of dangling indices (``fa``,
one more than the largest free index) so that equality checks, loop-detection
hashing, and the no-op fast paths of ``shift``/``subst`` are cheap even on
very large reduction states.
"""

from __future__ import annotations

from typing import Iterator, Optional, Union


class Sort:
    """One of the three sorts; ordered Star < Box < Triangle."""

    __slots__ = ("tag", "rank", "token")

    def __init__(self, tag: str, rank: int, token: str) -> None:
        self.tag = tag
        self.rank = rank
        self.token = token

    def __repr__(self) -> str:
        return self.token

    def __lt__(self, other: "Sort") -> bool:
        return self.rank < other.rank


STAR = Sort("Star", 0, "*")
BOX = Sort("Box", 1, "#")
TRIANGLE = Sort("Triangle", 2, "##")
SORTS = (STAR, BOX, TRIANGLE)
SORT_BY_TOKEN = {s.token: s for s in SORTS}


class Term:
    __slots__ = ("shash", "fa")

    def __hash__(self) -> int:
        return self.shash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return alpha_eq(self, other)

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        return _debug_repr(self)


class SortT(Term):
    __slots__ = ("sort",)
    __match_args__ = ("sort",)

    def __init__(self, sort: Sort) -> None:
        self.sort = sort
        self.shash = hash(("S", sort.rank))
        self.fa = 0


class Var(Term):
    __slots__ = ("index", "hint")
    __match_args__ = ("index", "hint")

    def __init__(self, index: int, hint: str = "") -> None:
        self.index = index
        self.hint = hint
        self.shash = hash(("V", index))
        self.fa = index + 1


class Const(Term):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name
        self.shash = hash(("C", name))
        self.fa = 0


class App(Term):
    __slots__ = ("fn", "arg")
    __match_args__ = ("fn", "arg")

    def __init__(self, fn: Term, arg: Term) -> None:
        self.fn = fn
        self.arg = arg
        self.shash = hash(("A", fn.shash, arg.shash))
        self.fa = fn.fa if fn.fa >= arg.fa else arg.fa


class Lam(Term):
    __slots__ = ("hint", "dom", "body")
    __match_args__ = ("hint", "dom", "body")

    def __init__(self, hint: str, dom: Term, body: Term) -> None:
        self.hint = hint
        self.dom = dom
        self.body = body
        self.shash = hash(("L", dom.shash, body.shash))
        bf = body.fa - 1
        self.fa = dom.fa if dom.fa >= bf else bf


class Pi(Term):
    __slots__ = ("hint", "dom", "cod")
    __match_args__ = ("hint", "dom", "cod")

    def __init__(self, hint: str, dom: Term, cod: Term) -> None:
        self.hint = hint
        self.dom = dom
        self.cod = cod
        self.shash = hash(("P", dom.shash, cod.shash))
        cf = cod.fa - 1
        self.fa = dom.fa if dom.fa >= cf else cf


class Let(Term):
    """First-class definition node; never desugared to an application."""

    __slots__ = ("hint", "ann", "defn", "body")
    __match_args__ = ("hint", "ann", "defn", "body")

    def __init__(self, hint: str, ann: Term, defn: Term, body: Term) -> None:
        self.hint = hint
        self.ann = ann
        self.defn = defn
        self.body = body
        self.shash = hash(("T", ann.shash, defn.shash, body.shash))
        bf = body.fa - 1
        self.fa = max(ann.fa, defn.fa, bf)


STAR_T = SortT(STAR)
BOX_T = SortT(BOX)
TRIANGLE_T = SortT(TRIANGLE)

# Opaque leaf standing in for erased annotations and type-level subterms.
# The name is not a legal identifier, so source files cannot capture it.
HOLE = Const("•")


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality up to binder and variable display hints."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x.shash != y.shash or x.fa != y.fa:
            return False
        cx = type(x)
        if cx is not type(y):
            return False
        if cx is App:
            stack.append((x.fn, y.fn))
            stack.append((x.arg, y.arg))
        elif cx is Var:
            if x.index != y.index:
                return False
        elif cx is Const:
            if x.name != y.name:
                return False
        elif cx is SortT:
            if x.sort is not y.sort:
                return False
        elif cx is Lam:
            stack.append((x.dom, y.dom))
            stack.append((x.body, y.body))
        elif cx is Pi:
            stack.append((x.dom, y.dom))
            stack.append((x.cod, y.cod))
        elif cx is Let:
            stack.append((x.ann, y.ann))
            stack.append((x.defn, y.defn))
            stack.append((x.body, y.body))
        else:  # pragma: no cover
            return False
    return True


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Shift dangling indices >= ``cutoff`` by ``by``."""
    if by == 0 or t.fa <= cutoff:
        return t
    match t:
        case Var(k, hint):
            return Var(k + by, hint) if k >= cutoff else t
        case App(f, a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case Lam(h, dom, body):
            return Lam(h, shift(dom, by, cutoff), shift(body, by, cutoff + 1))
        case Pi(h, dom, cod):
            return Pi(h, shift(dom, by, cutoff), shift(cod, by, cutoff + 1))
        case Let(h, ann, defn, body):
            return Let(
                h,
                shift(ann, by, cutoff),
                shift(defn, by, cutoff),
                shift(body, by, cutoff + 1),
            )
        case _:
            return t


def subst(body: Term, value: Term, j: int = 0) -> Term:
    """Replace ``Var(j)`` in ``body`` by ``value`` and close the gap.

    ``value`` is expected to live outside the binder being eliminated, i.e.
    at index depth ``j`` less than occurrences of ``Var(j)``.
    """
    if body.fa <= j:
        return body
    match body:
        case Var(k, _):
            if k == j:
                return shift(value, j)
            if k > j:
                return Var(k - 1, body.hint)
            return body
        case App(f, a):
            return App(subst(f, value, j), subst(a, value, j))
        case Lam(h, dom, b):
            return Lam(h, subst(dom, value, j), subst(b, value, j + 1))
        case Pi(h, dom, c):
            return Pi(h, subst(dom, value, j), subst(c, value, j + 1))
        case Let(h, ann, d, b):
            return Let(
                h,
                subst(ann, value, j),
                subst(d, value, j),
                subst(b, value, j + 1),
            )
        case _:
            return body


def try_unshift(t: Term, cutoff: int = 0) -> Optional[Term]:
    """Lower dangling indices by one, or None if ``Var(cutoff)`` occurs."""
    if t.fa <= cutoff:
        return t
    match t:
        case Var(k, hint):
            if k == cutoff:
                return None
            return Var(k - 1, hint) if k > cutoff else t
        case App(f, a):
            nf = try_unshift(f, cutoff)
            na = try_unshift(a, cutoff) if nf is not None else None
            return App(nf, na) if na is not None else None
        case Lam(h, dom, body):
            nd = try_unshift(dom, cutoff)
            nb = try_unshift(body, cutoff + 1) if nd is not None else None
            return Lam(h, nd, nb) if nb is not None else None
        case Pi(h, dom, cod):
            nd = try_unshift(dom, cutoff)
            nc = try_unshift(cod, cutoff + 1) if nd is not None else None
            return Pi(h, nd, nc) if nc is not None else None
        case Let(h, ann, d, b):
            na = try_unshift(ann, cutoff)
            ndn = try_unshift(d, cutoff) if na is not None else None
            nb = try_unshift(b, cutoff + 1) if ndn is not None else None
            return Let(h, na, ndn, nb) if nb is not None else None
        case _:
            return t


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, arguments-in-order)."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def arrow(dom: Term, cod: Term) -> Pi:
    """Non-dependent product."""
    return Pi("_", dom, shift(cod, 1))


def strip_hints(t: Term) -> Term:
    """Canonical alpha-normal form: every hint replaced by the empty string."""
    match t:
        case Var(k, hint):
            return t if hint == "" else Var(k, "")
        case App(f, a):
            return App(strip_hints(f), strip_hints(a))
        case Lam(_, dom, body):
            return Lam("", strip_hints(dom), strip_hints(body))
        case Pi(_, dom, cod):
            return Pi("", strip_hints(dom), strip_hints(cod))
        case Let(_, ann, d, b):
            return Let("", strip_hints(ann), strip_hints(d), strip_hints(b))
        case _:
            return t


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        match x:
            case App(f, a):
                stack.extend((f, a))
            case Lam(_, dom, body):
                stack.extend((dom, body))
            case Pi(_, dom, cod):
                stack.extend((dom, cod))
            case Let(_, ann, d, b):
                stack.extend((ann, d, b))


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def _debug_repr(t: Term) -> str:
    match t:
        case SortT(s):
            return s.token
        case Var(k, hint):
            return f"{hint or '_'}@{k}"
        case Const(name):
            return name
        case App(_, _):
            head, args = spine(t)
            return "(" + " ".join([_debug_repr(head)] + [_debug_repr(a) for a in args]) + ")"
        case Lam(h, dom, body):
            return f"(\\{h or '_'}:{_debug_repr(dom)}. {_debug_repr(body)})"
        case Pi(h, dom, cod):
            return f"(Pi {h or '_'}:{_debug_repr(dom)}. {_debug_repr(cod)})"
        case Let(h, ann, d, b):
            return f"(let {h or '_'}:{_debug_repr(ann)}={_debug_repr(d)} in {_debug_repr(b)})"
    return object.__repr__(t)


TermLike = Union[SortT, Var, Const, App, Lam, Pi, Let]
