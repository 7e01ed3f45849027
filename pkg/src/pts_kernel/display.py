"""Canonical display of terms, with definition re-folding and notations.

The printer is the bit-exact surface for golden traces: application is
left-associative and space-separated, parentheses appear only where the
grammar demands them, sorts print as ``*``, ``#``, ``##``.  Dependent
products print as ``forall (x : T), t`` except over the box/triangle sorts,
which print as ``Pi (X : #) -> t``; non-dependent products print as arrows.

Folding is maximal: a subterm alpha-equal to the unfolding of a defined
constant prints as that constant, later definitions winning, and notations
(the built-in composition ``g∘f``) fold before constant folding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .env import GlobalEnv, Def
from .terms import (
    App,
    BOX,
    Const,
    HOLE,
    Lam,
    Let,
    Pi,
    SortT,
    TRIANGLE,
    Term,
    Var,
    spine,
    subst,
    try_unshift,
)

# Precedence levels, loosest first.
_BINDER = 0
_ARROW = 1
_COMP = 2
_APP = 3
_ATOM = 4


@dataclass(frozen=True)
class Notation:
    """A display abbreviation: a left-linear term pattern and a template."""

    name: str
    pattern: Term
    display: str


# g∘f stands for fun (x : X) => g (f x); the domain is implicit on display
# and recovered from f's type when parsing.
COMPOSE = Notation(
    name="compose",
    pattern=Lam("x", Const("$X"), App(Const("$g"), App(Const("$f"), Var(0, "x")))),
    display="{g}∘{f}",
)

BUILTIN_NOTATIONS = (COMPOSE,)


def match_composition(t: Term) -> Optional[tuple[Term, Term]]:
    """Destructure ``fun (x : X) => g (f x)`` with x free in neither g nor f."""
    if not isinstance(t, Lam):
        return None
    body = t.body
    if not isinstance(body, App) or not isinstance(body.arg, App):
        return None
    inner = body.arg
    if not isinstance(inner.arg, Var) or inner.arg.index != 0:
        return None
    g = try_unshift(body.fn)
    if g is None:
        return None
    f = try_unshift(inner.fn)
    if f is None:
        return None
    return g, f


def fold_display(
    t: Term,
    env: Optional[GlobalEnv] = None,
    notations: bool = True,
    scope: Optional[list[str]] = None,
) -> str:
    """Print ``t`` with maximal re-folding against ``env``'s definitions.

    ``scope`` names any dangling indices, innermost first.
    """
    fold_index = _fold_index(env) if env is not None else {}
    memo: dict[Term, Term] = {}
    return _render(t, _BINDER, list(scope or []), env, fold_index, memo, notations)


def plain_display(t: Term, env: Optional[GlobalEnv] = None) -> str:
    """Print ``t`` with no re-folding and no notations."""
    return _render(t, _BINDER, [], env, {}, {}, False)


def raw_display(t: Term, env: GlobalEnv) -> str:
    """Fully unfolded, fold-free print (the ``--raw`` rendering)."""
    from .env import unfold_all

    return plain_display(unfold_all(env, t), env)


def _fold_index(env: GlobalEnv) -> dict[Term, str]:
    if env._fold_index is None:
        from .env import unfold_all

        index: dict[Term, str] = {}
        for entry in env.entries:
            if isinstance(entry, Def):
                index[unfold_all(env, Const(entry.name))] = entry.name
        env._fold_index = index
    return env._fold_index


def _unfolded(t: Term, env: GlobalEnv, memo: dict[Term, Term]) -> Term:
    """unfold_all with sharing across sibling subterms of one display call."""
    hit = memo.get(t)
    if hit is not None:
        return hit
    match t:
        case Const(name):
            if name == HOLE.name or name not in env:
                out = t
            else:
                entry = env.lookup(name)
                out = _unfolded(entry.body, env, memo) if isinstance(entry, Def) else t
        case App(f, a):
            out = App(_unfolded(f, env, memo), _unfolded(a, env, memo))
        case Lam(h, dom, body):
            out = Lam(h, _unfolded(dom, env, memo), _unfolded(body, env, memo))
        case Pi(h, dom, cod):
            out = Pi(h, _unfolded(dom, env, memo), _unfolded(cod, env, memo))
        case Let(_, _, d, b):
            out = _unfolded(subst(b, d), env, memo)
        case _:
            out = t
    memo[t] = out
    return out


def _render(
    t: Term,
    prec: int,
    scope: list[str],
    env: Optional[GlobalEnv],
    fold_index: dict[Term, str],
    memo: dict[Term, Term],
    notations: bool,
) -> str:
    def rec(t: Term, prec: int) -> str:
        return _render(t, prec, scope, env, fold_index, memo, notations)

    if notations:
        comp = match_composition(t)
        if comp is not None:
            g, f = comp
            s = f"{rec(g, _APP)}∘{rec(f, _APP)}"
            return f"({s})" if prec > _COMP else s

    if fold_index and t.fa == 0 and env is not None and not isinstance(t, (Const, SortT, Var)):
        name = fold_index.get(_unfolded(t, env, memo))
        if name is not None:
            return name

    match t:
        case SortT(s):
            return s.token
        case Const(name):
            return name
        case Var(i, hint):
            if i < len(scope):
                return scope[i]
            return hint or f"?{i}"
        case App(_, _):
            head, args = spine(t)
            parts = [rec(head, _ATOM)] + [rec(a, _ATOM) for a in args]
            s = " ".join(parts)
            return f"({s})" if prec > _APP else s
        case Lam(hint, dom, body):
            name = _fresh(hint, scope)
            dom_s = rec(dom, _BINDER)
            scope.insert(0, name)
            body_s = rec(body, _BINDER)
            scope.pop(0)
            s = f"fun ({name} : {dom_s}) => {body_s}"
            return f"({s})" if prec > _BINDER else s
        case Pi(hint, dom, cod):
            plain_cod = try_unshift(cod)
            if plain_cod is not None:
                s = f"{rec(dom, _COMP)} -> {rec(plain_cod, _ARROW)}"
                return f"({s})" if prec > _ARROW else s
            name = _fresh(hint, scope)
            dom_s = rec(dom, _BINDER)
            scope.insert(0, name)
            cod_s = rec(cod, _BINDER)
            scope.pop(0)
            if isinstance(dom, SortT) and dom.sort in (BOX, TRIANGLE):
                s = f"Pi ({name} : {dom_s}) -> {cod_s}"
            else:
                s = f"forall ({name} : {dom_s}), {cod_s}"
            return f"({s})" if prec > _BINDER else s
        case Let(hint, ann, defn, body):
            name = _fresh(hint, scope)
            ann_s = rec(ann, _BINDER)
            defn_s = rec(defn, _BINDER)
            scope.insert(0, name)
            body_s = rec(body, _BINDER)
            scope.pop(0)
            s = f"let {name} : {ann_s} := {defn_s} in {body_s}"
            return f"({s})" if prec > _BINDER else s
    return repr(t)  # pragma: no cover


def _fresh(hint: str, scope: list[str]) -> str:
    name = hint or "x"
    while name in scope:
        name += "'"
    return name
