"""Natural-language rendering of terms, atoms, and rules.

Each predicate declaration carries a display template; rendering fills
the template's parameters with the atom's arguments positionally.  The
temporal slot is the one place time is treated specially: a bound time
is appended as " at <time>", a slot invented by padding and still
unbound is omitted entirely.  Templates are data, so swapping in
another language is a matter of shipping another declaration file.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ArityError, KbError, UndeclaredPredicateError
from .language import PredicateDecl, template_params, template_segments
from .terms import Atom, Rule, Term


@dataclass(frozen=True, slots=True)
class RenderedText:
    """A display string together with the value it renders."""

    text: str
    source: Union[Atom, Rule]

    def __str__(self) -> str:
        return self.text


def render_term(t: Term) -> str:
    """Constants display their unquoted source text, variables their
    names."""
    return t.name


def _decl_for(pred: str, decls: Mapping[str, PredicateDecl]) -> PredicateDecl:
    decl = decls.get(pred)
    if decl is None:
        raise UndeclaredPredicateError(f"undeclared predicate {pred}")
    return decl


def _temporal_suffix(a: Atom) -> str:
    t = a.temporal
    if t is None:
        return ""
    if t.is_var and a.padded:
        # Invented by padding and never bound: the relation just holds.
        return ""
    return f" at {render_term(t)}"


def render_atom(a: Atom, decls: Mapping[str, PredicateDecl]) -> RenderedText:
    """Fill the predicate's template with the atom's arguments."""
    decl = _decl_for(a.pred, decls)
    if len(template_params(decl.template)) != decl.base_arity:
        raise KbError(
            f"template for {decl.name}/{decl.base_arity} does not consume "
            f"all parameters"
        )
    if len(a.args) != decl.base_arity:
        raise ArityError(
            f"{a.pred} renders with {decl.base_arity} argument(s), got {len(a.args)}"
        )
    parts: list[str] = []
    for seg in template_segments(decl.template):
        if isinstance(seg, int):
            parts.append(render_term(a.args[seg]))
        else:
            parts.append(seg)
    return RenderedText("".join(parts) + _temporal_suffix(a), a)


def render_rule(r: Rule, decls: Mapping[str, PredicateDecl]) -> RenderedText:
    """"<head> if <premise> and <premise> ..."; facts render as just the
    head."""
    head = render_atom(r.head, decls).text
    if r.is_fact:
        return RenderedText(head, r)
    premises = " and ".join(render_atom(a, decls).text for a in r.body)
    return RenderedText(f"{head} if {premises}", r)
