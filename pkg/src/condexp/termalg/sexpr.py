"""S-expression syntax for terms: ``(prod (gen 0) (adj (gen 1)))``, ``(comb "1/2" (gen 0) "-1/2*i" (gen 1))``."""

from __future__ import annotations

import re

from ..exactnum import parse_gaussian
from .terms import Adj, Comb, Gen, Prod, Term

_TOKEN = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|([^\s()"]+))')


class TermSyntaxError(ValueError):
    pass


def _tokens(text: str):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            yield "(", None
        elif m.group(2):
            yield ")", None
        elif m.group(3) is not None:
            yield "str", m.group(3)
        else:
            yield "atom", m.group(4)


def parse_term(text: str) -> Term:
    toks = list(_tokens(text))
    pos = 0

    def expect(kind):
        nonlocal pos
        if pos >= len(toks) or toks[pos][0] != kind:
            found = toks[pos] if pos < len(toks) else "end of input"
            raise TermSyntaxError(f"expected {kind!r}, found {found!r} in {text!r}")
        tok = toks[pos]
        pos += 1
        return tok[1]

    def coeff():
        nonlocal pos
        if pos < len(toks) and toks[pos][0] in ("str", "atom"):
            value = toks[pos][1]
            pos += 1
            try:
                return parse_gaussian(value)
            except (ValueError, ZeroDivisionError) as exc:
                raise TermSyntaxError(str(exc)) from None
        raise TermSyntaxError(f"expected a coefficient in {text!r}")

    def term():
        nonlocal pos
        expect("(")
        head = expect("atom")
        if head == "gen":
            raw = expect("atom")
            if not raw.isdigit():
                raise TermSyntaxError(f"generator index must be a natural, got {raw!r}")
            out = Gen(int(raw))
        elif head == "adj":
            out = Adj(term())
        elif head == "prod":
            left = term()
            out = Prod(left, term())
        elif head == "comb":
            lam = coeff()
            left = term()
            mu = coeff()
            out = Comb(lam, left, mu, term())
        else:
            raise TermSyntaxError(f"unknown constructor {head!r}")
        expect(")")
        return out

    result = term()
    if pos != len(toks):
        raise TermSyntaxError(f"trailing input after term in {text!r}")
    return result


def format_term(t: Term) -> str:
    if isinstance(t, Gen):
        return f"(gen {t.index})"
    if isinstance(t, Adj):
        return f"(adj {format_term(t.inner)})"
    if isinstance(t, Prod):
        return f"(prod {format_term(t.left)} {format_term(t.right)})"
    if isinstance(t, Comb):
        return f'(comb "{t.lam}" {format_term(t.left)} "{t.mu}" {format_term(t.right)})'
    raise TypeError(f"not a term: {t!r}")
