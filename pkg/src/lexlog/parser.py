"""Lexer and recursive-descent parser for the rule language.

Grammar sketch (statements end with a period, ``%`` starts a line
comment)::

    program   : statement*
    statement : decl | refs | rule | fact
    decl      : '#pred' Name '/' Int String '.'
    refs      : '#refs' tag String (',' tag String)* '.'   tag: law|case|commentary
    rule      : atom '<-' formula '.'
    fact      : atom '.'
    formula   : orexpr ((',') orexpr)*          -- comma binds loosest
    orexpr    : andexpr ('\\/' andexpr)*
    andexpr   : primary ('/\\' primary)*        -- /\\ binds tightest
    primary   : atom | '(' formula ')' | '[' formula ']'
    atom      : Name ['(' orset (',' orset)* ')']
    orset     : term ("'OR'" term)*
    term      : Variable | Name | String | Int

Variables start with an uppercase letter or underscore; bare constants
start with a lowercase letter; every other constant is double-quoted.
A ``#refs`` directive attaches provenance to the rule that follows it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateDeclarationError, ParseError
from .language import (
    BodyAtom,
    BodyConj,
    BodyDisj,
    BodyNode,
    ExtendedAtom,
    ExtendedRule,
    ParsedProgram,
    PredicateDecl,
)
from .terms import Atom, Provenance, Term, const, var

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACK",
    "]": "RBRACK",
    ",": "COMMA",
    ".": "DOT",
    "/": "SLASH",
}

_REF_TAGS = ("law", "case", "commentary")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def error(message: str, at_line: int, at_col: int) -> ParseError:
        return ParseError(message, at_line, at_col)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == "<" and text[i:i + 2] == "<-":
            tokens.append(Token("ARROW", "<-", start_line, start_col))
            i += 2
            col += 2
            continue
        if c == "/" and text[i:i + 2] == "/\\":
            tokens.append(Token("AND", "/\\", start_line, start_col))
            i += 2
            col += 2
            continue
        if c == "\\" and text[i:i + 2] == "\\/":
            tokens.append(Token("OR", "\\/", start_line, start_col))
            i += 2
            col += 2
            continue
        if c == "'":
            if text[i:i + 4] == "'OR'":
                tokens.append(Token("ORSEP", "'OR'", start_line, start_col))
                i += 4
                col += 4
                continue
            raise error("expected 'OR' after single quote", start_line, start_col)
        if c == '"':
            i += 1
            col += 1
            chunks: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise error("unterminated string", start_line, start_col)
                ch = text[i]
                if ch == "\\":
                    if i + 1 >= n:
                        raise error("unterminated string", start_line, start_col)
                    nxt = text[i + 1]
                    if nxt not in ('"', "\\"):
                        raise error(f"bad escape \\{nxt}", line, col)
                    chunks.append(nxt)
                    i += 2
                    col += 2
                    continue
                if ch == '"':
                    i += 1
                    col += 1
                    break
                chunks.append(ch)
                i += 1
                col += 1
            tokens.append(Token("STRING", "".join(chunks), start_line, start_col))
            continue
        if c == "#":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i + 1:j]
            if not name:
                raise error("expected a directive name after '#'", start_line, start_col)
            tokens.append(Token("DIRECTIVE", name, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if (c == "_" or c.isupper()) else "NAME"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, start_line, start_col))
            i += 1
            col += 1
            continue
        raise error(f"unexpected character {c!r}", start_line, start_col)

    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def here(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.here
        if tok.kind != kind:
            raise self.fail(f"expected {what}, found {tok.value or 'end of input'!r}")
        return self.advance()

    def ident(self, what: str) -> Token:
        """Predicate names may be capitalized; the case convention only
        separates variables from constants in term position."""
        tok = self.here
        if tok.kind not in ("NAME", "VAR"):
            raise self.fail(f"expected {what}, found {tok.value or 'end of input'!r}")
        return self.advance()

    def fail(self, message: str) -> ParseError:
        tok = self.here
        return ParseError(message, tok.line, tok.col)

    # -- statements ---------------------------------------------------

    def program(self) -> ParsedProgram:
        decls: list[PredicateDecl] = []
        rules: list[ExtendedRule] = []
        facts: list[Atom] = []
        fact_positions: list[tuple[int, int]] = []
        seen_decls: set[str] = set()
        pending_refs: Provenance | None = None
        pending_pos: tuple[int, int] = (0, 0)

        while self.here.kind != "EOF":
            tok = self.here
            if tok.kind == "DIRECTIVE" and tok.value == "pred":
                if pending_refs is not None:
                    raise ParseError(
                        "#refs must be followed by a rule", *pending_pos
                    )
                decl = self.decl_statement()
                if decl.name in seen_decls:
                    raise DuplicateDeclarationError(
                        f"duplicate declaration of {decl.name}", tok.line, tok.col
                    )
                seen_decls.add(decl.name)
                decls.append(decl)
            elif tok.kind == "DIRECTIVE" and tok.value == "refs":
                if pending_refs is not None:
                    raise ParseError(
                        "#refs must be followed by a rule", *pending_pos
                    )
                pending_refs = self.refs_statement()
                pending_pos = (tok.line, tok.col)
            elif tok.kind == "DIRECTIVE":
                raise self.fail(f"unknown directive #{tok.value}")
            else:
                head = self.atom()
                if self.here.kind == "ARROW":
                    self.advance()
                    body = self.formula()
                    self.expect("DOT", "'.'")
                    rules.append(ExtendedRule(
                        id=f"r{len(rules) + 1}",
                        head=self.plain(head, "rule heads"),
                        body=body,
                        provenance=pending_refs or Provenance(),
                        line=tok.line,
                        col=tok.col,
                    ))
                    pending_refs = None
                else:
                    self.expect("DOT", "'<-' or '.'")
                    if pending_refs is not None:
                        raise ParseError(
                            "#refs must be followed by a rule", *pending_pos
                        )
                    facts.append(self.plain(head, "facts"))
                    fact_positions.append((tok.line, tok.col))

        if pending_refs is not None:
            raise ParseError("#refs must be followed by a rule", *pending_pos)
        return ParsedProgram(
            decls=tuple(decls),
            rules=tuple(rules),
            facts=tuple(facts),
            fact_positions=tuple(fact_positions),
        )

    def decl_statement(self) -> PredicateDecl:
        self.advance()  # '#pred'
        name = self.ident("a predicate name").value
        self.expect("SLASH", "'/'")
        arity = int(self.expect("INT", "an arity").value)
        template = self.expect("STRING", "a template string").value
        self.expect("DOT", "'.'")
        return PredicateDecl(name, arity, template)

    def refs_statement(self) -> Provenance:
        self.advance()  # '#refs'
        refs: dict[str, list[str]] = {tag: [] for tag in _REF_TAGS}
        while True:
            tag_tok = self.expect("NAME", "law, case, or commentary")
            if tag_tok.value not in _REF_TAGS:
                raise ParseError(
                    f"unknown reference tag {tag_tok.value!r}",
                    tag_tok.line, tag_tok.col,
                )
            text = self.expect("STRING", "a citation string").value
            refs[tag_tok.value].append(text)
            if self.here.kind == "COMMA":
                self.advance()
                continue
            break
        self.expect("DOT", "'.'")
        return Provenance(
            law_refs=tuple(refs["law"]),
            case_refs=tuple(refs["case"]),
            commentary_refs=tuple(refs["commentary"]),
        )

    def plain(self, ea: ExtendedAtom, where: str) -> Atom:
        if ea.has_or:
            raise ParseError(
                f"'OR' arguments are not allowed in {where}", ea.line, ea.col
            )
        return Atom(ea.pred, tuple(s[0] for s in ea.argsets))

    # -- formulas -----------------------------------------------------

    def formula(self) -> BodyNode:
        parts = [self.orexpr()]
        while self.here.kind == "COMMA":
            self.advance()
            parts.append(self.orexpr())
        if len(parts) == 1:
            return parts[0]
        return BodyConj(tuple(parts), tight=False)

    def orexpr(self) -> BodyNode:
        parts = [self.andexpr()]
        while self.here.kind == "OR":
            self.advance()
            parts.append(self.andexpr())
        if len(parts) == 1:
            return parts[0]
        return BodyDisj(tuple(parts))

    def andexpr(self) -> BodyNode:
        parts = [self.primary()]
        while self.here.kind == "AND":
            self.advance()
            parts.append(self.primary())
        if len(parts) == 1:
            return parts[0]
        return BodyConj(tuple(parts), tight=True)

    def primary(self) -> BodyNode:
        tok = self.here
        if tok.kind == "LPAREN":
            self.advance()
            node = self.formula()
            self.expect("RPAREN", "')'")
            return node
        if tok.kind == "LBRACK":
            self.advance()
            node = self.formula()
            self.expect("RBRACK", "']'")
            return node
        return BodyAtom(self.atom())

    # -- atoms and terms ----------------------------------------------

    def atom(self) -> ExtendedAtom:
        tok = self.ident("a predicate name")
        argsets: list[tuple[Term, ...]] = []
        if self.here.kind == "LPAREN":
            self.advance()
            argsets.append(self.orset())
            while self.here.kind == "COMMA":
                self.advance()
                argsets.append(self.orset())
            self.expect("RPAREN", "')'")
        return ExtendedAtom(
            pred=tok.value, argsets=tuple(argsets), line=tok.line, col=tok.col
        )

    def orset(self) -> tuple[Term, ...]:
        terms = [self.term()]
        while self.here.kind == "ORSEP":
            self.advance()
            terms.append(self.term())
        return tuple(terms)

    def term(self) -> Term:
        tok = self.here
        if tok.kind == "VAR":
            self.advance()
            return var(tok.value)
        if tok.kind in ("NAME", "STRING", "INT"):
            self.advance()
            return const(tok.value)
        raise self.fail(f"expected a term, found {tok.value or 'end of input'!r}")


def parse_program(text: str) -> ParsedProgram:
    """Parse rule-language source into declarations, rules, and facts."""
    return _Parser(tokenize(text)).program()


def parse_goal(text: str) -> tuple[Atom, ...]:
    """Parse a query: comma-separated atoms, optional trailing period.

    Goals take no sugar; 'OR' arguments and body operators are rejected.
    """
    p = _Parser(tokenize(text))
    atoms = [p.plain(p.atom(), "goals")]
    while p.here.kind == "COMMA":
        p.advance()
        atoms.append(p.plain(p.atom(), "goals"))
    if p.here.kind == "DOT":
        p.advance()
    p.expect("EOF", "end of goal")
    return tuple(atoms)


def parse_fact(text: str) -> Atom:
    """Parse one fact statement (trailing period optional)."""
    p = _Parser(tokenize(text))
    atom = p.plain(p.atom(), "facts")
    if p.here.kind == "DOT":
        p.advance()
    p.expect("EOF", "end of fact")
    return atom
