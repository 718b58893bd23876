"""Exception types shared across the package."""

from __future__ import annotations


class LexlogError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LexlogError):
    """Source text could not be tokenized or parsed."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class DuplicateDeclarationError(ParseError):
    """A predicate was declared more than once in one program."""


class KbError(LexlogError):
    """A program failed a language-level check outside parsing."""


class ArityError(KbError):
    """An atom's argument count fits neither n nor n+1 for its predicate."""


class UndeclaredPredicateError(KbError):
    """An atom uses a predicate with no declaration."""


class ExpansionLimitError(KbError):
    """Desugaring one rule would exceed the configured expansion cap."""


class ValidationFailedError(KbError):
    """Compilation was attempted on a program with diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        lines = "; ".join(d.message for d in self.diagnostics)
        super().__init__(f"{len(self.diagnostics)} diagnostic(s): {lines}")


class NotRangeRestrictedError(LexlogError):
    """The bottom-up evaluator refuses rules whose head variables do not
    all occur in the body, and non-ground facts outside the padded
    temporal convention."""

    def __init__(self, rule_id: str, message: str):
        super().__init__(f"rule {rule_id}: {message}")
        self.rule_id = rule_id


class UnknownCaseError(LexlogError):
    """No case fixture is registered under the requested name."""


class UnknownRuleError(LexlogError):
    """No rule with the requested id exists in the program."""


class MixedRootError(LexlogError):
    """Refutations with different initial goals cannot share one tree."""


class ReconstructionError(LexlogError):
    """A refutation does not prove the atom a proof view was asked for."""
