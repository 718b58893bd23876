"""Loading and compiling knowledge bases: parse, validate, pad, desugar.

A :class:`CompiledKb` is the engine-ready form of a program: pure,
padded Datalog rules in a deterministic order, with a registry that maps
every rule id (including expansion ids) back to its provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import UnknownRuleError, ValidationFailedError
from .language import (
    DEFAULT_EXPANSION_CAP,
    ParsedProgram,
    PredicateDecl,
    _refs_lines,
    desugar_rule,
    pad_temporal,
    validate_program,
)
from .parser import parse_program
from .terms import Atom, Provenance, Rule


@dataclass(frozen=True, slots=True)
class CompiledKb:
    """A validated, padded, desugared program ready for resolution."""

    parsed: ParsedProgram                      # after temporal padding
    rules: tuple[Rule, ...]                    # desugared rules, source order
    fact_rules: tuple[Rule, ...]               # program facts as empty-body rules
    expansion_counts: tuple[tuple[str, int], ...]  # extended rule id -> pure count

    @property
    def program(self) -> tuple[Rule, ...]:
        return self.rules + self.fact_rules

    def decl_map(self) -> dict[str, PredicateDecl]:
        return self.parsed.decl_map()

    def rules_by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.program}

    def provenance_of(self, rule_id: str) -> Provenance:
        """Provenance attached at authoring time; expanded rules inherit
        their parent's."""
        for r in self.program:
            if r.id == rule_id:
                return r.provenance
        for er in self.parsed.rules:
            if er.id == rule_id:
                return er.provenance
        raise UnknownRuleError(f"no rule with id {rule_id!r}")


def compile_program(
    parsed: ParsedProgram,
    *,
    cap: int = DEFAULT_EXPANSION_CAP,
    check: bool = True,
) -> CompiledKb:
    """Lower a parsed program to pure Datalog.

    With ``check`` (the default), validation diagnostics abort the
    compile; run :func:`lexlog.language.validate_program` yourself first
    if you want the full list.
    """
    if check:
        diagnostics = validate_program(parsed)
        if diagnostics:
            raise ValidationFailedError(diagnostics)
    padded = pad_temporal(parsed)
    rules: list[Rule] = []
    counts: list[tuple[str, int]] = []
    for er in padded.rules:
        expanded = desugar_rule(er, cap)
        counts.append((er.id, len(expanded)))
        rules.extend(expanded)
    fact_rules = facts_to_rules(padded.facts)
    return CompiledKb(
        parsed=padded,
        rules=tuple(rules),
        fact_rules=fact_rules,
        expansion_counts=tuple(counts),
    )


def facts_to_rules(
    facts: Iterable[Atom], prefix: str = "f", start: int = 1
) -> tuple[Rule, ...]:
    return tuple(
        Rule(f"{prefix}{i}", atom) for i, atom in enumerate(facts, start)
    )


def compile_source(text: str, *, cap: int = DEFAULT_EXPANSION_CAP) -> CompiledKb:
    return compile_program(parse_program(text), cap=cap)


def compile_file(path: str | Path, *, cap: int = DEFAULT_EXPANSION_CAP) -> CompiledKb:
    return compile_source(Path(path).read_text(encoding="utf-8"), cap=cap)


def assemble_program(kb: CompiledKb, extra_facts: Sequence[Rule] = ()) -> tuple[Rule, ...]:
    """The rule order the engine sees: KB rules, KB facts, then any
    session or case facts."""
    return kb.program + tuple(extra_facts)


def pure_program_source(kb: CompiledKb) -> str:
    """The desugared program back in rule-language syntax, sugar-free.

    The output reparses to an equivalent program: declarations, one
    statement per pure rule with its provenance, then the facts.
    Temporal slots appear as final arguments, as the n/n+1 convention
    writes them.
    """
    lines: list[str] = []
    decl_program = ParsedProgram(decls=kb.parsed.decls)
    decl_text = decl_program.source_form()
    if decl_text:
        lines.append(decl_text.rstrip("\n"))
    for rule in kb.rules:
        lines.extend(_refs_lines(rule.provenance))
        lines.append(rule.source_form())
    for fact in kb.fact_rules:
        lines.append(fact.source_form())
    return "\n".join(lines) + ("\n" if lines else "")
