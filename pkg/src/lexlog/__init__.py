"""lexlog: explainable Datalog inference for statute-style rule bases.

The pipeline: parse an extended rule language (body disjunction, 'OR'
argument sets, optional temporal arguments), lower it to pure Datalog,
enumerate SLD-refutations for queries over case facts, and compile the
refutations into navigable natural-language explanation trees.  Exposed
as a library, a CLI (``lexlog``), and an HTTP session service.
"""

from .bottomup import ANYTIME, bottomup_eval
from .engine import (
    AnswerEntry,
    AnswerSet,
    DerivationStep,
    Goal,
    Refutation,
    SolveLimits,
    resolve_step,
    solve,
)
from .errors import (
    ArityError,
    DuplicateDeclarationError,
    ExpansionLimitError,
    KbError,
    LexlogError,
    MixedRootError,
    NotRangeRestrictedError,
    ParseError,
    ReconstructionError,
    UndeclaredPredicateError,
    UnknownCaseError,
    UnknownRuleError,
    ValidationFailedError,
)
from .explain import (
    Alternative,
    DerivationTree,
    InstantiatedRefutation,
    ProofNode,
    build_derivation_tree,
    build_proof_view,
    derivation_ways,
    instantiate_refutation,
)
from .kb import CompiledKb, assemble_program, compile_file, compile_program, compile_source, facts_to_rules
from .language import (
    Diagnostic,
    ExtendedAtom,
    ExtendedRule,
    ParsedProgram,
    PredicateDecl,
    atom_diagnostics,
    desugar_rule,
    expand_or_arguments,
    pad_atoms,
    pad_temporal,
    to_body_dnf,
    validate_program,
)
from .parser import parse_fact, parse_goal, parse_program
from .render import RenderedText, render_atom, render_rule, render_term
from .terms import (
    Atom,
    Provenance,
    Rule,
    Substitution,
    Term,
    apply_substitution,
    compose,
    const,
    rename_apart,
    unify,
    var,
)
from .corpus import builtin_kb, builtin_program, case_names, fixture_case_facts

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
