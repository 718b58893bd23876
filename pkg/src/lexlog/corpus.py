"""The built-in knowledge base and case fixtures, shipped as rule-language
text files and loadable by name."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .errors import UnknownCaseError
from .kb import CompiledKb, compile_program
from .language import ParsedProgram
from .parser import parse_program
from .terms import Atom

KB_RESOURCE = "traffic_law.lex"


def _data_root():
    return resources.files("lexlog") / "data"


def kb_source() -> str:
    """The built-in KB file as text (also installed on disk for editing;
    see ``kb_path``)."""
    return (_data_root() / KB_RESOURCE).read_text(encoding="utf-8")


def kb_path() -> str:
    """Filesystem location of the installed KB file."""
    return str(_data_root() / KB_RESOURCE)


@lru_cache(maxsize=None)
def builtin_program() -> ParsedProgram:
    """The built-in declarations and rules, parsed but not desugared."""
    return parse_program(kb_source())


@lru_cache(maxsize=None)
def builtin_kb() -> CompiledKb:
    """The built-in KB compiled to pure, padded Datalog."""
    return compile_program(builtin_program())


def case_names() -> tuple[str, ...]:
    files = (_data_root() / "cases").iterdir()
    return tuple(sorted(f.name[:-4] for f in files if f.name.endswith(".lex")))


def case_source(name: str) -> str:
    resource = _data_root() / "cases" / f"{name}.lex"
    try:
        return resource.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise UnknownCaseError(
            f"unknown case {name!r}; available: {', '.join(case_names())}"
        ) from None


@lru_cache(maxsize=None)
def fixture_case_facts(name: str) -> tuple[Atom, ...]:
    """The facts of a named case fixture, in file order, unpadded.

    Case files hold facts only; declarations live in the KB.
    """
    parsed = parse_program(case_source(name))
    if parsed.rules or parsed.decls:
        raise UnknownCaseError(
            f"case file {name!r} must contain facts only"
        )
    return parsed.facts
