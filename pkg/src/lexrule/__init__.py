"""Lexical rules over typed feature structures, with Turkish morphophonology."""

from .fs import FeatureStructure, from_description, subsumes, unify, enforce_constraints
from .lattice import GrammarError, TypeLattice, load_hierarchy
from .lexicon import CompiledLexicon, CompileOptions, Grammar, Lexicon, compile_closure, load_grammar, load_roots
from .rules import LexicalRule, SlotAutomaton, SubcatFrame, apply_rule, load_rules, move_object
from .semantics import Predication, SemanticForm

__all__ = [
    "CompileOptions",
    "CompiledLexicon",
    "FeatureStructure",
    "Grammar",
    "GrammarError",
    "LexicalRule",
    "Lexicon",
    "Predication",
    "SemanticForm",
    "SlotAutomaton",
    "SubcatFrame",
    "TypeLattice",
    "apply_rule",
    "compile_closure",
    "enforce_constraints",
    "from_description",
    "load_grammar",
    "load_hierarchy",
    "load_roots",
    "load_rules",
    "move_object",
    "subsumes",
    "unify",
]
