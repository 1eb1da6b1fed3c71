"""Classification and constant-delay enumeration of unions of conjunctive queries."""
from .classifier import Verdict, classify, union_extension_search
from .query import CQ, UCQ, Atom, ParseError, QueryError, parse_ucq, remove_redundant

__version__ = "0.1.0"

__all__ = [
    "Atom", "CQ", "UCQ", "ParseError", "QueryError", "Verdict", "classify", "parse_ucq",
    "remove_redundant", "union_extension_search",
]
