"""Data side: databases, CDY enumeration, virtual relations, union enumeration."""
from .cdy import CDYEnumerator, CDYPlan, EngineError, cdy_enumerate, membership_test, yannakakis_reduce
from .cheater import BudgetViolation, CheaterWrapper, cheater_wrapper
from .database import Database, DatabaseError, Dictionary, load_database, write_database
from .kernels import BACKEND
from .steps import StepCounter
from .union import UCQEnumerator, enumerate_ucq
from .virtual import VirtualInstance, instantiate_virtual, materialize

__all__ = [
    "BACKEND", "BudgetViolation", "CDYEnumerator", "CDYPlan", "CheaterWrapper", "Database",
    "DatabaseError", "Dictionary", "EngineError", "StepCounter", "UCQEnumerator", "VirtualInstance",
    "cdy_enumerate", "cheater_wrapper", "enumerate_ucq", "instantiate_virtual", "load_database",
    "materialize", "membership_test", "write_database", "yannakakis_reduce",
]
