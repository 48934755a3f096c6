"""Online monitoring of bounded temporal formulas with three-valued verdicts.

The package parses formulas whose temporal operators carry integer windows
and whose operands are linear predicates over named signals, compiles them to
constant-state streaming monitors, checks those monitors against reference
semantics, and emits Lustre observer units for external model checking.
"""

from .errors import (
    CheckerError,
    EnumerationCapError,
    FlagConflictError,
    FormulaError,
    FormulaSyntaxError,
    IntervalBoundError,
    InvalidFormulaError,
    MissingSignalError,
    NestedOperatorError,
    ShortTraceError,
    StlObsError,
    TraceError,
    TraceFormatError,
    UnknownSignalError,
)
from .trilean import (
    FALSE,
    TRUE,
    UNKNOWN,
    FlagPair,
    Trilean,
    and3,
    from_flags,
    implies3,
    not3,
    or3,
    to_flags,
    verdict_from_bools,
)
from .formula import (
    Always,
    And,
    Atom,
    AtomicPredicate,
    Eventually,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    Until,
    horizon,
    linear_atom,
    render,
    signal_atom,
    signals_of,
    validate,
)
from .parser import parse
from .trace import Trace, trace_from_rows
from .monitor import Monitor, VerdictRecord, compile_formula
from .oracle import identity_check, offline_eval, three_valued_eval
from .conformance import (
    ConformanceReport,
    differential_sweep,
    induction_suite,
    property_suite,
    random_formula,
)
from .traceio import (
    VerdictWriter,
    read_csv,
    read_jsonl,
    read_trace,
    read_verdicts,
    write_csv,
    write_verdicts,
)
from .lustregen import (
    CheckerReport,
    LustreSourceUnit,
    emit_basic_nodes,
    emit_operator_nodes,
    emit_proof_node,
    emit_units,
    run_kind2,
    write_units,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Always",
    "And",
    "Atom",
    "AtomicPredicate",
    "CheckerError",
    "CheckerReport",
    "ConformanceReport",
    "EnumerationCapError",
    "Eventually",
    "FALSE",
    "FlagConflictError",
    "FlagPair",
    "Formula",
    "FormulaError",
    "FormulaSyntaxError",
    "Implies",
    "Interval",
    "IntervalBoundError",
    "InvalidFormulaError",
    "LustreSourceUnit",
    "MissingSignalError",
    "Monitor",
    "NestedOperatorError",
    "Not",
    "Or",
    "ShortTraceError",
    "StlObsError",
    "TRUE",
    "Trace",
    "TraceError",
    "TraceFormatError",
    "Trilean",
    "UNKNOWN",
    "UnknownSignalError",
    "Until",
    "VerdictRecord",
    "VerdictWriter",
    "and3",
    "compile_formula",
    "differential_sweep",
    "emit_basic_nodes",
    "emit_operator_nodes",
    "emit_proof_node",
    "emit_units",
    "from_flags",
    "horizon",
    "identity_check",
    "implies3",
    "induction_suite",
    "linear_atom",
    "not3",
    "offline_eval",
    "or3",
    "parse",
    "property_suite",
    "random_formula",
    "read_csv",
    "read_jsonl",
    "read_trace",
    "read_verdicts",
    "render",
    "run_kind2",
    "signal_atom",
    "signals_of",
    "three_valued_eval",
    "to_flags",
    "trace_from_rows",
    "validate",
    "verdict_from_bools",
    "write_csv",
    "write_units",
    "write_verdicts",
]
