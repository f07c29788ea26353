"""Observational equivalence in the minimal model of the simply-typed lambda
calculus over one ground type ``o`` and a finite set of ground constants."""
from .kernel import (
    App,
    Arrow,
    Const,
    Ground,
    Hole,
    Lam,
    LambdaError,
    O,
    Signature,
    Term,
    TermTypeError,
    Var,
    alpha_eq,
    apply,
    arrow,
    beta_normalize,
    eta_long,
    identity,
    normalize,
    parse_signature,
    substitute,
    substitute_all,
)
from .syntax import ParseError, parse_raw, parse_term, parse_type, print_term, print_type
from .cellular import (
    Cell,
    CellError,
    MultiContext,
    cellularize,
    cellularize_semi,
    factor_cell,
    is_cellular,
    is_hereditary_cellular,
    is_semi_cellular,
    minimal_shell,
    shrink,
    stretch,
)
from .model import (
    Budget,
    BudgetExceeded,
    InvariantViolation,
    RepTable,
    Session,
    Verdict,
    canonical_rep,
    count_classes,
    decide_equiv,
    dedup,
    representatives,
)
from .oracle import brute_equiv, enumerate_terms, full_model_eval, quotient_classes, random_term

__version__ = "0.1.0"
