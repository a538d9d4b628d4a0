"""Relational algebra and calculus over semirings with monus and support."""

from .algebra import arity_of, evaluate, parse_expr, print_expr
from .calculus import eval_at, free_vars, parse_formula, print_formula, relation_of
from .harness import (
    GenConfig,
    check_domain_independence,
    check_equivalence,
    gen_algebra_expr,
    gen_database,
    gen_formula,
    monus_axiom_suite,
)
from .relation import (
    KDatabase,
    KRelation,
    KStructure,
    active_domain,
    database_from_json,
    database_to_json,
    divide,
    relation,
    structure_of,
)
from .semiring import (
    SEMIRINGS,
    SemiringDescriptor,
    Value,
    add,
    get_semiring,
    monus,
    mul,
    nat_leq,
    support_val,
)
from .transpile import (
    TranslationResult,
    adom_expr,
    algebra_to_calculus,
    calculus_to_algebra,
    pad_align,
)

__version__ = "0.1.0"
