"""A small pure type system kernel with first-class definitions, user rewrite
rules, and a head-reduction trace engine, plus a machine-checked corpus of
looping proof terms in inconsistent systems."""

from .env import Decl, Def, GlobalEnv, MetaArg, Pattern, Rewrite, add_entry, match_pattern, unfold_all
from .errors import (
    DuplicateNameError,
    ErasureNeedsTypesError,
    IllFormedPatternError,
    KernelError,
    ParseError,
    TypeCheckError,
)
from .display import fold_display, plain_display, raw_display
from .reduce import (
    ANNOTATIONS,
    HEAD_DEF,
    HEAD_LINEAR,
    POLY,
    LoopReport,
    Trace,
    TraceStep,
    detect_loop,
    erase,
    erase_env,
    head_def_step,
    head_linear_step,
    readback,
    trace,
)
from .specs import LAMBDA_HOL, LAMBDA_U_MINUS, PRESETS, PtsSpec, axiom_of, rule_of
from .terms import (
    App,
    BOX,
    Const,
    HOLE,
    Lam,
    Let,
    Pi,
    STAR,
    Sort,
    SortT,
    TRIANGLE,
    Term,
    Var,
    alpha_eq,
    app,
    arrow,
    shift,
    spine,
    subst,
)
from .typecheck import Fuel, check, convert, infer, whnf

__all__ = [name for name in dir() if not name.startswith("_")]
