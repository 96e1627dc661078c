from ._core import (
    ConfigError,
    EvalError,
    ParseError,
    Quaternion,
    analyze,
    analyze_file,
    builtin_names,
    eigenvalues,
    evaluate,
    is_normal,
    op_norm,
    qexp,
    run_example,
    second_order,
)

__all__ = [
    "ConfigError",
    "EvalError",
    "ParseError",
    "Quaternion",
    "analyze",
    "analyze_file",
    "builtin_names",
    "eigenvalues",
    "evaluate",
    "is_normal",
    "op_norm",
    "qexp",
    "run_example",
    "second_order",
]
