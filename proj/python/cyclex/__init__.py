"""Probabilities that are infinite sums: PCFG/PLCG prefix probabilities,
plan posteriors and Markov-chain reachability, computed on cyclic
explanation graphs."""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
    from ._core import __doc__ as _doc
except ImportError:  # in-tree builds put _core next to the package on sys.path
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _doc

__all__ = [
    "Grammar",
    "PlcgModel",
    "MarkovChain",
    "PlanModel",
    "QueryResult",
    "parse_pcfg",
    "parse_cfg",
    "make_plcg",
    "parse_markov_chain",
    "parse_plan_model",
    "prefix_probability",
    "sentence_probability",
    "plcg_prefix_probability",
    "conditional_next",
    "recognize_plan",
    "reach_probability",
    "prefix_graph_dump",
    "plcg_equations_dump",
    "oracle_prefix_pcfg",
    "oracle_plcg_prefix",
    "oracle_reach",
]
