"""Algebras of boolean constraint systems: contexts, games, representations and tracial obstructions."""
from .model import (
    FALSE,
    TRUE,
    Bcs,
    Constraint,
    Context,
    DomainError,
    Relation,
    ResourceError,
    brute_force_sat,
    default_contexts,
    gen_graph_hom,
    gen_linear,
    gen_magic_square,
    gen_nontracial,
    is_satisfying,
)
from .zalgebra import AlgebraElement, constraint_poly, projection_of_assignment
from .present import FORMS, Presentation, build_algebra, solution_group, vanishing_set
from .reps import MatrixRep, joint_spectrum, pauli_search, transport_rep, verify_rep
from .games import (
    Strategy,
    build_game,
    from_synchronous,
    graph_hom_game,
    pad,
    strategy_value,
    to_synchronous,
)
from .lang import classify_bcs, classify_relation, solve_schaefer
from .reduce import LANG_3SAT, apply_gadgets, language_gadgets, pp_define_search, verify_hom_pair
from .trace import trace_feasibility

__version__ = "0.1.0"
