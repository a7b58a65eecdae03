"""rwdyn: iterated term rewriting as dynamical systems.

Build terms over a signature, rewrite them with one rule at one position,
evaluate iterates through an algebra, convert to and from cartesian
dynamical systems, and reduce linear systems to recurrence relations.
"""

from .algebras import (
    Assignment,
    SigmaAlgebra,
    catamorphism,
    eval_with_assignment,
    extend_with_identity,
    term_algebra,
)
from .correspondence import (
    ProjectedSystem,
    RewritingModel,
    context_function,
    embed,
    hidden_dimension,
    hidden_step,
    initial_state,
    model_output,
    model_trace,
    project,
    substitute_into_context,
    transition_exprs,
)
from .dynamics import (
    CartesianDynamicalSystem,
    StateVector,
    Trajectory,
    from_recurrence,
    linear_system,
    mpnn_system,
    system_matrices,
    trajectory,
)
from .errors import RwdynError
from .recurrence import (
    LinearRecurrence,
    RecurrenceFit,
    RecurrenceRelation,
    delay_embedding,
    fit_linear_recurrence,
    phi_condition,
    phi_map,
    phi_matrix,
    reduce_linear,
    unroll,
    vandermonde_check,
)
from .rewriting import (
    Identity,
    LeafTuple,
    Reindexing,
    RewriteRule,
    assemble,
    flatten,
    instance_at,
    is_flat,
    iterability_witness,
    iterate,
    iterate_stream,
    lift,
    rewrite_at,
    variable_reindexing,
)
from .terms import (
    IOTA,
    Node,
    Position,
    ROOT,
    Signature,
    Substitution,
    Symbol,
    Term,
    Variable,
    apply_substitution,
    constant,
    depth,
    is_ground,
    leaf_number,
    match,
    positions,
    replace_at,
    subterm_at,
    term_size,
    variables,
)
from .vocab import (
    ADD,
    Affine,
    Carrier,
    Compose,
    FLOAT,
    FnExpr,
    Lit,
    MUL,
    NEG,
    Prim,
    Proj,
    RATIONAL,
    SUB,
    TANH,
    TERM,
    TupleOf,
    affine,
    apply_expr,
    lit,
    vector_carrier,
)

__version__ = "0.1.0"
