"""stringdyn: string numbers, witness families and algebraic entropy, exactly.

Decides the string number, non-singular string number and null string number
of endomorphisms of finitely generated abelian groups, of multiplication maps
on the computable divisible backends (Q, Pruefer groups, Q/Z) and of symbolic
group expressions; constructs certified witness families; and verifies the
generalized-shift entropy law at desk scale with exact integer arithmetic.
"""

__version__ = "0.1.0"

from .backends import (
    ModOneElement,
    MulEndo,
    PruferElement,
    RationalElement,
    backend_arithmetic,
    concrete_string_numbers,
    concrete_witnesses,
    mul_preimage,
)
from .catalog import (
    GroupExpr,
    bernoulli_verdicts,
    eval_predicates,
    mu_p_verdicts,
    parse_group_expr,
    table1,
    table2,
)
from .dynamics import (
    Classification,
    DynamicalProfile,
    classify_periodicity,
    hyperkernel,
    kernel,
    periodic_subgroup,
    profile,
    quasiperiodic_subgroup,
    surjective_core,
)
from .entropy import (
    GrowthCurve,
    cotrajectory_growth,
    entropy_estimate,
    shift_formula_check,
    trajectory_growth,
)
from .groups import (
    Endomorphism,
    FgGroup,
    GroupElement,
    QuotientPresentation,
    Subgroup,
    SubgroupPresentation,
    smith_decompose,
    solve_preimage,
    subgroup_canonicalize,
    subgroup_combine,
    subgroup_transport,
)
from .selfmaps import (
    FunctionalGraph,
    WindowedMap,
    analyze_finite,
    infinite_orbit_bound,
    materialize_graph,
    materialize_windowed,
    windowed_string_bound,
)
from .strings import (
    StringPrefix,
    Verdict,
    WitnessFamily,
    build_pseudostring,
    fan_family,
    garland_family,
    null_from_singular,
    recheck_family,
    string_verdicts,
    witness_family,
)

__all__ = [name for name in dir() if not name.startswith("_")]
