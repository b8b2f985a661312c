"""Finite groupoid quantales: build them from groupoids with selection bases,
reconstruct groupoids from them, and check the axioms along the way."""

from .bits import Verdict
from .errors import *  # noqa: F401,F403
from .fixtures import Fixture, all_fixtures, load_fixture
from .gq import (
    GroupoidQuantale,
    SelectionBase,
    build_gq,
    canonical_base_from_action,
    check_recovery,
    check_selection_base,
    is_topological_base,
    validate_selection_base,
)
from .groupoid import (
    FiniteGroupoid,
    GroupAction,
    action_groupoid,
    enumerate_bisection_images,
    from_equivalence_relation,
    is_bisection_image,
    orbit_relation_groupoid,
    validate_action,
    validate_groupoid,
)
from .incidence import (
    alpha,
    check_alpha_theorem,
    check_etale_lemma,
    check_spatial,
    class_obstruction,
    incidence_classes,
    incident,
    primes_of_Qe,
    reconstruct_groupoid,
    roundtrip,
    transport,
)
from .iso import groupoid_isomorphic, quantale_isomorphic
from .quantale import (
    FiniteQuantale,
    SubsetQuantale,
    check_inverse_monoid,
    check_inverse_quantal_frame,
    check_Qe_frame,
    check_SG,
    check_SGF,
    conjugate,
    from_subset_family,
    partial_units,
    validate_quantale,
)
from .topology import (
    FiniteSpace,
    closure,
    is_sober,
    is_T1,
    is_union_of_locally_closed,
    prime_opens,
    validate_space,
)

__version__ = "0.1.0"
