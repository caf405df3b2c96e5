"""Deciding epimorphisms from finitely presented groups onto Z^d x F and onto virtually cyclic groups."""

from .colgen import (
    CgInstance,
    brute_force_unimodular_oracle,
    decide_epi_extension_free,
    decide_unimodular_point_1d,
    gcd_shift_witness,
)
from .decision import Answer, DecisionConfig, decide_epi_product, decide_epi_virtually_cyclic
from .finite_groups import (
    FiniteGroup,
    FiniteHom,
    are_isomorphic,
    enumerate_epis,
    enumerate_finite_groups,
    enumerate_homs,
    subgroup_closure,
)
from .intlinalg import (
    AffineLattice,
    IntMatrix,
    ModulePresentation,
    affine_image,
    intersect_affine,
    max_free_quotient,
    smith_normal_form,
    solve_linear,
)
from .rewriting import kernel_generators, kernel_presentation, rewrite_in_kernel, schreier_transversal
from .vab import (
    ExtElement,
    VabData,
    WordProblemConfig,
    assemble_homlike_system,
    ext_multiply,
    restrict_to_kernel,
    vab_structure,
    verify_vab,
    word_eval_affine,
    word_problem,
)
from .words import (
    Presentation,
    Word,
    abelianization_matrix,
    concat,
    invert,
    parse_presentation,
    parse_word,
    reduce,
    symmetrize,
)

__version__ = "0.1.0"
