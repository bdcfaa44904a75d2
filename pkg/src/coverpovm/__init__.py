"""Finite-index coverings of knot, link, and surgery groups, and the
informationally complete POVMs their permutation representations generate.

Pipeline: parse a presentation, enumerate conjugacy classes of finite-index
subgroups (coset tables / branched coverings), compute covering homology by
Schreier rewriting plus Smith normal form, and certify Pauli-orbit POVMs
built from permutation-matrix eigenvectors.
"""

from .catalog import CatalogEntry, get, keys, surgery_quotient
from .homology import (
    AbelianInvariants,
    first_homology,
    homology_string,
    rewrite_presentation,
    schreier_generators,
    smith_normal_form,
)
from .lowindex import (
    EtaSequence,
    NodeBudgetExceeded,
    SubgroupRecord,
    classify_covering,
    conjugacy_class_size,
    cusp_count,
    eta_sequence,
    image_order,
    low_index_subgroups,
    records_to_json,
    total_subgroup_counts,
)
from .povm import (
    PauliGroupSpec,
    PauliOperator,
    PovmReport,
    StateVector,
    candidate_fiducials,
    default_factors,
    gram_analysis,
    pauli_group,
    pauli_orbit,
    permutation_matrix,
    povm_scan,
    stabilizer_test,
)
from .presentation import (
    GeneratorSymbol,
    ParseError,
    Presentation,
    Word,
    abelianized_relations,
    cyclic_reduce,
    free_reduce,
    parse_presentation,
    parse_word,
    render_presentation,
    render_word,
)
from .todd_coxeter import (
    CosetLimitExceeded,
    CosetTable,
    PermutationRep,
    UndefinedTransition,
    coset_action,
    enumerate_cosets,
    trace,
)

__version__ = "0.1.0"
