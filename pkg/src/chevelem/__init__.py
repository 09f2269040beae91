"""Elementary subgroups of Chevalley groups over finite rings: root systems,
finite rings and their localizations, 2-step nilpotent modules, Chevalley
bases, and exact verification of the elementary-subgroup lemmas by closure."""

from .chevalley import (ChevalleyData, CommutatorTable, GroupElement, build_chevalley,
                        check_homogeneity, commutator, derive_commutator_table, root_element,
                        torus_element, weyl_element)
from .engine import (GeneratorFamily, GroupSet, RelativePair, closure, elementary_group,
                     relative_elementary, word_width)
from .errors import (AxiomError, CapExceeded, ChevelemError, CoverError, DescriptorError,
                     DomainError, MorphismError)
from .lemmas import (LEMMA_IDS, Caps, LemmaReport, Workspace, run_lemma,
                     verify_decomposition, verify_generation_lemmas, verify_normalization,
                     verify_perfectness, verify_relative_characterizations)
from .nilmodule import NilModule, QuadraticMap, check_quadratic, make_nil_module, verify_derived_identities
from .rings import (FiniteRing, HomotopeRing, SemidirectRing, Subalgebra, check_cover_sum,
                    check_power_idempotent, colocalization_tower, idempotent_power, make_ring,
                    semidirect)
from .rootsystem import (RootSystem, apply_morphism, build_root_system, classify_subset,
                         neighbors, thick_series, verify_hyperplane_lemma)

__version__ = "0.1.0"
