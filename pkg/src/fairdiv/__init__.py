"""Fair division of indivisible items at desk scale, certified against
brute-force oracles: exact fairness checkers, EF1 allocation algorithms,
MMS search for mixed manna, EFX0/EF1 orientation deciders for graphical
instances, and NP-hardness gadget generators."""

from .core import (Allocation, Edge, Instance, Multigraph, Orientation,
                   agent_class, bundle_utility, graphical_to_instance,
                   validate_instance)
from .checks import (FairnessReport, MmsProfile, Witness, check, check_mms,
                     check_pef, check_po, mms_profile, mms_threshold)
from .allocators import (double_ece, double_round_robin,
                         envy_cycle_elimination, round_robin, top_trading_ece)
from .mms import (MmsResult, ReductionStep, SopInstance, find_valid_reduction,
                  lift_from_sop, mimic_instance, mms_partition_for_agent,
                  solve_mms, solve_three_agent, to_sop)
from .efx_multigraph import (BiValuedGraph, HeavyComponent, classify_components,
                             efx_orient_bivalued, finalize_matching,
                             orient_all_but_matching, orient_trivial_case,
                             orient_type1, orient_type2, two_agent_efx_split)
from .chores import (ObjectiveChoresGraph, PdCoverInstance, TwoSatFormula,
                     ef1_orient_graph, efx_orient_chores, efx_orient_objective,
                     find_pd_vertex_cover, solve_2sat, subdivide_subjective)
from .gadgets import (Circuit, Gate, build_circuit_gadget,
                      build_partition_selfloop_gadget,
                      build_partition_triangle_gadget, circuit_satisfiable,
                      parse_circuit)
from .dot import export_dot

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
