"""Lagrangian dynamics on matched pairs of Lie groups, with SL(2,C) = SU(2) ⋈ K worked out."""
from .matched_algebra import (MatchedElement, MatchedPairStructure, check_axioms, load_structure,
                              matched_bracket, matched_coadjoint, save_structure, transpose_map)
from .matched_dynamics import (GeneralLagrangian, GroupTermProvider, IntegratorConfig, LagrangianOnH,
                               NumericalAbort, QuadraticLagrangian, ReducedState, Trajectory, el_rhs_on_H,
                               ep_rhs, integrate, integrate_on_H, legendre_inverse, momenta, reduced_energy,
                               semidirect_ep_rhs)

__version__ = "0.1.0"
