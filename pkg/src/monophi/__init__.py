"""Integrated-information analysis for classical and quantum process models."""

from .core import (CLASSICAL, QUANTUM, Process, Scalar, Space, State, apply,
                   classical_space, compose, dagger, discard, distance, identity,
                   is_causal, is_cocausal, mass, mixed, mixed_process, point_state,
                   quantum_space, restrict_state, subspace, swap, tensor,
                   tensor_space, tensor_states, unit_space, zero_process, zero_state)
from .decompositions import (Decomposition, DecompositionSet, complement,
                             element_decompositions, equivalent, precedes,
                             restrict, split)
from .engine import (Concept, Cut, EngineConfig, Experience, FamilyIntegration,
                     PhiResult, QShape, SystemPhiResult, concept, enumerate_cuts,
                     family_integration, major_complex, qshape, qshape_distance,
                     repertoire_phi, restriction_family, system_phi)
from .errors import (CompositionError, MonophiError, ResourceLimitError,
                     UnsupportedOperationError, ValidationError)
from .repertoires import (CAUSE, EFFECT, GENERIC, IIT3, RepertoireEvaluator,
                          RepertoireValue, cause_repertoire, decomposed_repertoire,
                          effect_repertoire, extended_repertoire, is_weakly_causal)
from .systems import (System, directional_cut, element_channel,
                      is_conditionally_independent, subsystem, symmetric_cut)

__version__ = "0.1.0"
