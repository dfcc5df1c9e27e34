"""Exact finite ontological models: properties, locality, canonical forms,
local realizability of outcome tables and preparation independence."""

from .canonical import CanonicalModel, canonicalize, operationally_equivalent
from .empirical import (EmpiricalModel, Feasible, Infeasible, from_ontological, is_no_signalling,
                        local_realizability, pr_box, quasi_local_decomposition)
from .errors import (DistributionError, InconsistentRoutes, ModelError, NotLocalError, OntolabError,
                     PreconditionError, ScenarioError, ScenarioTooLarge)
from .numeric import Distribution, Rational, SignedWeights, mixture
from .ontology import (Classification, Nature, OntologicalModel, Property, bayesian_inversion,
                       classify_property, extract_observable_properties, hs_ontic_by_supports,
                       is_deterministic, is_factorisable, is_local, is_parameter_independent,
                       operational_probabilities)
from .preparation import (PreparationTheory, SteeringVerdict, is_no_preparation_signalling,
                          is_preparation_independent, steering_incompatibility)
from .scenario import Assignment, MeasurementScenario, PreparationScenario, bell_scenario, event_sheaf
from .verdict import CheckResult

__version__ = "0.1.0"

__all__ = [
    "Assignment", "CanonicalModel", "CheckResult", "Classification", "Distribution",
    "DistributionError", "EmpiricalModel", "Feasible", "InconsistentRoutes", "Infeasible",
    "MeasurementScenario", "ModelError", "Nature", "NotLocalError", "OntolabError",
    "OntologicalModel", "PreconditionError", "PreparationScenario", "PreparationTheory",
    "Property", "Rational", "ScenarioError", "ScenarioTooLarge", "SignedWeights",
    "SteeringVerdict", "bayesian_inversion", "bell_scenario", "canonicalize",
    "classify_property", "event_sheaf", "extract_observable_properties", "from_ontological",
    "hs_ontic_by_supports", "is_deterministic", "is_factorisable", "is_local",
    "is_no_preparation_signalling", "is_no_signalling", "is_parameter_independent",
    "is_preparation_independent", "local_realizability", "mixture", "operational_probabilities",
    "operationally_equivalent", "pr_box", "quasi_local_decomposition", "steering_incompatibility",
]
