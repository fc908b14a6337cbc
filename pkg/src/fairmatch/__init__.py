"""Maximum matching under per-class quotas, and its hypergraph independent-set form."""

from .approx import (GmisInstance, avg_degree_gmis, edge_item_reduction, greedy_cmm, greedy_gmis,
                     sequential_compose)
from .exact import brute_force, flow_laminar, half_approx_multi, type_ip
from .laminar import NotLaminar, is_laminar, partition_classes
from .model import (Assignment, ClassConstraint, Instance, NotApplicable, ValidationError,
                    assignment_value, can_extend, is_feasible, validate_instance)
from .online import competitive_trials, online_greedy

__version__ = "0.1.0"

__all__ = [
    "Assignment", "ClassConstraint", "GmisInstance", "Instance", "NotApplicable", "NotLaminar",
    "ValidationError", "assignment_value", "avg_degree_gmis", "brute_force", "can_extend",
    "competitive_trials", "edge_item_reduction", "flow_laminar", "greedy_cmm", "greedy_gmis",
    "half_approx_multi", "is_feasible", "is_laminar", "online_greedy", "partition_classes",
    "sequential_compose", "type_ip", "validate_instance",
]
