"""Distributed gradient descent over agent networks with adversarial agents
that perturb the iterates they broadcast."""
from .analysis import (bound_curve, bound_curve_geometric, bound_domination_report,
                       contraction_factor, error_series, initial_condition_ok, step_size_check)
from .attack import AttackSpec, epsilon_for, malicious_target
from .engine import BACKEND, InitSpec, SimulationConfig, init_state, run, step
from .objectives import ObjectiveSpec, eval_local, global_constants, grad_local, paper_quadratic
from .topology import (Graph, WeightMatrix, complete_graph, metropolis_weights,
                       random_connected_graph, second_eigenvalue_magnitude)

__version__ = "0.1.0"
