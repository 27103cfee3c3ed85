"""Scheduling autonomous trucks between transfer hubs.

Lower bounds from a min-cost-flow relaxation and from column generation,
feasible plans from flow repair, restricted-master branch and bound, and a
greedy baseline, plus an exhaustive oracle for tiny instances.
"""

from .colgen import cg_bound_report, cg_loop, dedupe_tasks, initial_columns, price, restricted_master_ip
from .errors import (
    HubflowError,
    InfeasibleError,
    ParseError,
    RepairFailure,
    SizeGuardError,
    SolveFailure,
    StructuralError,
    ValidationError,
)
from .generator import PRESETS, GeneratorParams, generate_instance
from .graph import TaskGraph, build_graph, is_acyclic
from .io import load_instance, load_plan, save_instance, save_plan
from .model import MILE, Instance, Leg, Location, Order, Task, TravelMatrix
from .nf import delta_ladder_ub, extract_routes, nf_bound_report, repair_schedule, solve_nf_lb
from .oracle import brute_force_optimal, greedy_baseline
from .plan import Check, Plan, Route, verify_plan
from .report import BoundReport, gap, gap_percent

__version__ = "0.1.0"
