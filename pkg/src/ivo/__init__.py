"""Interval-valued optimization and variational inequalities on Hadamard manifolds."""
from .config import DEFAULT, Tolerances
from .interval import ZERO, Interval, Order
from .manifolds import SPD, Euclidean, Hyperbolic, ManifoldError, PositiveReals, make_manifold
from .report import FAIL, INCONCLUSIVE, PASS, Certificate, CheckReport
from .rivf import RIVF, DomainError, NonConvergence, dir_deriv

__version__ = "0.1.0"
