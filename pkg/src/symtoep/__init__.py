"""Symmetrized preconditioning for nonsymmetric (multilevel) Toeplitz systems.

Toeplitz systems ``A x = b`` become symmetric after flipping the rows,
``Y A x = Y b``, which opens them to MINRES with SPD preconditioners built
from the generating function: its real part, its modulus, circulant
approximations, or multigrid V-cycles.
"""
from .circulant import (BlockCirculant2D, CirculantOperator, block2d, optimal,
                        sampled_circulant, strang, superoptimal)
from .errors import (AssumptionError, ConfigError, InputError, SingularPreconditionerError,
                     SingularSymbolError, SizeCapError, SymtoepError)
from .krylov import SolveReport, gmres_right, lsqr, minres
from .multigrid import MultigridPreconditioner, VCycleConfig
from .problems import ProblemInstance, example1, example2, example3
from .symbols import Symbol, derive_views, epsilon_bound, fourier_coeffs
from .toeplitz import MultilevelToeplitzOperator, ToeplitzOperator, flip, symmetric_part

__version__ = "0.1.0"

__all__ = [
    "AssumptionError", "BlockCirculant2D", "CirculantOperator", "ConfigError", "InputError",
    "MultigridPreconditioner", "MultilevelToeplitzOperator", "ProblemInstance",
    "SingularPreconditionerError", "SingularSymbolError", "SizeCapError", "SolveReport",
    "Symbol", "SymtoepError", "ToeplitzOperator", "VCycleConfig", "block2d", "derive_views",
    "epsilon_bound", "example1", "example2", "example3", "flip", "fourier_coeffs",
    "gmres_right", "lsqr", "minres", "optimal", "sampled_circulant", "strang",
    "superoptimal", "symmetric_part",
]
