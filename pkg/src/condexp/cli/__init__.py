"""Command-line front end over findim-backed oracles."""

from .main import EXIT_BUDGET, EXIT_INVALID, EXIT_OK, EXIT_PARSE, main
from .problem import Problem, ProblemError, load_problem, parse_problem

__all__ = ["EXIT_BUDGET", "EXIT_INVALID", "EXIT_OK", "EXIT_PARSE", "main", "Problem", "ProblemError", "load_problem", "parse_problem"]
