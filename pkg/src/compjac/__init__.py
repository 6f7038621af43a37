"""Exact graded-ring computations for the singularity x^q = y^p: the
Artinian ring O_{q/p}, the bigraded family R over Q[eps, s], semigroup
module fixed points and checkers for the associated conjectures."""

__version__ = "0.1.0"
