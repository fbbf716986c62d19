"""Rotated harmonic oscillator: exact spectrum vs Galerkin numerics.

The operator -h^2 d^2/dx^2 + i x^2 has exact eigenvalues
e^{i pi/4} h (2n+1), but its strong non-normality makes numerically
computed eigenvalues unreliable deep in the complex plane.  This module
quantifies where the computed spectrum detaches from the true one.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .scaling import DenseComplexMatrix, _u2_matrix, eigensolve


@dataclass(frozen=True)
class RotatedHOConfig:
    h: float = 0.05
    basis_size: int = 151

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("h must be positive")
        if self.basis_size < 8:
            raise ValueError("basis_size must be >= 8")


def exact_rotated_ho_eigs(cfg, count):
    """Exact eigenvalues e^{i pi/4} h (2n+1), n = 0..count-1."""
    if count > cfg.basis_size:
        raise ValueError("count exceeds basis size")
    rot = cmath.exp(1j * math.pi / 4.0)
    return [rot * cfg.h * (2 * n + 1) for n in range(count)]


def hermite_galerkin_matrix(cfg):
    """Matrix of -h^2 d^2 + i x^2 in the h-scaled Hermite eigenbasis.

    The basis diagonalizes -h^2 d^2 + x^2 with eigenvalues (2n+1)h, and
    x^2 is pentadiagonal (h times the u^2 ladder matrix), so the operator
    is diag((2n+1)h) + (i-1)*[x^2].
    """
    n = cfg.basis_size
    h = cfg.h
    k = np.arange(n)
    mat = np.diag((2.0 * k + 1.0) * h).astype(complex)
    mat += (1j - 1.0) * h * _u2_matrix(n)
    return DenseComplexMatrix(dim=n, entries=mat, complex_symmetric=True,
                              metadata={"h": h, "operator": "rotated-ho"})


def instability_report(cfg):
    """Greedy match of computed vs exact eigenvalues, with the first index
    where the distance exceeds 10% of |lam_exact|.

    Returns {"rows": [...], "divergence_index": n* or None}.  Matching is
    nearest-neighbor in order of increasing |lam_exact| (a heuristic; the
    threshold index is robust to the matching choice).
    """
    mat = hermite_galerkin_matrix(cfg)
    computed = np.array(eigensolve(mat))
    exact = exact_rotated_ho_eigs(cfg, cfg.basis_size)
    avail = np.ones(len(computed), dtype=bool)
    rows = []
    nstar = None
    for n, ex in enumerate(exact):
        d = np.where(avail, np.abs(computed - ex), np.inf)
        j = int(np.argmin(d))
        avail[j] = False
        dist = float(d[j])
        rows.append({"n": n, "exact": ex, "computed": complex(computed[j]),
                     "distance": dist})
        if nstar is None and dist > 0.1 * abs(ex):
            nstar = n
    return {"rows": rows, "divergence_index": nstar}
