"""Complex-scaled symbol and a direct spectral solver for mode frequencies.

The operator is restricted to the deformed contour through the barrier
top, x0 + (1+i theta) t, and discretized in a Galerkin basis of scaled
Hermite functions.  Eigenvalues z near the barrier height E0 yield mode
frequencies lambda = h^{-1} sqrt(z).
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from .catalog import QnmEntry
from .potentials import critical_data, potential_W_parts


@dataclass(frozen=True)
class ScalingConfig:
    theta: float = 0.3
    h: float = 0.5
    basis_size: int = 128
    basis_scale: float = 0.0   # 0 -> automatic c0^{-1/4} sqrt(h)
    window: float = 2.0        # |z - E0| <= window * E0
    quad_factor: int = 2       # quadrature nodes = quad_factor * basis_size
    stab_rel: float = 1e-6     # self-convergence filter on window eigenvalues

    def __post_init__(self):
        if not (0.0 <= self.theta <= 0.4):
            raise ValueError("need 0 <= theta <= 0.4")
        if self.basis_size < 1:
            raise ValueError("basis_size must be positive")
        if self.h <= 0:
            raise ValueError("h must be positive")


@dataclass
class DenseComplexMatrix:
    dim: int
    entries: np.ndarray
    complex_symmetric: bool = False
    metadata: dict = field(default_factory=dict)


def hermite_function_values(nmax, u):
    """Values of the Hermite functions h_0..h_nmax at the points u.

    h_n are the L^2-normalized eigenfunctions of -d^2/du^2 + u^2.  Uses a
    log-rescaled three-term recurrence so that large |u| does not under-
    or overflow.
    """
    u = np.asarray(u, dtype=float)
    npts = u.size
    out = np.zeros((nmax + 1, npts))
    logscale = -0.5 * u * u
    vprev = np.zeros(npts)
    vcur = np.full(npts, math.pi ** -0.25)
    out[0] = vcur * np.exp(logscale)
    for n in range(nmax):
        vnext = (math.sqrt(2.0 / (n + 1)) * u * vcur
                 - math.sqrt(n / (n + 1.0)) * vprev)
        vprev, vcur = vcur, vnext
        big = np.abs(vcur) > 1e100
        if np.any(big):
            vcur[big] *= 1e-200
            vprev[big] *= 1e-200
            logscale[big] += 200.0 * math.log(10.0)
        out[n + 1] = vcur * np.exp(logscale)
    return out


def hermite_quadrature(npts):
    """Nodes u_j and Hermite-function weights what_j with
    int f(u) du ~ sum_j what_j f(u_j) for f = (poly deg < 2*npts) * e^{-u^2}.
    """
    u, _ = scipy.special.roots_hermite(npts)
    hlast = hermite_function_values(npts - 1, u)[npts - 1]
    hsq = npts * hlast ** 2
    # where h_{npts-1} underflows, every basis function of lower index is
    # an exact double-precision zero too, so the node contributes nothing
    what = np.where(hsq > 0, 1.0 / np.where(hsq > 0, hsq, 1.0), 0.0)
    return u, what


def _d2_matrix(n):
    """Matrix of d^2/du^2 in the Hermite-function basis (pentadiagonal)."""
    k = np.arange(n)
    m = np.diag(-(2.0 * k + 1.0)).astype(float)
    m += _u2_matrix(n)
    return m


def _u2_matrix(n):
    """Matrix of multiplication by u^2 in the Hermite-function basis."""
    k = np.arange(n)
    m = np.diag(k + 0.5)
    off = 0.5 * np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0))
    m += np.diag(off, 2) + np.diag(off, -2)
    return m


def scaled_symbol(x, xi, cfg, p):
    """p_theta(x, xi) = ((1+i theta)^{-1} xi)^2 + V(x + i theta x).

    x is measured from the barrier top (shifted coordinate); V is the
    holomorphically continued shifted potential.
    """
    cd = critical_data(p)
    th = cfg.theta
    xc = cd.x0 + x * (1.0 + 1j * th)
    w0, _ = potential_W_parts(np.array([xc]), p)
    v = complex(w0[0]) - cd.E0
    return ((1.0 + 1j * th) ** -1 * xi) ** 2 + v


def ellipticity_scan(cfg, p, eps, x_grid, xi_grid):
    """min of |p_theta|/(1+xi^2) outside the eps-ball around (0,0)."""
    cd = critical_data(p)
    th = cfg.theta
    xg = np.asarray(x_grid, float)
    xc = cd.x0 + xg * (1.0 + 1j * th)
    w0, _ = potential_W_parts(xc, p)
    v = w0 - cd.E0
    best = None
    argmin = None
    for xi in np.asarray(xi_grid, float):
        pvals = ((1.0 + 1j * th) ** -1 * xi) ** 2 + v
        ratio = np.abs(pvals) / (1.0 + xi ** 2)
        mask = xg ** 2 + xi ** 2 > eps ** 2
        if not np.any(mask):
            continue
        i = int(np.argmin(np.where(mask, ratio, np.inf)))
        if best is None or ratio[i] < best:
            best = float(ratio[i])
            argmin = (float(xg[i]), float(xi))
    if best is None:
        return {"min_ratio": None, "argmin": None, "empty_domain": True}
    return {"min_ratio": best, "argmin": argmin, "empty_domain": False}


def build_scaled_operator(cfg, p=None, potential=None, include_w1=True):
    """Galerkin matrix of the complex-scaled operator.

    Basis: Hermite functions of t/sigma centered at the barrier top, on the
    contour x = x0 + (1+i theta) t.  `potential` overrides the black-hole
    potential with a callable t -> complex values on the *unscaled* real
    grid t (test hook; theta is then applied to t only if the caller bakes
    it in).
    """
    n = cfg.basis_size
    h = cfg.h
    th = cfg.theta
    if cfg.basis_scale > 0:
        sigma = cfg.basis_scale
    else:
        if p is None:
            raise ValueError("need params or explicit basis_scale")
        cd = critical_data(p)
        sigma = cd.c0 ** -0.25 * math.sqrt(h)
    npts = max(cfg.quad_factor * n, n + 8)
    u, what = hermite_quadrature(npts)
    t = sigma * u
    if potential is not None:
        wvals = np.asarray(potential(t), dtype=complex)
    else:
        cd = critical_data(p)
        xc = cd.x0 + (1.0 + 1j * th) * t
        w0, w1 = potential_W_parts(xc, p)
        wvals = w0 + (h * h * w1 if include_w1 else 0.0)
    hv = hermite_function_values(n - 1, u)
    pot = (hv * (what * wvals)) @ hv.T
    kin = -(h / sigma) ** 2 * _d2_matrix(n)
    if potential is None:
        kin = kin * (1.0 + 1j * th) ** -2
    mat = kin.astype(complex) + pot
    meta = {"sigma": sigma, "theta": th, "h": h, "quad_points": npts,
            "contour": "barrier-top" if potential is None else "custom"}
    return DenseComplexMatrix(dim=n, entries=mat, complex_symmetric=True,
                              metadata=meta)


def eigensolve(mat, with_residuals=False):
    """All eigenvalues of a dense complex matrix, deterministically sorted."""
    m = mat.entries if isinstance(mat, DenseComplexMatrix) else np.asarray(mat)
    if m.shape[0] > 2000:
        raise ValueError("matrix too large")
    if with_residuals:
        vals, vecs = scipy.linalg.eig(m)
        res = []
        for k in range(len(vals)):
            v = vecs[:, k]
            res.append(float(np.linalg.norm(m @ v - vals[k] * v)
                             / np.linalg.norm(v)))
        order = np.lexsort((vals.imag, vals.real))
        return vals[order], np.asarray(res)[order]
    vals = scipy.linalg.eigvals(m)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def qnm_direct(ell, cfg, p, max_modes=None):
    """Mode frequencies near the barrier top from the direct eigensolver.

    Eigenvalues z of the scaled operator with |z - E0| < window*E0 are
    mapped to lambda = h^{-1} sqrt(z) (branch Re > 0); entries are ordered
    by increasing damping (n = 0 least damped).
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    h = 1.0 / (ell + 0.5)
    if abs(h - cfg.h) > 1e-12 * h:
        cfg = ScalingConfig(theta=cfg.theta, h=h, basis_size=cfg.basis_size,
                            basis_scale=cfg.basis_scale, window=cfg.window,
                            quad_factor=cfg.quad_factor, stab_rel=cfg.stab_rel)
    cd = critical_data(p)
    vals = eigensolve(build_scaled_operator(cfg, p))
    cfg2 = ScalingConfig(theta=cfg.theta, h=h, basis_size=cfg.basis_size + 40,
                         basis_scale=cfg.basis_scale, window=cfg.window,
                         quad_factor=cfg.quad_factor, stab_rel=cfg.stab_rel)
    vals2 = eigensolve(build_scaled_operator(cfg2, p))
    win = np.abs(vals - cd.E0) <= cfg.window * cd.E0
    # the discretized, scaling-rotated continuum clusters near z = 0;
    # barrier-top modes stay at |z| comparable to the barrier height
    win &= np.abs(vals) >= 0.6 * cd.E0
    zs = vals[win]
    # self-convergence filter: keep eigenvalues stable under basis enlargement
    if zs.size:
        drift = np.array([np.min(np.abs(vals2 - z)) for z in zs])
        zs = zs[drift <= cfg.stab_rel * np.maximum(np.abs(zs), 1e-3 * cd.E0)]
    if zs.size == 0:
        raise RuntimeError("no eigenvalues in the spectral window")
    lams = np.sqrt(zs) / h
    lams = np.where(lams.real < 0, -lams, lams)
    keep = np.angle(lams) > -2.0 * cfg.theta
    lams = lams[keep]
    order = np.argsort(-lams.imag)
    lams = lams[order]
    if max_modes is not None:
        lams = lams[:max_modes]
    return [QnmEntry(ell=ell, n=i, lam=complex(l), multiplicity=2 * ell + 1)
            for i, l in enumerate(lams)]
