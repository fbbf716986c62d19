"""Effective radial potentials, tortoise coordinate, and barrier-top data.

Geometric units.  The metric function is alpha(r)^2 = 1 - 2m/r - (1/3)L r^2
with mass m > 0 and cosmological constant 0 <= L < 1/(9 m^2).  The wave
potential splits as W(x, h) = W0(x) + h^2 W1(x) in the tortoise
coordinate x, and the barrier top sits at r = 3m.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .series import Series1


@dataclass(frozen=True)
class BlackHoleParams:
    m: float
    lam: float = 0.0

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.lam < 0 or 9.0 * self.lam * self.m ** 2 >= 1.0:
            raise ValueError("need 0 <= lam < 1/(9 m^2)")


@dataclass(frozen=True)
class HorizonData:
    r0: float
    r_minus: float
    r_plus: float
    a0: float
    a_minus: float
    a_plus: float


@dataclass(frozen=True)
class CriticalData:
    r_crit: float
    x0: float
    E0: float
    c0: float


def alpha_squared(r, p):
    """alpha(r)^2 = 1 - 2m/r - (1/3) lam r^2 (complex-safe)."""
    if r == 0:
        raise ValueError("r = 0 outside the domain")
    return 1.0 - 2.0 * p.m / r - p.lam * r * r / 3.0


def _dalpha2_dr(r, p):
    return 2.0 * p.m / r ** 2 - 2.0 * p.lam * r / 3.0


def lambert_w0(z, tol=1e-15, max_iter=12):
    """Principal branch of the Lambert W function by Halley iteration.

    Accepts real or complex arguments away from the branch point -1/e.
    """
    z = complex(z)
    if z == 0:
        return 0.0 + 0.0j
    # seed: series near 0, log-asymptotic otherwise
    if abs(z) < 1.0:
        w = z * (1.0 - z + 1.5 * z * z)
    else:
        lz = cmath.log(z)
        w = lz - cmath.log(lz) if abs(lz) > 1.0 else lz
    for _ in range(max_iter):
        ew = cmath.exp(w)
        f = w * ew - z
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        dw = f / denom
        w = w - dw
        if abs(dw) <= tol * max(1.0, abs(w)):
            break
    return w


def horizon_roots(p):
    """Real roots of r*alpha^2(r) = 0 for lam > 0, with tortoise residues."""
    if p.lam <= 0:
        raise ValueError("horizon_roots requires lam > 0")
    # r*alpha^2 = -(lam/3) r^3 + r - 2m
    roots = np.roots([-p.lam / 3.0, 0.0, 1.0, -2.0 * p.m])
    roots = np.sort(roots.real[np.abs(roots.imag) < 1e-8 * np.max(np.abs(roots))])
    if len(roots) != 3:
        raise ValueError("ill-conditioned horizon roots (near-extremal?)")
    r0, rm, rp = roots
    if not (r0 < 0 < rm < rp):
        raise ValueError("unexpected root ordering; parameters near-extremal")
    a0, am, ap = (1.0 / _dalpha2_dr(r, p) for r in (r0, rm, rp))
    return HorizonData(r0=r0, r_minus=rm, r_plus=rp,
                       a0=a0, a_minus=am, a_plus=ap)


def tortoise(r, p, horizons=None):
    """x(r) with dx/dr = 1/alpha^2, real-valued on the exterior region."""
    if p.lam == 0:
        if not r > 2.0 * p.m:
            raise ValueError("need r > 2m")
        return r + 2.0 * p.m * math.log(r - 2.0 * p.m)
    hz = horizons or horizon_roots(p)
    if not (hz.r_minus < r < hz.r_plus):
        raise ValueError("need r_minus < r < r_plus")
    return (hz.a0 * math.log(r - hz.r0)
            + hz.a_minus * math.log(r - hz.r_minus)
            + hz.a_plus * math.log(hz.r_plus - r))


def inverse_tortoise(x, p, horizons=None):
    """r(x) on the real line; Lambert W for lam = 0, Newton for lam > 0."""
    if p.lam == 0:
        arg = cmath.exp(x / (2.0 * p.m) - 1.0) / (2.0 * p.m)
        r = 2.0 * p.m + 2.0 * p.m * lambert_w0(arg).real
        return r
    hz = horizons or horizon_roots(p)
    lo, hi = hz.r_minus, hz.r_plus
    r = 3.0 * p.m
    for _ in range(200):
        f = tortoise(r, p, hz) - x
        if abs(f) < 1e-14 * max(1.0, abs(x)):
            break
        step = -f * alpha_squared(r, p)
        rn = r + step
        if not (lo < rn < hi):
            # bisection safeguard
            if f > 0:
                hi = r
            else:
                lo = r
            rn = 0.5 * (lo + hi)
        if abs(rn - r) <= 4.0 * np.spacing(abs(r)):
            # at machine resolution next to a horizon; r is as good as it gets
            r = rn
            break
        r = rn
    else:
        raise RuntimeError("inverse_tortoise: Newton failed in [%g, %g]"
                           % (lo, hi))
    return r


def _continue_log_variable(x, p, hz, anchor, coeff, sign, eps0):
    """Solve x(r) = x near one horizon in the variable L = log |r - anchor|.

    r = anchor + sign * e^L, and x(r) = coeff * L + (smooth part).  Working
    in L avoids the catastrophic cancellation of forming r - anchor when the
    distance is exponentially small, and makes winding in Im(x) automatic.
    """
    if p.lam == 0:
        smooth0 = anchor
    elif anchor == hz.r_minus:
        smooth0 = (hz.a0 * math.log(anchor - hz.r0)
                   + hz.a_plus * math.log(hz.r_plus - anchor))
    else:
        smooth0 = (hz.a0 * math.log(anchor - hz.r0)
                   + hz.a_minus * math.log(anchor - hz.r_minus))
    # asymptotic seed if the real-line distance underflowed
    L = np.where(eps0 > 0, np.log(np.maximum(eps0, 1e-300)),
                 (x.real - smooth0) / coeff).astype(complex)
    max_im = float(np.max(np.abs(x.imag))) if x.size else 0.0
    nsteps = max(4, int(math.ceil(max_im * 2.0)))
    for j in range(1, nsteps + 1):
        xt = x.real + 1j * x.imag * (j / nsteps)
        for _ in range(40):
            eps = np.exp(L)
            r = anchor + sign * eps
            if p.lam == 0:
                smooth = r
            elif anchor == hz.r_minus:
                smooth = (hz.a0 * np.log(r - hz.r0)
                          + hz.a_plus * np.log(hz.r_plus - r))
            else:
                smooth = (hz.a0 * np.log(r - hz.r0)
                          + hz.a_minus * np.log(r - hz.r_minus))
            f = coeff * L + smooth - xt
            # dx/dL = sign*eps/alpha^2; alpha^2/eps in factored form stays
            # finite when eps underflows below the ulp of r
            if p.lam == 0:
                a2_over_eps = 1.0 / r
            elif anchor == hz.r_minus:
                a2_over_eps = (p.lam / 3.0) * (r - hz.r0) * (hz.r_plus - r) / r
            else:
                a2_over_eps = (p.lam / 3.0) * (r - hz.r0) * (r - hz.r_minus) / r
            dL = -f * a2_over_eps / sign
            L = L + dL
            if np.max(np.abs(dL)) < 1e-13:
                break
    eps = np.exp(L)
    r = anchor + sign * eps
    if p.lam == 0:
        resid = coeff * L + r - x
    elif anchor == hz.r_minus:
        resid = (coeff * L + hz.a0 * np.log(r - hz.r0)
                 + hz.a_plus * np.log(hz.r_plus - r) - x)
    else:
        resid = (coeff * L + hz.a0 * np.log(r - hz.r0)
                 + hz.a_minus * np.log(r - hz.r_minus) - x)
    return r, np.abs(resid)


def _continue_plain(x, p, hz, r0):
    """Newton continuation of r(x) away from horizons (principal logs)."""
    r = r0.astype(complex)
    max_im = float(np.max(np.abs(x.imag))) if x.size else 0.0
    nsteps = max(4, int(math.ceil(max_im * 2.0)))
    for j in range(1, nsteps + 1):
        xt = x.real + 1j * x.imag * (j / nsteps)
        for _ in range(40):
            if p.lam == 0:
                f = r + 2.0 * p.m * np.log(r - 2.0 * p.m) - xt
            else:
                f = (hz.a0 * np.log(r - hz.r0)
                     + hz.a_minus * np.log(r - hz.r_minus)
                     + hz.a_plus * np.log(hz.r_plus - r) - xt)
            a2 = 1.0 - 2.0 * p.m / r - p.lam * r * r / 3.0
            dr = -f * a2
            r = r + dr
            if np.max(np.abs(dr)) < 1e-13 * np.max(np.abs(r)):
                break
    if p.lam == 0:
        resid = np.abs(r + 2.0 * p.m * np.log(r - 2.0 * p.m) - x)
    else:
        resid = np.abs(hz.a0 * np.log(r - hz.r0)
                       + hz.a_minus * np.log(r - hz.r_minus)
                       + hz.a_plus * np.log(hz.r_plus - r) - x)
    return r, resid


def inverse_tortoise_complex(x, p, horizons=None):
    """Holomorphic continuation of r(x) off the real axis.

    Vectorized over a complex array x.  Points whose real part puts r close
    to a horizon are solved in the log-distance variable (stable down to
    exponentially small separations); the rest use plain Newton continuation.
    """
    x = np.asarray(x, dtype=complex)
    shape = x.shape
    xf = x.ravel()
    hz = None if p.lam == 0 else (horizons or horizon_roots(p))
    r_real = np.array([inverse_tortoise(xr, p, hz) for xr in xf.real])
    out = np.zeros(xf.shape, dtype=complex)
    resid = np.zeros(xf.shape)
    if p.lam == 0:
        near = r_real - 2.0 * p.m < p.m
        groups = [(near, 2.0 * p.m, 2.0 * p.m, 1.0)]
    else:
        span = hz.r_plus - hz.r_minus
        near_m = r_real - hz.r_minus < 0.25 * span
        near_p = hz.r_plus - r_real < 0.25 * span
        groups = [(near_m, hz.r_minus, hz.a_minus, 1.0),
                  (near_p, hz.r_plus, hz.a_plus, -1.0)]
    covered = np.zeros(xf.shape, dtype=bool)
    for mask, anchor, coeff, sign in groups:
        if np.any(mask):
            eps0 = sign * (r_real[mask] - anchor)
            out[mask], resid[mask] = _continue_log_variable(
                xf[mask], p, hz, anchor, coeff, sign, eps0)
        covered |= mask
    rest = ~covered
    if np.any(rest):
        out[rest], resid[rest] = _continue_plain(xf[rest], p, hz, r_real[rest])
    bad = resid > 1e-9 * np.maximum(1.0, np.abs(xf))
    if np.any(bad):
        raise RuntimeError("tortoise continuation failed at %d points"
                           % int(np.sum(bad)))
    return out.reshape(shape)


def critical_data(p):
    """Barrier-top data: r = 3m, height E0, curvature c0 = E0^2."""
    m, lam = p.m, p.lam
    r_crit = 3.0 * m
    E0 = (1.0 - 9.0 * lam * m * m) / (27.0 * m * m)
    if E0 < 1e-6 / (m * m):
        raise ValueError("degenerate barrier: E0 too small (near-extremal)")
    x0 = tortoise(r_crit, p)
    # construction-time consistency check
    val = alpha_squared(r_crit, p) / r_crit ** 2
    assert abs(val - E0) <= 1e-12 * abs(E0)
    return CriticalData(r_crit=r_crit, x0=x0, E0=E0, c0=E0 * E0)


def potential_W(x, h, p):
    """W(x, h) = W0 + h^2 W1 at real or complex tortoise coordinate x."""
    if isinstance(x, (float, int)) or (isinstance(x, complex) and x.imag == 0):
        r = inverse_tortoise(float(np.real(x)), p)
    else:
        r = complex(inverse_tortoise_complex(np.array([x]), p)[0])
    a2 = alpha_squared(r, p)
    w0 = a2 / r ** 2
    if h == 0:
        return w0
    w1 = w0 * (r * _dalpha2_dr(r, p) - 0.25)
    return w0 + h * h * w1


def potential_W_parts(x_arr, p):
    """Vectorized (W0, W1) on a complex array of tortoise coordinates."""
    r = inverse_tortoise_complex(np.asarray(x_arr, dtype=complex), p)
    a2 = 1.0 - 2.0 * p.m / r - p.lam * r * r / 3.0
    w0 = a2 / r ** 2
    w1 = w0 * (r * (2.0 * p.m / r ** 2 - 2.0 * p.lam * r / 3.0) - 0.25)
    return w0, w1


def _alpha2_series(p, N):
    """Series of alpha^2(3m + rho) in rho."""
    m, lam = p.m, p.lam
    # 1/(3m + rho) = (1/3m) sum (-rho/3m)^k
    inv_r = Series1([(1.0 / (3.0 * m)) * (-1.0 / (3.0 * m)) ** k
                     for k in range(N + 1)])
    rho = Series1.identity(N)
    r = 3.0 * m + rho
    return 1.0 - 2.0 * m * inv_r - (lam / 3.0) * (r * r), inv_r


def shifted_potential_taylor(p, N):
    """Taylor series of V(x) = W0(x0 + x) - E0 at the barrier top.

    V(0) = V'(0) = 0 and V''(0)/2 = -c0.
    """
    if N > 32:
        raise ValueError("degree capped at 32")
    Np = N + 4  # working margin
    a2, inv_r = _alpha2_series(p, Np)
    # x(3m+rho) - x0 = integral of 1/alpha^2 d rho
    xt = a2.reciprocal().integ().truncate(Np)
    rho_of_x = xt.reversion()
    u = (a2 * inv_r * inv_r).compose(rho_of_x)
    cd = critical_data(p)
    coeffs = list(u.coeffs)
    coeffs[0] -= cd.E0
    # enforce the exact critical-point structure
    if abs(coeffs[0]) > 1e-10 * cd.E0 or abs(coeffs[1]) > 1e-10 * cd.E0:
        raise RuntimeError("potential Taylor inconsistent at critical point")
    coeffs[0] = 0.0
    coeffs[1] = 0.0
    return Series1(coeffs, Np).truncate(N)


def subprincipal_taylor(p, N):
    """Taylor series of W1(x0 + x) at the barrier top."""
    Np = N + 4
    a2, inv_r = _alpha2_series(p, Np)
    xt = a2.reciprocal().integ().truncate(Np)
    rho_of_x = xt.reversion()
    m, lam = p.m, p.lam
    rho = Series1.identity(Np)
    r = 3.0 * m + rho
    da2 = 2.0 * m * (inv_r * inv_r) - (2.0 * lam / 3.0) * r
    w1 = (a2 * inv_r * inv_r) * (r * da2 - 0.25)
    return w1.compose(rho_of_x).truncate(N)
