"""Birkhoff normal form of a symbol at a nondegenerate critical point.

Classical part: reduce p(x, xi) = q + O(3) to a function g of the model
quadratic z*zeta by degree-graded polynomial generators.  Quantum part:
graded Weyl (Moyal) calculus, quantum averaging to a diagonal symbol
G(z*zeta; h), and conversion to the spectral variable s = z h D_z + h/2i,
whose eigenvalue on z^n is -i(n+1/2)h.  The assembled output G(x; h)
gives the mode lattice lambda_{l,n} = h^{-1} G(2 pi (n+1/2) h; h).
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .series import (GaussianRational, HGraded, Series1, Series2, hcompose,
                     poisson)
from .potentials import critical_data, shifted_potential_taylor, \
    subprincipal_taylor

TWO_PI = 2.0 * math.pi
# Argument calibration of the spectral variable against the lattice
# convention x = 2 pi (n + 1/2) h: the model eigenvalue -i(n+1/2)h equals
# SPECTRAL_ARG * x.  Fixed once against the known linear coefficient of
# the leading symbol; never re-fit.
SPECTRAL_ARG = -1j / TWO_PI


@dataclass(frozen=True)
class QuadraticReduction:
    mu: complex
    linmap: tuple          # ((a, b), (c, d)): x = a z + b zeta, xi = c z + d zeta
    admissible: bool       # range condition of the input on the real plane

    @property
    def det(self):
        (a, b), (c, d) = self.linmap
        return a * d - b * c


@dataclass(frozen=True)
class NormalFormResult:
    mu: complex
    linmap: tuple
    generators: tuple      # degree-graded Series2 generators (classical)
    g: Series1             # Vey-normalized: g(t) = t + O(t^2)
    f: Series1             # Jacobian factor, f(0) = 1
    S: Series1             # action, mu S'(w) = 2 pi f(w), S(0) = 0
    g_eig: Series1         # eigenvalue curve g_eig(w) = g(mu w)


def _range_admissible(q, samples=256):
    """Check that q omits a complex value and is nonvanishing on R^2\\{0}."""
    vals = []
    for k in range(samples):
        t = TWO_PI * k / samples
        vals.append(complex(q(math.cos(t), math.sin(t))))
    if min(abs(v) for v in vals) < 1e-12:
        return False
    args = np.unwrap([cmath.phase(v) for v in vals] +
                     [cmath.phase(vals[0])])
    # range covers all of C iff arg winds a full turn
    return abs(args[-1] - args[0]) < TWO_PI - 1e-6


def quad_reduce(q, strict=False):
    """Symplectic linear reduction of a quadratic form to mu * z * zeta.

    The sign of mu is fixed by the admissibility rule Re(-i mu) > 0
    (decaying model lattice), with Re mu > 0 as tie-break.
    """
    A = complex(q[(2, 0)])
    B = complex(q[(1, 1)])
    C = complex(q[(0, 2)])
    admissible = _range_admissible(q)
    if strict and not admissible:
        raise ValueError("quadratic form degenerate on the real plane")
    if A == 0 and C == 0:
        if B == 0:
            raise ValueError("zero quadratic form")
        return QuadraticReduction(mu=B, linmap=((1, 0), (0, 1)),
                                  admissible=admissible)
    disc = B * B - 4.0 * A * C
    if abs(disc) < 1e-14 * max(abs(A), abs(B), abs(C)) ** 2:
        raise ValueError("degenerate quadratic form (vanishing discriminant)")
    mu = cmath.sqrt(disc)
    # branch of mu: decaying model lattice Re(-i mu) > 0, tie-break Re mu > 0
    if abs((-1j * mu).real) > 1e-12 * abs(mu):
        if (-1j * mu).real < 0:
            mu = -mu
    elif mu.real < 0:
        mu = -mu
    if C == 0:
        # symplectic rotation to make the xi^2 coefficient nonzero
        ct, st = math.cos(0.7), math.sin(0.7)
        qr = q.subs_linear(ct, -st, st, ct)
        inner = quad_reduce(qr)
        (a, b), (c, d) = inner.linmap
        lin = ((ct * a - st * c, ct * b - st * d),
               (st * a + ct * c, st * b + ct * d))
        return QuadraticReduction(mu=inner.mu, linmap=lin,
                                  admissible=admissible)
    # q = C (xi - ap x)(xi - am x); ap - am = mu/C so C*(ap - am) = mu
    ap = (-B + mu) / (2.0 * C)
    am = (-B - mu) / (2.0 * C)
    delta = ap - am
    s = cmath.sqrt(delta)
    t = delta / s
    # x = (t z - s zeta)/delta, xi = (ap t z - am s zeta)/delta; det = st/delta = 1
    lin = ((t / delta, -s / delta), (ap * t / delta, -am * s / delta))
    return QuadraticReduction(mu=mu, linmap=lin, admissible=admissible)


def homological_solve(r, strip_diagonal=True):
    """Solve i(z d_z - zeta d_zeta) a = -r + <r> termwise.

    Returns (a, r_avg): a_{mn} = i r_{mn}/(m-n) off the diagonal, and the
    diagonal average <r> as a Series1 in w = z zeta.
    """
    a = {}
    for (m, n), c in r.coeffs.items():
        if m != n:
            if isinstance(c, GaussianRational):
                a[(m, n)] = c * GaussianRational.i() / Fraction(m - n)
            else:
                a[(m, n)] = 1j * c / (m - n)
    a = Series2(a, r.trunc_order)
    return a, r.diagonal()


def average_by_flow_quadrature(r, nodes=64):
    """<r> via (1/2pi) integral of r(e^{it} z, e^{-it} zeta) dt, trapezoid.

    Returns a Series2 (diagonal).  Independent oracle for homological_solve.
    """
    n = r.trunc_order
    acc = {}
    for j in range(nodes):
        t = TWO_PI * j / nodes
        ph = cmath.exp(1j * t)
        for (m, k), c in r.coeffs.items():
            w = complex(c) * ph ** (m - k)
            acc[(m, k)] = acc.get((m, k), 0.0) + w
    return Series2({k: v / nodes for k, v in acc.items()}, n)


def _poisson_exact(a, b, degree):
    """{a, b} for polynomials, re-truncated only at `degree`."""
    ap = Series2(a.coeffs, degree + 1)
    bp = Series2(b.coeffs, degree + 1)
    return poisson(ap, bp).truncate(degree)


def _flow_apply(p, a, degree):
    """exp({a, .}) p truncated at total degree `degree`."""
    out = p.truncate(degree)
    term = out
    fact = 1.0
    for k in range(1, degree + 3):
        term = _poisson_exact(a, term, degree)
        if not term.coeffs:
            break
        fact *= k
        out = out + (1.0 / fact) * term
    return out


def classical_bnf(p_taylor, degree):
    """Classical Birkhoff normal form through total degree `degree`."""
    N = degree
    p = p_taylor.truncate(N)
    if not all(abs(complex(p[(m, n)])) < 1e-14
               for m in range(2) for n in range(2 - m)):
        raise ValueError("constant/linear part of the symbol must vanish")
    red = quad_reduce(p.homogeneous_part(2))
    (a, b), (c, d) = red.linmap
    mu = red.mu
    p = p.subs_linear(a, b, c, d)
    gens = []
    for dgr in range(3, N + 1):
        r_off = p.homogeneous_part(dgr).off_diagonal()
        if not r_off.coeffs:
            continue
        a_h, _ = homological_solve(r_off)
        gen = (1.0 / (1j * mu)) * a_h
        gens.append(gen)
        p = _flow_apply(p, gen, N)
    g_eig = p.diagonal()
    # Vey normalization: g(t) = g_eig(t/mu), so g'(0) = 1
    g = Series1([gc * (1.0 / mu) ** k for k, gc in enumerate(g_eig.coeffs)])
    f = _f_from_g(g)
    S = (TWO_PI / mu) * f.integ()
    return NormalFormResult(mu=mu, linmap=red.linmap, generators=tuple(gens),
                            g=g, f=f, S=S, g_eig=g_eig)


def _f_from_g(g):
    """Jacobian factor from g'(t) f(g(t)) = 1 (order drops by one)."""
    return g.deriv().compose(g.reversion().truncate(g.trunc_order - 1)) \
        .reciprocal()


# ---------------------------------------------------------------------------
# graded Weyl (Moyal) calculus


def _moyal_term(a, b, k, degree):
    """k-th bidifferential term of the Weyl product (without h^k).

    Inputs are treated as exact polynomials; the result is truncated at
    total degree `degree` only.
    """
    if k == 0:
        return (Series2(a.coeffs, degree + 1)
                * Series2(b.coeffs, degree + 1)).truncate(degree)
    pref = (1.0 / (2j)) ** k / math.factorial(k)
    pad = degree + k + 1
    out = Series2.zero(degree)
    for j in range(k + 1):
        da = Series2(a.coeffs, pad)
        for _ in range(j):
            da = da.dzeta()
        for _ in range(k - j):
            da = da.dz()
        db = Series2(b.coeffs, pad)
        for _ in range(j):
            db = db.dz()
        for _ in range(k - j):
            db = db.dzeta()
        out = out + (math.comb(k, j) * ((-1) ** (k - j))
                     * (da * db).truncate(degree))
    return pref * out


def moyal_product(a, b, h_order=None, degree=None):
    """Graded Weyl product of two h-graded bivariate symbols."""
    K = h_order if h_order is not None else min(a.h_order, b.h_order)
    if degree is None:
        degree = min([s.trunc_order for s in
                      list(a.levels.values()) + list(b.levels.values())]
                     or [0])
    out = {}
    for ka, sa in a.levels.items():
        for kb, sb in b.levels.items():
            for k in range(0, K - ka - kb + 1):
                lvl = ka + kb + k
                t = _moyal_term(sa, sb, k, degree)
                out[lvl] = out.get(lvl, Series2.zero(degree)) + t
    return HGraded(out, K)


def moyal_commutator(a, b, h_order=None, degree=None):
    """a # b - b # a; even bidifferential terms cancel identically."""
    K = h_order if h_order is not None else min(a.h_order, b.h_order)
    if degree is None:
        degree = min([s.trunc_order for s in
                      list(a.levels.values()) + list(b.levels.values())]
                     or [0])
    out = {}
    for ka, sa in a.levels.items():
        for kb, sb in b.levels.items():
            for k in range(1, K - ka - kb + 1, 2):
                lvl = ka + kb + k
                t = 2.0 * _moyal_term(sa, sb, k, degree)
                out[lvl] = out.get(lvl, Series2.zero(degree)) + t
    return HGraded(out, K)


def _ad_exp(gen, sym, h_order, degree, over_ih=False):
    """exp(ad_gen) sym with ad = [gen, .]_moyal, optionally (i/h)[gen, .]."""
    out = sym
    term = sym
    for k in range(1, 4 * (h_order + degree + 3)):
        comm = moyal_commutator(gen, term, h_order + (1 if over_ih else 0),
                                degree)
        if over_ih:
            # commutator levels start at h^1; divide by h and multiply by i
            comm = HGraded({kk - 1: 1j * s for kk, s in comm.levels.items()
                            if kk >= 1}, h_order)
        term = comm.scale(1.0 / k)
        if not any(s.coeffs for s in term.levels.values()):
            break
        out = out + term
    return out


def conjugate_classical(sym, gen, h_order, degree):
    """Conjugation by exp((i/h) gen) at graded-symbol level."""
    g = HGraded({0: gen}, h_order + 1)
    return _ad_exp(g, sym, h_order, degree, over_ih=True)


def conjugate_quantum(sym, gen_graded, h_order, degree):
    """Conjugation by exp(gen) (bounded generator), Ad = exp([gen, .])."""
    return _ad_exp(gen_graded, sym, h_order, degree, over_ih=False)


def moyal_function(fs, q, h_order, degree):
    """Weyl symbol of f(Q) for a scalar series f and graded symbol q."""
    one = HGraded({0: Series2({(0, 0): 1.0}, degree)}, h_order)
    out = one.scale(complex(fs.coeffs[0]))
    power = one
    tmax = degree + 2 * h_order + 2
    for t in range(1, min(fs.trunc_order, tmax) + 1):
        power = moyal_product(power, q, h_order, degree)
        if power.max_abs() == 0.0:
            break
        c = complex(fs.coeffs[t])
        if c != 0:
            out = out + power.scale(c)
    return out


def _diag_levels(sym, tol=1e-9):
    """Extract levels of a diagonal graded symbol as Series1 in w."""
    out = {}
    for k, s in sym.levels.items():
        off = s.off_diagonal()
        if any(abs(complex(c)) > tol for c in off.coeffs.values()):
            raise ValueError("symbol level %d is not diagonal" % k)
        out[k] = s.diagonal()
    return out


def quantum_average(qsym, h_order=None, degree=None):
    """Conjugate a graded symbol with diagonal h^0 part to G(z zeta; h).

    The h^0 level must equal g(z zeta) with g(0) = 0, g'(0) != 0.  Output
    levels depend on w = z zeta only.
    """
    K = h_order if h_order is not None else qsym.h_order
    N = degree if degree is not None else qsym.trunc_order()
    q0 = qsym.level(0)
    if q0 is None:
        raise ValueError("missing h^0 level")
    off0 = q0.off_diagonal()
    if any(abs(complex(c)) > 1e-9 for c in off0.coeffs.values()):
        raise ValueError("h^0 level is not diagonal; run classical_bnf first")
    g = q0.diagonal()
    if abs(complex(g.coeffs[0])) > 1e-12 or abs(complex(g.coeffs[1])) < 1e-14:
        raise ValueError("need g(0) = 0 and g'(0) != 0")
    # reduce the principal part to w itself: apply f = g^{-1} at operator
    # level; g is treated as an exact polynomial, so extend the inversion
    # order far enough for all Moyal powers that can contribute
    tmax = (N + 2 * K) // 2 + 2
    finv = Series1(g.coeffs, tmax).reversion()
    cur = moyal_function(finv, HGraded(dict(qsym.levels), K), K, N)
    # iterated averaging: kill off-diagonal parts level by level
    for ell in range(1, K + 1):
        r = cur.level(ell)
        if r is None:
            continue
        r_off = r.off_diagonal()
        if not r_off.coeffs:
            continue
        a_h, _ = homological_solve(r_off)
        gen = HGraded({ell - 1: a_h.to_complex()}, K)
        cur = conjugate_quantum(cur, gen, K, N)
    d = _diag_levels(cur)
    # map back through g at operator level
    gpad = Series1(g.coeffs, tmax)
    dsym = HGraded({k: Series2.from_diagonal(s, N) for k, s in d.items()}, K)
    out = moyal_function(gpad, dsym, K, N)
    return HGraded({k: Series2.from_diagonal(
        s.diagonal() if isinstance(s, Series2) else s, N)
        for k, s in out.levels.items()}, K)


def _weyl_to_left_diag(levels, K, nw):
    """Graded diagonal Weyl symbol -> left (classical) ordering symbol."""
    out = {}
    for kf, s in levels.items():
        for n, c in enumerate(s.coeffs):
            c = complex(c)
            if c == 0:
                continue
            fac = 1.0
            for k in range(0, n + 1):
                lvl = kf + k
                if lvl > K:
                    break
                if k > 0:
                    fac *= (n - k + 1) ** 2 / (2j) / k
                tgt = out.setdefault(lvl, [0.0] * (nw + 1))
                tgt[n - k] += c * fac
    return {k: Series1(v, nw) for k, v in out.items()}


def weyl_to_spectral(F, h_order=None):
    """Spectral form of a diagonal graded symbol.

    Returns g_spec with Op_weyl(F) = g_spec(z h D_z + h/(2i); h); the model
    operator has eigenvalue -i(n+1/2)h on z^n.
    """
    if h_order is None:
        h_order = F.h_order
    K = h_order
    levels = {}
    for k, s in F.levels.items():
        levels[k] = s.diagonal() if isinstance(s, Series2) else s
    nw = min(s.trunc_order for s in levels.values())
    left = _weyl_to_left_diag(levels, K, nw)
    # z^n (hD)^n = i^{-n} prod_{j<n} (i s - h/2 - j h), s = z h D_z + h/(2i)
    # expand in s with h-graded coefficients
    out = {}

    def add(lvl, n_s, c):
        if lvl <= K:
            tgt = out.setdefault(lvl, [0.0] * (nw + 1))
            tgt[n_s] += c

    for kf, s in left.items():
        for n, c in enumerate(s.coeffs):
            c = complex(c)
            if c == 0:
                continue
            # poly in s with h-coefficients: start with i^{-n}
            poly = {0: {0: c * (1j) ** (-n)}}  # h-level -> {s-power: coeff}
            for j in range(n):
                newp = {}
                for kh, mono in poly.items():
                    for ps, cc in mono.items():
                        # multiply by (i s - (j + 1/2) h)
                        newp.setdefault(kh, {}).setdefault(ps + 1, 0.0)
                        newp[kh][ps + 1] += cc * 1j
                        if kh + 1 <= K:
                            newp.setdefault(kh + 1, {}).setdefault(ps, 0.0)
                            newp[kh + 1][ps] += cc * (-(j + 0.5))
                poly = newp
            for kh, mono in poly.items():
                for ps, cc in mono.items():
                    add(kf + kh, ps, cc)
    return HGraded({k: Series1(v, nw) for k, v in out.items()}, K)


def weyl_monomial_action(levels, K, k_z, nw):
    """Oracle: apply Op_weyl of a diagonal graded symbol to z^{k_z}.

    Uses the symmetrized-ordering formula Op_w(z^a zeta^b) =
    2^{-a} sum_j C(a,j) z^j (hD)^b z^{a-j}.  Returns {h_level: coeff} of
    the resulting multiple of z^{k_z}.
    """
    out = {}
    for kf in levels:
        s = levels[kf]
        for n, c in enumerate(s.coeffs):
            c = complex(c)
            if c == 0:
                continue
            # Op_w(z^n zeta^n) z^k = 2^{-n} sum_j C(n,j) z^j (hD)^n z^{n-j+k}
            for j in range(n + 1):
                p = n - j + k_z     # power before the derivatives
                # (hD)^n z^p = (h/i)^n p!/(p-n)! z^{p-n}
                if p - n < 0:
                    continue
                fall = 1.0
                for t in range(n):
                    fall *= (p - t)
                coeff = (c * 2.0 ** (-n) * math.comb(n, j)
                         * (1.0 / 1j) ** n * fall)
                # resulting power: j + (p - n) = k_z  -> contributes h^n
                lvl = kf + n
                if lvl <= K:
                    out[lvl] = out.get(lvl, 0.0) + coeff
    return out


# ---------------------------------------------------------------------------
# assembly of the mode symbol


def qnm_symbol(p, degree=10, h_order=2, return_parts=False):
    """Mode symbol G(x; h): lambda_{l,n} = h^{-1} G(2 pi (n+1/2) h; h).

    G_0(x) = sqrt(E0 + g_eig(SPECTRAL_ARG * x)) with g_eig the classical
    eigenvalue curve at the barrier top; h-levels from quantum averaging of
    the graded symbol (the h^2 potential correction included).
    """
    N = degree
    K = h_order
    if N < 2 * K + 4:
        raise ValueError("need degree >= 2*h_order + 4")
    cd = critical_data(p)
    V = shifted_potential_taylor(p, N)
    p0 = Series2({(k, 0): c for k, c in enumerate(V.coeffs) if c != 0}, N)
    p0 = p0 + Series2.monomial(0, 2, 1.0, N)
    levels = {0: p0}
    if K >= 2:
        W1 = subprincipal_taylor(p, N)
        levels[2] = Series2({(k, 0): c for k, c in enumerate(W1.coeffs)
                             if c != 0}, N)
    sym = HGraded(levels, K)
    # linear symplectic reduction of the quadratic part (exact for Weyl)
    red = quad_reduce(p0.homogeneous_part(2))
    (a, b), (c, d) = red.linmap
    sym = HGraded({k: s.subs_linear(a, b, c, d)
                   for k, s in sym.levels.items()}, K)
    nf_gens = []
    for dgr in range(3, N + 1):
        r_off = sym.level(0).homogeneous_part(dgr).off_diagonal()
        if not r_off.coeffs:
            continue
        a_h, _ = homological_solve(r_off)
        gen = (1.0 / (1j * red.mu)) * a_h
        nf_gens.append(gen)
        sym = conjugate_classical(sym, gen, K, N)
    gw = quantum_average(sym, K, N)
    gs = weyl_to_spectral(gw, K)
    # substitute s = SPECTRAL_ARG * x and build sqrt(E0 + .)
    nx = gs.trunc_order()
    u_levels = {}
    for k, s in gs.levels.items():
        u_levels[k] = Series1([cc * SPECTRAL_ARG ** j
                               for j, cc in enumerate(s.coeffs)], nx)
    u = HGraded(u_levels, K)
    # Taylor of sqrt(E0 + w) in w
    root = math.sqrt(cd.E0)
    cs = [root]
    for j in range(1, nx + 1):
        cs.append(cs[-1] * (0.5 - (j - 1)) / j / cd.E0)
    sqrtE = Series1(cs, nx)
    G = hcompose(HGraded({0: sqrtE}, K), u)
    # coefficient of x^j at h-level k needs bivariate degree 2j + 2k; keep
    # only the fully resolved part of each level
    G = HGraded({k: lvl.truncate(max(N // 2 - k, 0))
                 for k, lvl in G.levels.items()}, K)
    if return_parts:
        return G, {"critical": cd, "reduction": red, "symbol": sym,
                   "g_weyl": gw, "g_spec": gs}
    return G
