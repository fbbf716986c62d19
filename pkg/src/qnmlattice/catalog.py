"""Mode lattices, sector counting, and the cubic counting law.

The lattice rule is lam_{ell,n} = h^{-1} G(2 pi (n+1/2) h; h) with
h = (ell+1/2)^{-1}; each (ell, n) mode carries multiplicity 2 ell + 1.
Counting in the sector A_t(r) = {1 <= |lam| <= r, arg lam > -t} follows
the cubic law N(r) ~ c(t, m, lam) r^3.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QnmEntry:
    ell: int
    n: int
    lam: complex
    multiplicity: int


@dataclass(frozen=True)
class SectorSpec:
    r: float
    t: float

    def __post_init__(self):
        if self.r < 1.0:
            raise ValueError("sector radius must be >= 1")
        if not (0.0 < self.t <= 0.3):
            raise ValueError("need 0 < t <= 0.3")

    def contains(self, lam):
        a = abs(lam)
        return 1.0 <= a <= self.r and math.atan2(lam.imag, lam.real) > -self.t


class CoverageError(RuntimeError):
    """Raised when the symbol truncation runs out before the sector does."""


def validity_radius(G0, frac=0.05):
    """Largest x > 0 where the top retained term is < frac of the sum.

    Beyond this radius the polynomial truncation is treated as unreliable
    and the lattice is refused rather than extrapolated.
    """
    coeffs = list(G0.coeffs)
    k = max(j for j, c in enumerate(coeffs) if abs(c) != 0)
    if k == 0:
        return math.inf
    ck = coeffs[k]

    def bad(x):
        tot = sum(c * x ** j for j, c in enumerate(coeffs))
        return abs(ck) * x ** k >= frac * abs(tot)

    hi = 1.0
    while not bad(hi):
        hi *= 2.0
        if hi > 1e8:
            return math.inf
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bad(mid):
            hi = mid
        else:
            lo = mid
    return lo


def eval_symbol(G, x, h):
    """G(x; h) = sum_k G_k(x) h^k for scalar or array x."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for k, lvl in G.levels.items():
        cs = np.asarray(lvl.coeffs, dtype=complex)
        out += np.polyval(cs[::-1], x) * h ** k
    return out


def lattice(p, G, ell_max, sector, check_coverage=True):
    """All lattice entries inside the sector, one per (ell, n).

    Entries are generated per ell for increasing n until the mode leaves
    the sector; if the truncation validity radius is hit first, that is a
    coverage gap (CoverageError unless check_coverage is False).
    """
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    rad = validity_radius(G.levels[0])
    entries = []
    gaps = []
    for ell in range(1, ell_max + 1):
        h = 1.0 / (ell + 0.5)
        n = 0
        while True:
            x = 2.0 * math.pi * (n + 0.5) * h
            if x > rad:
                gaps.append(ell)
                break
            lam = complex(eval_symbol(G, x, h)) / h
            if math.atan2(lam.imag, lam.real) <= -sector.t:
                break
            if abs(lam) > sector.r:
                # |lam| grows with ell at fixed n but shrinks slowly in n;
                # outside the radius we keep scanning until the arg cutoff
                n += 1
                continue
            if abs(lam) >= 1.0:
                entries.append(QnmEntry(ell=ell, n=n, lam=lam,
                                        multiplicity=2 * ell + 1))
            n += 1
    if gaps and check_coverage:
        raise CoverageError("validity radius exceeded before sector "
                            "boundary at ell in %s" % gaps[:10])
    return entries


def count_modes(entries, sector):
    """Multiplicity-weighted number of entries inside the sector."""
    return sum(e.multiplicity for e in entries if sector.contains(e.lam))


def _unwrapped_arg_crossing(G0, t, rad):
    """Smallest x > 0 with (continuously tracked) arg G0(x) = -t."""
    xs = np.linspace(0.0, rad, 4001)
    vals = np.polyval(np.asarray(G0.coeffs, dtype=complex)[::-1], xs)
    args = np.unwrap(np.angle(vals))
    args = args - args[0]  # branch continuous from arg G0(0) = 0
    below = args <= -t
    if not np.any(below):
        raise ValueError("arg G0 never reaches -t within validity radius")
    i = int(np.argmax(below))
    lo, hi = xs[i - 1], xs[i]
    alo = args[i - 1]

    def arg_at(x):
        v = complex(np.polyval(np.asarray(G0.coeffs, dtype=complex)[::-1], x))
        # local branch continuation from the grid value
        a = math.atan2(v.imag, v.real)
        k = round((alo - a) / (2.0 * math.pi))
        return a + 2.0 * math.pi * k

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if arg_at(mid) <= -t:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def counting_constant(t, p, G0):
    """c(t, m, lam) = pi^{-1}(1-9 lam m^2)^{-3/2} 3^{7/2} m^3 |I_t|,
    where I_t = {x > 0 : arg G0(x) > -t} for the leading symbol G0."""
    if not (0.0 < t <= 0.3):
        raise ValueError("need 0 < t <= 0.3")
    rad = validity_radius(G0)
    x_cross = _unwrapped_arg_crossing(G0, t, rad)
    interval = x_cross  # I_t = (0, x_cross) since arg decreases from 0
    m, lam = p.m, p.lam
    pref = (1.0 - 9.0 * lam * m * m) ** -1.5
    c = interval * pref * 3.0 ** 3.5 * m ** 3 / math.pi
    # independent arithmetic path for the same prefactor
    c_alt = (interval / (3.0 * math.pi)) * (3.0 * math.sqrt(3.0) * m) ** 3 \
        * pref
    assert abs(c - c_alt) <= 1e-12 * abs(c)
    return c


def _count_arithmetic(p, G, sector, rad):
    """Sector count by per-ell vectorized evaluation (nothing stored)."""
    g0 = abs(complex(eval_symbol(G, 0.0, 0.0)))
    ell_max = int(math.ceil(sector.r / g0)) + 2
    total = 0
    gaps = []
    for ell in range(1, ell_max + 1):
        h = 1.0 / (ell + 0.5)
        # n beyond the arg cutoff cannot re-enter; stop at the validity cap
        n_cap = int(math.floor(rad / (2.0 * math.pi * h) - 0.5))
        if n_cap < 0:
            gaps.append(ell)
            continue
        ns = np.arange(n_cap + 1)
        xs = 2.0 * math.pi * (ns + 0.5) * h
        lams = eval_symbol(G, xs, h) / h
        args = np.angle(lams)
        inside = (args > -sector.t) & (np.abs(lams) >= 1.0) \
            & (np.abs(lams) <= sector.r)
        if np.all(args[-1:] > -sector.t):
            # last computed mode still inside the arg wedge: coverage gap
            gaps.append(ell)
        total += (2 * ell + 1) * int(np.sum(inside))
    return total, gaps


def asymptotic_check(p, G, t, r_list):
    """Table of N(r) / (c r^3) for increasing radii r."""
    if list(r_list) != sorted(r_list):
        raise ValueError("r_list must be increasing")
    rad = validity_radius(G.levels[0])
    c = counting_constant(t, p, G.levels[0])
    rows = []
    for r in r_list:
        sector = SectorSpec(r=float(r), t=t)
        n, gaps = _count_arithmetic(p, G, sector, rad)
        rows.append({"r": float(r), "count": n, "c_r3": c * r ** 3,
                     "ratio": n / (c * r ** 3),
                     "coverage_gaps": len(gaps)})
    return rows
