"""Closed-form evaluation of the scalar Fourier kernels of the linearized flow.

The linearized 2D compressible MHD system reduces, mode by mode, to the
fourth-order operator whose four exponential branches are

    -A^2/2 +- sqrt(b +- c),   b = A^4/4 - A^2,   c = A*|eta|,

with A = sqrt(xi^2 + eta^2).  Everything in this module is built from two
entire functions (sinch, coshc) that continue sinh(t*sqrt(z))/sqrt(z) and
cosh(t*sqrt(z)) across z = 0, together with a numerically stable divided
difference in the argument c.  All kernel symbols are real functions of
(t, xi, eta); every evaluation here is vectorized over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralPoint",
    "KernelValues",
    "sinch",
    "coshc",
    "divided_diff",
    "k_hat",
    "k1_hat",
    "kernel_values",
    "bound_envelope",
    "DEFAULT_C_DECAY",
]

# Default decay-rate constant used inside the high-frequency factor exp(-c*t)
# of the pointwise estimate envelopes.  The estimates hold for *some* c > 0;
# the fitted prefactor (verify module) absorbs this choice.
DEFAULT_C_DECAY = 1.0 / 16.0

# Branch thresholds.  |z|*t^2 below _SERIES_Z uses the entire power series.
# The divided difference uses the two-point formula when the variation
# v = c*t^2/(1+w) across [b-c, b+c] exceeds _DD_V_REL*(1+w), w = t*sqrt(|b|+c):
# rounding of the oscillation phase costs ~eps*(1+w)/v relative error, so this
# keeps the two-point branch at <= eps/_DD_V_REL.  Below that it switches to a
# c-Taylor expansion about b (series coefficients for small |b| t^2, a
# derivative recurrence seeded by the transcendental branch otherwise).
_SERIES_Z = 1e-2
_DD_V_REL = 1e-3
_DD_SMALL_BT2 = 36.0
_DD_REC_RATIO = 0.25


@dataclass(frozen=True)
class SpectralPoint:
    """Derived quantities of one Fourier mode entering the kernel branches."""

    xi: float
    eta: float
    A: float
    b: float
    c: float


def spectral_point(xi: float, eta: float) -> SpectralPoint:
    """Build the (A, b, c) data of a mode; c >= 0 and b + c <= A^4/4 always."""
    A = float(np.hypot(xi, eta))
    return SpectralPoint(
        xi=float(xi),
        eta=float(eta),
        A=A,
        b=0.25 * A**4 - A**2,
        c=A * abs(float(eta)),
    )


def _split_bc(xi, eta):
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    A = np.hypot(xi, eta)
    a2 = A * A
    b = 0.25 * a2 * a2 - a2
    c = A * np.abs(eta)
    return A, b, c


def _damped_pair(z, a, t, a2mz=None):
    """Return (exp(-a t) * sinch(z, t), exp(-a t) * coshc(z, t)), elementwise.

    The product form matters: for z > 0 both factors can over/underflow even
    though the product is tame, so the positive branch is assembled from the
    exponentials exp((sqrt(z) - a) t) and exp(-(sqrt(z) + a) t) directly.
    When the caller knows a^2 - z exactly (`a2mz`), the critical exponent is
    computed as sqrt(z) - a = (z - a^2)/(sqrt(z) + a), avoiding the
    cancellation of two nearly equal large numbers.
    """
    if a2mz is None:
        z, a, t = np.broadcast_arrays(
            np.asarray(z, dtype=float), np.asarray(a, dtype=float), np.asarray(t, dtype=float)
        )
        a2mz_ = None
    else:
        z, a, t, a2mz_ = np.broadcast_arrays(
            np.asarray(z, dtype=float), np.asarray(a, dtype=float),
            np.asarray(t, dtype=float), np.asarray(a2mz, dtype=float),
        )
    g = np.empty(z.shape, dtype=float)
    h = np.empty(z.shape, dtype=float)

    x = z * t * t
    m_series = np.abs(x) <= _SERIES_Z
    m_osc = (~m_series) & (z < 0.0)
    m_pos = (~m_series) & (z >= 0.0)

    if m_series.any():
        xs, ts, as_ = x[m_series], t[m_series], a[m_series]
        damp = np.exp(-as_ * ts)
        # truncation error below 3e-18 relative for |x| <= 1e-2
        g[m_series] = damp * ts * (
            1.0 + xs / 6.0 * (1.0 + xs / 20.0 * (1.0 + xs / 42.0 * (1.0 + xs / 72.0)))
        )
        h[m_series] = damp * (
            1.0 + xs / 2.0 * (1.0 + xs / 12.0 * (1.0 + xs / 30.0 * (1.0 + xs / 56.0)))
        )
    if m_osc.any():
        s = np.sqrt(-z[m_osc])
        w = t[m_osc] * s
        damp = np.exp(-a[m_osc] * t[m_osc])
        g[m_osc] = damp * np.sin(w) / s
        h[m_osc] = damp * np.cos(w)
    if m_pos.any():
        s = np.sqrt(z[m_pos])
        ts, as_ = t[m_pos], a[m_pos]
        if a2mz_ is None:
            up = (s - as_) * ts
        else:
            up = -(a2mz_[m_pos] / (s + as_)) * ts
        with np.errstate(over="ignore"):
            ep = np.exp(up)
            em = np.exp(-(s + as_) * ts)
        g[m_pos] = (ep - em) / (2.0 * s)
        h[m_pos] = 0.5 * (ep + em)
    return g, h


def _series_deriv(kind: str, j: int, b, t, nterms: int = 48):
    """j-th z-derivative of sinch/coshc at z=b via the entire power series.

    Valid (fast, cancellation-safe) when t^2 * |b| is moderate; callers gate
    on _DD_SMALL_BT2.
    """
    b = np.asarray(b, dtype=float)
    t = np.asarray(t, dtype=float)
    t2 = t * t
    # coefficient a_{k+j} * (k+j)!/k! of b^k; k = 0 term:
    if kind == "sinch":
        # a_m = t^(2m+1)/(2m+1)!
        term = t ** (2 * j + 1)
        for i in range(1, 2 * j + 2):
            term = term / i
        for i in range(1, j + 1):  # (j)!/0! factor of the k=0 term
            term = term * i
    else:
        term = t ** (2 * j)
        for i in range(1, 2 * j + 1):
            term = term / i
        for i in range(1, j + 1):
            term = term * i
    total = np.zeros(np.broadcast(b, t).shape, dtype=float)
    term = np.broadcast_to(term, total.shape).astype(float).copy()
    off = 1 if kind == "sinch" else 0
    for k in range(nterms):
        total += term
        mj = k + j + 1
        denom = (k + 1.0) * (2 * mj + off - 1.0) * (2 * mj + off)
        term = term * t2 * b * (mj / denom)
    return total


def _dd_damped(kind: str, b, c, t, a, a2mb=None):
    """exp(-a t) * (f(b+c,t) - f(b-c,t)) / (2c) for f = sinch or coshc.

    Three regimes, selected elementwise:
      * two-point difference when the variation of f across [b-c, b+c] is
        large enough to dominate rounding of f itself;
      * series-in-z Taylor coefficients about b when t^2(|b|+c) is small;
      * a derivative recurrence seeded by the transcendental branch when the
        c-expansion converges (c*t/sqrt(|b|) small);
      * two-point as fallback in the marginal zone, where its error is still
        graceful because the damped values there are many orders below scale.
    The c -> 0 limit is the z-derivative of f at b.  `a2mb` optionally carries
    an exactly known a^2 - b (see _damped_pair).
    """
    if a2mb is None:
        a2mb = np.square(np.asarray(a, dtype=float)) - np.asarray(b, dtype=float)
    b, c, t, a, a2mb = np.broadcast_arrays(
        np.asarray(b, dtype=float),
        np.asarray(c, dtype=float),
        np.asarray(t, dtype=float),
        np.asarray(a, dtype=float),
        np.asarray(a2mb, dtype=float),
    )
    out = np.empty(b.shape, dtype=float)

    absb = np.abs(b)
    w = t * np.sqrt(absb + c)
    v = c * t * t / (1.0 + w)
    m_two = v > _DD_V_REL * (1.0 + w)
    m_small = (~m_two) & ((absb + c) * t * t <= _DD_SMALL_BT2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(absb > 0, c * t / np.sqrt(np.where(absb > 0, absb, 1.0)), np.inf)
    m_rec = (~m_two) & (~m_small) & (ratio <= _DD_REC_RATIO)
    m_two = m_two | (~m_small & ~m_rec)

    sel = 0 if kind == "sinch" else 1
    if m_two.any():
        bb, cc, tt, aa = b[m_two], c[m_two], t[m_two], a[m_two]
        amb = a2mb[m_two]
        fp = _damped_pair(bb + cc, aa, tt, a2mz=amb - cc)[sel]
        fm = _damped_pair(bb - cc, aa, tt, a2mz=amb + cc)[sel]
        out[m_two] = (fp - fm) / (2.0 * cc)
    if m_small.any():
        bb, cc, tt, aa = b[m_small], c[m_small], t[m_small], a[m_small]
        damp = np.exp(-aa * tt)
        c2 = cc * cc
        if kind == "sinch":
            d1 = _series_deriv("sinch", 1, bb, tt)
            d3 = _series_deriv("sinch", 3, bb, tt)
            d5 = _series_deriv("sinch", 5, bb, tt)
            d7 = _series_deriv("sinch", 7, bb, tt)
        else:
            # coshc' = (t/2) * sinch, so odd coshc-derivatives are even
            # sinch-derivatives scaled by t/2
            d1 = 0.5 * tt * _series_deriv("sinch", 0, bb, tt)
            d3 = 0.5 * tt * _series_deriv("sinch", 2, bb, tt)
            d5 = 0.5 * tt * _series_deriv("sinch", 4, bb, tt)
            d7 = 0.5 * tt * _series_deriv("sinch", 6, bb, tt)
        out[m_small] = damp * (d1 + c2 * (d3 / 6.0 + c2 * (d5 / 120.0 + c2 * d7 / 5040.0)))
    if m_rec.any():
        bb, cc, tt, aa = b[m_rec], c[m_rec], t[m_rec], a[m_rec]
        g0, h0 = _damped_pair(bb, aa, tt, a2mz=a2mb[m_rec])
        t2h = 0.5 * tt * tt
        inv2b = 1.0 / (2.0 * bb)
        d = [g0, (tt * h0 - g0) * inv2b]
        for j in range(1, 7):
            d.append((t2h * d[j - 1] - (2 * j + 1) * d[j]) * inv2b)
        c2 = cc * cc
        if kind == "sinch":
            out[m_rec] = d[1] + c2 * (d[3] / 6.0 + c2 * (d[5] / 120.0 + c2 * d[7] / 5040.0))
        else:
            out[m_rec] = 0.5 * tt * (
                d[0] + c2 * (d[2] / 6.0 + c2 * (d[4] / 120.0 + c2 * d[6] / 5040.0))
            )
    return out


def _as_result(arr, scalar: bool):
    return float(arr) if scalar else arr


def _all_scalar(*xs) -> bool:
    return all(np.ndim(x) == 0 for x in xs)


def sinch(z, t):
    """Entire continuation of sinh(t*sqrt(z))/sqrt(z); sin-form for z < 0."""
    return _as_result(_damped_pair(z, 0.0, t)[0], _all_scalar(z, t))


def coshc(z, t):
    """Entire continuation of cosh(t*sqrt(z)); cos-form for z < 0."""
    return _as_result(_damped_pair(z, 0.0, t)[1], _all_scalar(z, t))


def divided_diff(f: str, b, c, t):
    """(f(b+c,t) - f(b-c,t)) / (2c) for f in {"sinch", "coshc"}, c >= 0.

    Continuous down to c = 0, where it equals the z-derivative of f at b.
    """
    if f not in ("sinch", "coshc"):
        raise ValueError(f"unknown function {f!r}; expected 'sinch' or 'coshc'")
    if np.any(np.asarray(c) < 0):
        raise ValueError("divided_diff requires c >= 0")
    return _as_result(_dd_damped(f, b, c, t, 0.0), _all_scalar(b, c, t))


@dataclass(frozen=True)
class KernelValues:
    """All kernel symbols of one (t, xi, eta) batch; every entry is real.

    ``comp`` is the second-order combination (d_tt + A^2 d_t + A^2) applied to
    the kernel, ``comp_x`` replaces the zeroth-order A^2 by xi^2, and the
    ``dt_``/``ddt_`` prefixes are time derivatives of those combinations.
    """

    t: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    K: np.ndarray
    K1: np.ndarray
    dtK: np.ndarray
    ddtK: np.ndarray
    comp: np.ndarray
    comp_x: np.ndarray
    dt_comp: np.ndarray
    ddt_comp: np.ndarray
    dtK1: np.ndarray


def k_hat(t, xi, eta):
    """Kernel symbol inverting the fourth-order operator; finite everywhere.

    Equals exp(-A^2 t/2) times the sinch divided difference in c = A|eta|
    about b = A^4/4 - A^2; the singularities at eta = 0 and A = 0 are
    removable and resolved by the divided difference.
    """
    scalar = _all_scalar(t, xi, eta)
    A, b, c = _split_bc(xi, eta)
    out = _dd_damped("sinch", b, c, t, 0.5 * A * A, a2mb=A * A)
    return _as_result(out, scalar)


def k1_hat(t, xi, eta):
    """Mean of the four exponential branches; equals 1 at t = 0."""
    scalar = _all_scalar(t, xi, eta)
    A, b, c = _split_bc(xi, eta)
    a = 0.5 * A * A
    hp = _damped_pair(b + c, a, t, a2mz=A * A - c)[1]
    hm = _damped_pair(b - c, a, t, a2mz=A * A + c)[1]
    return _as_result(0.5 * (hp + hm), scalar)


def kernel_values(t, xi, eta) -> KernelValues:
    """Evaluate every kernel symbol at (t, xi, eta); inputs broadcast."""
    t_, xi_, eta_ = np.broadcast_arrays(
        np.asarray(t, dtype=float), np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    )
    A = np.hypot(xi_, eta_)
    a2 = A * A
    b = 0.25 * a2 * a2 - a2
    c = A * np.abs(eta_)
    a = 0.5 * a2

    gp, hp = _damped_pair(b + c, a, t_, a2mz=a2 - c)
    gm, hm = _damped_pair(b - c, a, t_, a2mz=a2 + c)

    K = _dd_damped("sinch", b, c, t_, a, a2mb=a2)
    dd_cosh = _dd_damped("coshc", b, c, t_, a, a2mb=a2)

    comp = 0.5 * (gp + gm)
    K1 = 0.5 * (hp + hm)
    dtK = -a * K + dd_cosh
    dt_comp = -a * comp + K1
    ddtK = comp - a2 * dtK - a2 * K
    comp_x = comp - eta_ * eta_ * K
    dtK1 = -a * K1 + 0.5 * ((b + c) * gp + (b - c) * gm)
    ddt_comp = -a * dt_comp + dtK1

    return KernelValues(
        t=t_, xi=xi_, eta=eta_,
        K=K, K1=K1, dtK=dtK, ddtK=ddtK,
        comp=comp, comp_x=comp_x, dt_comp=dt_comp, ddt_comp=ddt_comp,
        dtK1=dtK1,
    )


def noise_floors(t, xi, eta, rel: float = 1e-10) -> dict:
    """Per-symbol rounding floors for pointwise scans.

    Each kernel symbol is assembled from the damped exponential-branch values;
    where a combination cancels (e.g. the second time derivative at large A),
    the achievable absolute accuracy is `rel` times the magnitudes of the
    cancelling intermediates.  Scans subtract these floors from measured
    symbol magnitudes so that rounding noise deep below scale is not compared
    against legitimately tiny bounds.
    """
    t_, xi_, eta_ = np.broadcast_arrays(
        np.asarray(t, dtype=float), np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    )
    A = np.hypot(xi_, eta_)
    a2 = A * A
    b = 0.25 * a2 * a2 - a2
    c = A * np.abs(eta_)
    a = 0.5 * a2
    gp, hp = _damped_pair(b + c, a, t_, a2mz=a2 - c)
    gm, hm = _damped_pair(b - c, a, t_, a2mz=a2 + c)
    kv = kernel_values(t_, xi_, eta_)
    dd_cosh = kv.dtK + a * kv.K

    p_scale = 0.5 * (np.abs(gp) + np.abs(gm))
    h_scale = 0.5 * (np.abs(hp) + np.abs(hm))
    z_scale = 0.5 * (np.abs((b + c) * gp) + np.abs((b - c) * gm))
    f_K = rel * np.abs(kv.K)
    f_dtK = rel * (a * np.abs(kv.K) + np.abs(dd_cosh))
    f_comp = rel * p_scale
    f_K1 = rel * h_scale
    f_dt_comp = a * f_comp + f_K1
    f_ddtK = f_comp + a2 * f_dtK + a2 * f_K
    f_comp_x = f_comp + eta_ * eta_ * f_K
    f_dtK1 = a * f_K1 + rel * z_scale
    f_ddt_comp = a * f_dt_comp + f_dtK1
    return {
        "K": f_K, "dtK": f_dtK, "ddtK": f_ddtK, "comp": f_comp,
        "comp_x": f_comp_x, "dt_comp": f_dt_comp, "ddt_comp": f_ddt_comp,
        "K1": f_K1, "est8": f_dt_comp + eta_ * eta_ * f_dtK,
    }


# Right-hand sides of the eight pointwise kernel estimates.  Indicator
# functions are literal: chi_{A>=1}, chi_{A<=1}, and chi_{|xi| <= A^2}; the
# min{...} alternatives are taken pointwise.  Entries may be +inf where a
# singular low-frequency factor blows up faster than the kernel itself; ratio
# checks treat lhs/inf as 0.

def _envelope_terms(t, xi, eta, c_decay):
    t_, xi_, eta_ = np.broadcast_arrays(
        np.asarray(t, dtype=float), np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    )
    A = np.hypot(xi_, eta_)
    hi = (A >= 1.0).astype(float) * np.exp(-c_decay * t_)
    lo = (A <= 1.0).astype(float) * np.exp(-0.25 * A * A * t_)
    with np.errstate(divide="ignore", invalid="ignore"):
        aniso_exp = np.where(A > 0.0, np.exp(-0.5 * xi_ * xi_ / np.where(A > 0, A * A, 1.0) * t_), 0.0)
    aniso = (np.abs(xi_) <= A * A).astype(float) * aniso_exp
    return t_, xi_, eta_, A, hi, lo, aniso


def bound_envelope(which: int, t, xi, eta, c_decay: float = DEFAULT_C_DECAY):
    """Right-hand side of pointwise kernel estimate number `which` (1..8)."""
    if c_decay <= 0:
        raise ValueError("c_decay must be positive")
    if which not in range(1, 9):
        raise ValueError(f"unknown estimate id {which}; expected 1..8")
    t_, xi_, eta_, A, hi, lo, aniso = _envelope_terms(t, xi, eta, c_decay)
    trans = (A >= 1.0).astype(float) * np.exp(-0.5 * t_)
    scalar = _all_scalar(t, xi, eta)

    with np.errstate(divide="ignore", invalid="ignore"):
        iA = np.where(A > 0, 1.0 / np.where(A > 0, A, 1.0), np.inf)
        iA2, iA4 = iA * iA, (iA * iA) ** 2
        iA6, iA8 = iA4 * iA2, iA4 * iA4
        axixeta = A * np.abs(xi_) * np.abs(eta_)
        i_axixeta = np.where(axixeta > 0, 1.0 / np.where(axixeta > 0, axixeta, 1.0), np.inf)
        i_eta = np.where(eta_ != 0, 1.0 / np.where(eta_ != 0, np.abs(eta_), 1.0), np.inf)
        i_xi = np.where(xi_ != 0, 1.0 / np.where(xi_ != 0, np.abs(xi_), 1.0), np.inf)
        xi2, xi4 = xi_ * xi_, (xi_ * xi_) ** 2

        # 0 * inf arises where an indicator vanished against a singular
        # coefficient; that term is absent, so its nan collapses to 0
        def z(term):
            return np.where(np.isnan(term), 0.0, term)

        if which == 1:
            out = z(hi * iA4) + z(lo * np.minimum(i_axixeta, iA4)) + z(aniso * iA4)
        elif which == 2:
            out = z(hi * iA4) + z(lo * np.minimum(iA2 * iA, iA * i_eta)) + z(aniso * xi2 * iA6)
        elif which == 3:
            out = z(hi * iA4) + z(lo * np.minimum(iA2, i_eta)) + z(aniso * xi4 * iA8)
        elif which == 4:
            out = z(hi * iA2) + z(lo * np.minimum(i_xi, iA2)) + z(aniso * iA2)
        elif which == 5:
            # the time-derivative combinations below do not vanish at t = 0
            # (this one equals 1 there for every mode), so the high-frequency
            # branch keeps the O(1) short-time transient exp(-t/2), which the
            # damped branches beat; without it no finite prefactor exists.
            out = z(hi * iA2) + trans + lo + z(aniso * xi2 * iA4)
        elif which == 6:
            out = z(hi * iA2) + trans * A * A + lo * A + z(aniso * xi4 * iA6)
        elif which == 7:
            out = z(hi * iA2) + z(lo * iA) + z(aniso * xi2 * iA4)
        else:
            out = z(hi * iA2) + trans + lo + z(aniso * xi4 * iA6)
    return _as_result(out, scalar)
