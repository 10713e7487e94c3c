"""Periodic Fourier discretization: grids, fields, multipliers, norms.

Transforms use the continuum convention: the forward transform carries the
cell-area factor dx*dy, so a stored coefficient approximates the integral
Fourier transform of the field and symbol formulas apply verbatim.  With this
normalization Parseval reads  ||f||_L2^2 = sum |fhat|^2 / (Lx*Ly).

Physical arrays are indexed [i, j] <-> (x_i, y_j); serialized files are
written x-fastest (see `save_field`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FourierGrid",
    "SpectralField",
    "PerturbationState",
    "XNormBreakdown",
    "X_ENTRY_WEIGHTS",
    "make_grid",
    "apply_multiplier",
    "lp_project",
    "sobolev_norm",
    "mixed_norm_L2x_Linfy",
    "x_norm_snapshot",
    "bump_chi",
    "save_field",
    "load_field",
]

# width of the smooth cutoff's transition band: chi = 1 on |x| <= 1 and
# chi = 0 on |x| >= 1 + _BUMP_DELTA
_BUMP_DELTA = 1e-4


def fsum(values) -> float:
    """Deterministic compensated summation (exactly rounded)."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class FourierGrid:
    """Wavenumber lattice of an nx-by-ny periodic box of side Lx-by-Ly.

    `xi`/`eta` are the true wavenumbers 2*pi*k/L in standard FFT layout;
    `xi_d`/`eta_d` zero the (unpaired) Nyquist entry and are the arrays to use
    for odd-order derivative symbols, which keeps real fields real.
    """

    nx: int
    ny: int
    Lx: float
    Ly: float
    xi: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    xi_d: np.ndarray = field(repr=False)
    eta_d: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def area(self) -> float:
        return self.Lx * self.Ly

    @property
    def XI(self) -> np.ndarray:
        return self.xi[:, None]

    @property
    def ETA(self) -> np.ndarray:
        return self.eta[None, :]

    @property
    def A(self) -> np.ndarray:
        return np.hypot(self.XI, np.broadcast_to(self.ETA, (self.nx, self.ny)))

    @property
    def nyquist(self) -> float:
        """Smaller of the two Nyquist wavenumbers."""
        return min(np.pi * self.nx / self.Lx, np.pi * self.ny / self.Ly)

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        kx_max = np.pi * self.nx / self.Lx * fraction
        ky_max = np.pi * self.ny / self.Ly * fraction
        return (np.abs(self.XI) <= kx_max) & (np.abs(self.ETA) <= ky_max)


def make_grid(nx: int, ny: int, Lx: float, Ly: float) -> FourierGrid:
    """Build the wavenumber lattice; nx, ny must be even and >= 4."""
    for name, n in (("nx", nx), ("ny", ny)):
        if n < 4 or n % 2 != 0:
            raise GridError(f"invalid-dimension: {name}={n} must be an even integer >= 4")
    if Lx <= 0 or Ly <= 0:
        raise GridError(f"invalid-dimension: box lengths must be positive, got {Lx}, {Ly}")
    xi = 2.0 * np.pi * np.fft.fftfreq(nx, d=Lx / nx)
    eta = 2.0 * np.pi * np.fft.fftfreq(ny, d=Ly / ny)
    xi_d, eta_d = xi.copy(), eta.copy()
    xi_d[nx // 2] = 0.0
    eta_d[ny // 2] = 0.0
    for a in (xi, eta, xi_d, eta_d):
        a.setflags(write=False)
    return FourierGrid(nx=nx, ny=ny, Lx=float(Lx), Ly=float(Ly),
                       xi=xi, eta=eta, xi_d=xi_d, eta_d=eta_d)


@dataclass(frozen=True)
class SpectralField:
    """One real scalar unknown stored as complex Fourier coefficients."""

    grid: FourierGrid
    coeffs: np.ndarray

    @classmethod
    def from_physical(cls, grid: FourierGrid, values: np.ndarray) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.nx, grid.ny):
            raise GridError(f"field shape {values.shape} != grid ({grid.nx}, {grid.ny})")
        return cls(grid, np.fft.fft2(values) * (grid.dx * grid.dy))

    @classmethod
    def zeros(cls, grid: FourierGrid) -> "SpectralField":
        return cls(grid, np.zeros((grid.nx, grid.ny), dtype=complex))

    def to_physical(self) -> np.ndarray:
        phys = np.fft.ifft2(self.coeffs) / (self.grid.dx * self.grid.dy)
        return phys.real

    def hermitian_defect(self) -> float:
        """Relative deviation from coeffs(-k,-l) = conj(coeffs(k,l))."""
        c = self.coeffs
        flipped = c[(-np.arange(self.grid.nx)) % self.grid.nx][:, (-np.arange(self.grid.ny)) % self.grid.ny]
        scale = np.max(np.abs(c)) or 1.0
        return float(np.max(np.abs(flipped.conj() - c)) / scale)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermitian_defect() <= tol

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def mean_value(self) -> float:
        """Spatial mean = zero-mode coefficient / box area."""
        return float(self.coeffs[0, 0].real) / self.grid.area


def apply_multiplier(f: SpectralField, m) -> SpectralField:
    """Scale coefficients modewise by the symbol m(xi, eta).

    `m` is a callable receiving broadcastable wavenumber arrays (or a
    precomputed array).  Output is Hermitian-symmetric whenever the symbol
    satisfies m(-xi,-eta) = conj(m(xi,eta)).
    """
    g = f.grid
    values = m(g.XI, g.ETA) if callable(m) else np.asarray(m)
    values = np.broadcast_to(values, (g.nx, g.ny))
    populated = np.abs(f.coeffs) > 0
    if not np.all(np.isfinite(values[populated])):
        raise GridError("non-finite multiplier value at a populated mode")
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.where(populated, values * f.coeffs, 0.0)
    return SpectralField(g, np.ascontiguousarray(out))


def deriv_x(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * (1j * f.grid.xi_d[:, None]))


def deriv_y(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * (1j * f.grid.eta_d[None, :]))


def _smooth_step(r: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for r <= 0, 1 for r >= 1 (exp-based profile)."""
    r = np.clip(r, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ga = np.where(r > 0, np.exp(-1.0 / np.where(r > 0, r, 1.0)), 0.0)
        gb = np.where(r < 1, np.exp(-1.0 / np.where(r < 1, 1.0 - r, 1.0)), 0.0)
    return ga / (ga + gb)


def bump_chi(x: np.ndarray) -> np.ndarray:
    """Smooth radial bump: 1 on |x| <= 1, 0 on |x| >= 1 + 1e-4."""
    ax = np.abs(np.asarray(x, dtype=float))
    return _smooth_step((1.0 + _BUMP_DELTA - ax) / _BUMP_DELTA)


def lp_projector_symbol(grid: FourierGrid, N: float, kind: str) -> np.ndarray:
    A = grid.A
    if kind == "le":
        return bump_chi(A / N)
    if kind == "eq":
        return bump_chi(A / N) - bump_chi(A / (N / 2.0))
    if kind == "ge":
        return 1.0 - bump_chi(A / N)
    raise GridError(f"unknown projector kind {kind!r}; expected 'le', 'eq' or 'ge'")


def lp_project(f: SpectralField, N: float, kind: str = "le") -> SpectralField:
    """Smooth frequency cutoff at dyadic scale N ('le', 'eq' or 'ge')."""
    if N <= 0:
        raise GridError("projector scale N must be positive")
    return SpectralField(f.grid, f.coeffs * lp_projector_symbol(f.grid, N, kind))


def homog_weight(grid: FourierGrid, s: float) -> np.ndarray:
    """|grad|^s symbol on the grid with the zero mode sent to 0 (s > 0)."""
    return _weight(grid, s, "homogeneous")


def _weight(grid: FourierGrid, s: float, homogeneity: str) -> np.ndarray:
    A = grid.A
    if homogeneity == "inhomogeneous":
        return (1.0 + A * A) ** (0.5 * s)
    if homogeneity != "homogeneous":
        raise GridError(f"unknown homogeneity {homogeneity!r}")
    with np.errstate(divide="ignore"):
        w = np.where(A > 0, A, 1.0) ** s
    if s > 0:
        w[0, 0] = 0.0
    elif s == 0:
        w[0, 0] = 1.0
    else:
        w[0, 0] = np.inf
    return w


def sobolev_norm(f: SpectralField, s: float, homogeneity: str = "inhomogeneous",
                 p: int = 2) -> float:
    """Norm of <grad>^s f (or |grad|^s f) in L^2 or L^infinity.

    L^2 is evaluated on the Fourier side by Parseval with compensated
    summation; L^infinity transforms back and takes the max.
    """
    w = _weight(f.grid, s, homogeneity)
    if homogeneity == "homogeneous" and s < 0 and abs(f.coeffs[0, 0]) > 1e-13 * (
        1.0 + np.max(np.abs(f.coeffs))
    ):
        raise GridError("homogeneous-symbol-singularity: |grad|^s with s<0 on nonzero mean mode")
    wc = np.where(np.isfinite(w), w, 0.0) * f.coeffs
    if p == 2:
        return math.sqrt(fsum(np.abs(wc) ** 2) / f.grid.area)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(SpectralField(f.grid, wc).to_physical())))
    raise GridError(f"unsupported p={p}; expected 2 or inf")


def l2_norm(f: SpectralField) -> float:
    return sobolev_norm(f, 0.0)


def l1_norm(f: SpectralField) -> float:
    """Physical-space L^1 norm by cell quadrature."""
    return f.grid.dx * f.grid.dy * fsum(np.abs(f.to_physical()))


def mixed_norm_L2x_Linfy(f: SpectralField) -> float:
    """|| sup_y |f| ||_{L^2_x}: per x-column sup, then discrete L^2 in x."""
    phys = f.to_physical()
    col_sup = np.max(np.abs(phys), axis=1)
    return math.sqrt(f.grid.dx * fsum(col_sup**2))


@dataclass(frozen=True)
class PerturbationState:
    """The perturbation 4-tuple (density, velocity, stream potential)."""

    n: SpectralField
    u: SpectralField
    v: SpectralField
    psi: SpectralField

    def __post_init__(self):
        g = self.n.grid
        for f in (self.u, self.v, self.psi):
            if f.grid is not g and (f.grid.nx, f.grid.ny, f.grid.Lx, f.grid.Ly) != (
                g.nx, g.ny, g.Lx, g.Ly
            ):
                raise GridError("all four fields must share one grid")

    @property
    def grid(self) -> FourierGrid:
        return self.n.grid

    @property
    def fields(self):
        return (self.n, self.u, self.v, self.psi)

    @classmethod
    def zeros(cls, grid: FourierGrid) -> "PerturbationState":
        z = SpectralField.zeros(grid)
        return cls(z, z, z, z)

    def stack(self) -> np.ndarray:
        """Coefficients as one (4, nx, ny) complex array."""
        return np.stack([f.coeffs for f in self.fields])

    @classmethod
    def from_stack(cls, grid: FourierGrid, coeffs: np.ndarray) -> "PerturbationState":
        return cls(*(SpectralField(grid, np.ascontiguousarray(c)) for c in coeffs))

    def scaled(self, factor: float) -> "PerturbationState":
        return PerturbationState(*(f * factor for f in self.fields))


# X-norm summands: entry name -> (time-weight exponent, description).
X_ENTRY_WEIGHTS = {
    "n:HM_L2": -1.0,        # exponent -eps, resolved at runtime
    "n:H3_L2": 0.25,
    "n:H3half_inf": 0.5,
    "n:dx_H1_L2": 0.75,
    "u:HM_L2": -1.0,
    "u:L2": 0.5,
    "u:H1_inf": 1.0,
    "v:L2xLinfy": 0.75,
    "u:hgamma_L2": 0.75,
    "u:dx_H1_L2": 1.0,
    "v:grad_H1_L2": 1.0,
    "psi:HM_grad_L2": -1.0,
    "psi:H4hgamma_L2": 0.25,
    "psi:dx_L2": 0.5,
    "psi:dx_grad_L2": 0.75,
    "psi:hgammabar_H1_inf": 0.5,
}


@dataclass(frozen=True)
class XNormBreakdown:
    """Every summand of the working-space norms at one time, unweighted.

    `entries` hold the raw norms; `weights` hold the time-weight exponents so
    that the weighted summand is <t>^weights[k] * entries[k].  Slope fits act
    on the raw entries.
    """

    t: float
    entries: dict
    weights: dict
    M: int
    eps: float
    gamma: float
    gamma_bar: float

    def weighted(self, name: str) -> float:
        return (1.0 + self.t**2) ** (self.weights[name] / 2.0) * self.entries[name]


def _check_x_params(M: int, eps: float, gamma: float, gamma_bar: float) -> None:
    if not (0.5 < gamma <= 1.0):
        raise GridError(f"gamma={gamma} outside (1/2, 1]")
    if not (gamma / 2.0 < gamma_bar < 1.0 + gamma / 2.0):
        raise GridError(f"gamma_bar={gamma_bar} outside (gamma/2, 1+gamma/2)")
    if M < 8:
        raise GridError(f"M={M} below 8")
    if eps <= 0:
        raise GridError(f"eps={eps} must be positive")


def x_norm_snapshot(state: PerturbationState, t: float, M: int = 8, eps: float = 0.01,
                    gamma: float = 0.75, gamma_bar: float = 1.0) -> XNormBreakdown:
    """Evaluate every summand of the three working-space norms at time t."""
    _check_x_params(M, eps, gamma, gamma_bar)
    n, u, v, psi = state.fields
    g = state.grid
    inf = np.inf

    def vec_l2(*vals):
        return math.sqrt(fsum([x * x for x in vals]))

    dxu = deriv_x(u)
    dxn = deriv_x(n)
    dxpsi = deriv_x(psi)
    grad_psi = (deriv_x(psi), deriv_y(psi))
    grad_v = (deriv_x(v), deriv_y(v))

    entries = {
        "n:HM_L2": sobolev_norm(n, M),
        "n:H3_L2": sobolev_norm(n, 3),
        "n:H3half_inf": sobolev_norm(n, 1.5, p=inf),
        "n:dx_H1_L2": sobolev_norm(dxn, 1),
        "u:HM_L2": vec_l2(sobolev_norm(u, M), sobolev_norm(v, M)),
        "u:L2": vec_l2(l2_norm(u), l2_norm(v)),
        "u:H1_inf": max(sobolev_norm(u, 1, p=inf), sobolev_norm(v, 1, p=inf)),
        "v:L2xLinfy": mixed_norm_L2x_Linfy(v),
        "u:hgamma_L2": vec_l2(sobolev_norm(u, gamma, "homogeneous"),
                              sobolev_norm(v, gamma, "homogeneous")),
        "u:dx_H1_L2": sobolev_norm(dxu, 1),
        "v:grad_H1_L2": vec_l2(*(sobolev_norm(d, 1) for d in grad_v)),
        "psi:HM_grad_L2": vec_l2(*(sobolev_norm(d, M) for d in grad_psi)),
        "psi:H4hgamma_L2": sobolev_norm(apply_multiplier(psi, homog_weight(g, gamma)), 4),
        "psi:dx_L2": l2_norm(dxpsi),
        "psi:dx_grad_L2": vec_l2(l2_norm(deriv_x(dxpsi)), l2_norm(deriv_y(dxpsi))),
        "psi:hgammabar_H1_inf": sobolev_norm(
            apply_multiplier(psi, homog_weight(g, gamma_bar)), 1, p=inf),
    }
    weights = dict(X_ENTRY_WEIGHTS)
    for k, w in weights.items():
        if w == -1.0:
            weights[k] = -eps
    return XNormBreakdown(t=float(t), entries=entries, weights=weights,
                          M=M, eps=eps, gamma=gamma, gamma_bar=gamma_bar)


def save_field(f: SpectralField, path, name: str = "field", time: float = 0.0) -> None:
    """Write raw little-endian float64 physical values (x fastest) + sidecar."""
    path = Path(path)
    phys = f.to_physical()
    # transpose so the row-major byte stream iterates y outer, x inner
    path.with_suffix(".bin").write_bytes(np.ascontiguousarray(phys.T).astype("<f8").tobytes())
    sidecar = {"nx": f.grid.nx, "ny": f.grid.ny, "Lx": f.grid.Lx, "Ly": f.grid.Ly,
               "name": name, "time": time}
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")


def load_field(path) -> tuple[SpectralField, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    raw = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<f8")
    grid = make_grid(meta["nx"], meta["ny"], meta["Lx"], meta["Ly"])
    phys = raw.reshape(meta["ny"], meta["nx"]).T
    return SpectralField.from_physical(grid, phys), meta
