"""Position-space synthesis for the 1D bases, expectation-value series,
the box phase-space (Wigner) distribution, and space-time probability
rasters with their traveling-wave decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .dynamics import reduced_phase
from .errors import DomainError
from .packets import CoefficientSet, bouncer_norm, _simpson_weights
from .serialize import write_grid_csv, write_pgm
from .spectra import DEFAULT_UNITS, UnitSystem


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("axis needs at least 2 samples")
        if not self.lo < self.hi:
            raise DomainError("axis needs lo < hi")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class FieldGrid:
    """Values on a rectangular lattice; values[i, j] pairs axis1 point i
    with axis2 point j."""

    axis1: AxisSpec
    axis2: AxisSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.axis1.count, self.axis2.count):
            raise DomainError("grid shape must match the axis counts")
        object.__setattr__(self, "values", v)

    def to_csv(self, path) -> None:
        write_grid_csv(path, self.axis1, self.axis2, self.values)

    def to_pgm(self, path) -> None:
        # rows scan axis2 (e.g. time), columns axis1
        write_pgm(path, np.real(self.values).T)


@dataclass(frozen=True)
class ObservableSeries:
    times: np.ndarray
    mean_x: np.ndarray
    sd_x: np.ndarray
    mean_p: np.ndarray
    sd_p: np.ndarray


# ----------------------------------------------------------------------
# Bases
# ----------------------------------------------------------------------

class InfiniteWellBasis:
    """Box eigenstates sqrt(2/L) sin(n pi x / L) with E_n = (n pi hbar/L)^2 / 2m.

    Position / momentum matrix elements come from the standard closed
    forms in the sine basis (validated against quadrature in the tests).
    """

    def __init__(self, L: float = 1.0, units: UnitSystem = DEFAULT_UNITS):
        self.L = L
        self.units = units

    def energies(self, n: np.ndarray) -> np.ndarray:
        u = self.units
        return (np.asarray(n, dtype=float) * math.pi * u.hbar / self.L) ** 2 / (2 * u.mass)

    def functions(self, n: np.ndarray, x: np.ndarray) -> np.ndarray:
        # rows: states, columns: positions
        nn = np.asarray(n, dtype=float)[:, None]
        return np.sqrt(2.0 / self.L) * np.sin(nn * math.pi * x[None, :] / self.L)

    def x_matrix(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=int)
        m = n[:, None]
        k = n[None, :]
        diff = m - k
        summ = m + k
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (self.L / math.pi**2) * (
                (np.where(diff % 2 == 0, 0.0, -2.0)) / np.where(diff == 0, 1, diff) ** 2
                - (np.where(summ % 2 == 0, 0.0, -2.0)) / summ**2
            )
        np.fill_diagonal(val, self.L / 2.0)
        return val

    def x2_matrix(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=int)
        m = n[:, None]
        k = n[None, :]
        diff = m - k
        summ = m + k

        def piece(kk):
            # (1/L) * integral x^2 cos(kk pi x / L) dx over (0, L)
            out = np.where(kk % 2 == 0, 2.0, -2.0) * self.L**2 / (math.pi**2)
            return out / np.where(kk == 0, 1, kk) ** 2

        val = piece(diff) - piece(summ)
        np.fill_diagonal(val, self.L**2 / 3.0 - self.L**2 / (2.0 * math.pi**2 * n.astype(float) ** 2))
        return val

    def p_matrix(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=int)
        m = n[:, None].astype(float)
        k = n[None, :].astype(float)
        odd = (n[:, None] - n[None, :]) % 2 == 1
        with np.errstate(divide="ignore", invalid="ignore"):
            val = -1j * self.units.hbar * 4.0 * m * k / (self.L * (m**2 - k**2))
        return np.where(odd, val, 0.0)

    def p2_diagonal(self, n: np.ndarray) -> np.ndarray:
        return (np.asarray(n, dtype=float) * math.pi * self.units.hbar / self.L) ** 2

    def momentum_transform(self, n: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Momentum-space eigenfunctions (rows: states), i.e. the Fourier
        transform of the sine modes over (0, L)."""
        hbar = self.units.hbar
        kn = np.asarray(n, dtype=float)[:, None] * math.pi / self.L
        q = p[None, :] / hbar
        pref = np.sqrt(2.0 / self.L) / math.sqrt(2.0 * math.pi * hbar)
        sign = np.where(np.asarray(n, dtype=int)[:, None] % 2 == 0, 1.0, -1.0)
        num = 1.0 - sign * np.exp(-1j * q * self.L)
        den = kn**2 - q**2
        small = np.abs(den) < 1e-9 * kn**2
        with np.errstate(divide="ignore", invalid="ignore"):
            val = pref * kn * num / den
        if np.any(small):
            # the q -> +-kn points are removable; settle them by quadrature
            x = np.linspace(0.0, self.L, 2049)
            w = _simpson_weights(x)
            for i, j in np.argwhere(small):
                u = math.sqrt(2.0 / self.L) * np.sin(kn[i, 0] * x)
                val[i, j] = np.sum(w * u * np.exp(-1j * q[0, j] * x)) / math.sqrt(
                    2.0 * math.pi * hbar
                )
        return val


class BouncerBasis:
    """Airy eigenstates of the linear-potential-plus-wall system; matrix
    elements by quadrature."""

    def __init__(self, F: float = 1.0, units: UnitSystem = DEFAULT_UNITS, z_max: float | None = None):
        self.F = F
        self.units = units
        self.rho = (units.hbar**2 / (2.0 * units.mass * F)) ** (1.0 / 3.0)
        self.z_max = z_max

    def energies(self, n: np.ndarray) -> np.ndarray:
        scale = (self.units.hbar**2 * self.F**2 / (2.0 * self.units.mass)) ** (1.0 / 3.0)
        return scale * np.array([specfun.airy_zero(int(k)).value for k in np.asarray(n)])

    def _grid(self, n: np.ndarray) -> np.ndarray:
        top = self.z_max
        if top is None:
            y_top = specfun.airy_zero(int(np.max(n))).value
            top = self.rho * (y_top + 14.0)
        return np.linspace(0.0, top, 8193)

    def functions(self, n: np.ndarray, x: np.ndarray) -> np.ndarray:
        rows = []
        for k in np.asarray(n):
            y = specfun.airy_zero(int(k)).value
            rows.append(bouncer_norm(int(k), self.rho) * specfun.airy_ai(x / self.rho - y))
        return np.array(rows)

    def x_matrix(self, n: np.ndarray) -> np.ndarray:
        z = self._grid(n)
        w = _simpson_weights(z)
        u = self.functions(n, z)
        return (u * w * z) @ u.T

    def x2_matrix(self, n: np.ndarray) -> np.ndarray:
        z = self._grid(n)
        w = _simpson_weights(z)
        u = self.functions(n, z)
        return (u * w * z**2) @ u.T

    def p_matrix(self, n: np.ndarray) -> np.ndarray:
        z = self._grid(n)
        w = _simpson_weights(z)
        u = self.functions(n, z)
        du = []
        for k in np.asarray(n):
            y = specfun.airy_zero(int(k)).value
            du.append(
                bouncer_norm(int(k), self.rho)
                * specfun.airy_ai_prime(z / self.rho - y)
                / self.rho
            )
        du = np.array(du)
        return -1j * self.units.hbar * (u * w) @ du.T

    def p2_diagonal(self, n: np.ndarray) -> np.ndarray:
        # <p^2> = 2m (E_n - F <z>_nn)
        x_nn = np.diag(self.x_matrix(n))
        return 2.0 * self.units.mass * (self.energies(n) - self.F * x_nn)


def _basis_indices(c: CoefficientSet, basis) -> np.ndarray:
    n = c.indices
    lo = 1 if isinstance(basis, InfiniteWellBasis) else 0
    if np.any(n < lo):
        raise DomainError("coefficient indices are not valid for this basis")
    return n


def psi_xt(c: CoefficientSet, basis, x_grid, t: float) -> np.ndarray:
    """psi(x, t) = sum_n a_n u_n(x) e^{-i E_n t / hbar} on the grid."""
    n = _basis_indices(c, basis)
    x = np.asarray(x_grid, dtype=float)
    u = basis.functions(n, x)
    omegas = basis.energies(n) / basis.units.hbar
    phases = np.exp(-1j * reduced_phase(omegas, float(t)))
    return (c.coefficients * phases) @ u


def observables(c: CoefficientSet, basis, t_grid) -> ObservableSeries:
    """Expectation values and spreads of position and momentum over time,
    from basis matrix elements."""
    n = _basis_indices(c, basis)
    xm = basis.x_matrix(n)
    x2m = basis.x2_matrix(n)
    pm = basis.p_matrix(n)
    p2d = basis.p2_diagonal(n)
    omegas = basis.energies(n) / basis.units.hbar
    t_grid = np.asarray(t_grid, dtype=float)
    mean_x = np.empty(len(t_grid))
    sd_x = np.empty(len(t_grid))
    mean_p = np.empty(len(t_grid))
    sd_p = np.empty(len(t_grid))
    w = c.weights()
    p2 = float(np.real(np.sum(w * p2d)))
    for i, t in enumerate(t_grid):
        a = c.coefficients * np.exp(-1j * reduced_phase(omegas, float(t)))
        mean_x[i] = np.real(np.conj(a) @ xm @ a)
        x2 = np.real(np.conj(a) @ x2m @ a)
        sd_x[i] = math.sqrt(max(x2 - mean_x[i] ** 2, 0.0))
        mean_p[i] = np.real(np.conj(a) @ pm @ a)
        sd_p[i] = math.sqrt(max(p2 - mean_p[i] ** 2, 0.0))
    return ObservableSeries(t_grid, mean_x, sd_x, mean_p, sd_p)


def momentum_density(c: CoefficientSet, basis: InfiniteWellBasis, p_grid, t: float) -> np.ndarray:
    """|phi(p, t)|^2 from the analytic sine-basis transforms (no FFT
    windowing artifacts)."""
    n = _basis_indices(c, basis)
    p = np.asarray(p_grid, dtype=float)
    transform = basis.momentum_transform(n, p)
    omegas = basis.energies(n) / basis.units.hbar
    phases = np.exp(-1j * reduced_phase(omegas, float(t)))
    phi = (c.coefficients * phases) @ transform
    return np.abs(phi) ** 2


# ----------------------------------------------------------------------
# Box Wigner distribution
# ----------------------------------------------------------------------

def wigner_term(m: int, n: int, L: float, x, p, hbar: float = 1.0) -> np.ndarray:
    """Closed-form W^{(m,n)}(x, p) for box modes. The mirror substitution
    x -> L - x on the right half applies only to the integration-generated
    sine factors, not the plane-wave prefactors."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    xt = np.minimum(x, L - x)[:, None]  # mirrored coordinate
    xx = x[:, None]
    pp = p[None, :]

    def sinc_factor(d):
        # sin(d * xt / L) / d with the d -> 0 limit xt / L
        d = np.asarray(d, dtype=float)
        small = np.abs(d) < 1e-12
        dd = np.where(small, 1.0, d)
        return np.where(small, xt / L, np.sin(dd * xt / L) / dd)

    base = 2.0 * pp * L / hbar
    s1 = sinc_factor(base + (m + n) * math.pi)
    s2 = sinc_factor(base - (m + n) * math.pi)
    s3 = sinc_factor(base + (m - n) * math.pi)
    s4 = sinc_factor(base - (m - n) * math.pi)
    ph_diff = np.exp(1j * (m - n) * math.pi * xx / L)
    ph_sum = np.exp(1j * (m + n) * math.pi * xx / L)
    return (
        ph_diff * s1 + np.conj(ph_diff) * s2 - ph_sum * s3 - np.conj(ph_sum) * s4
    ) / (math.pi * hbar)


def default_momentum_span(p0: float, dp0: float) -> float:
    """Half-width of the momentum grid: 3 * (|p0| + 5 dp0)."""
    return 3.0 * (abs(p0) + 5.0 * dp0)


def wigner_infinite_well(
    c: CoefficientSet,
    L: float,
    x_grid,
    p_grid,
    t: float,
    units: UnitSystem = DEFAULT_UNITS,
) -> FieldGrid:
    """Phase-space quasiprobability W(x, p; t) of a box packet, assembled
    from the closed-form mode terms over all retained index pairs."""
    x = np.asarray(x_grid, dtype=float)
    p = np.asarray(p_grid, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= L):
        raise DomainError("x grid must lie strictly inside the box")
    basis = InfiniteWellBasis(L, units)
    n = _basis_indices(c, basis)
    omegas = basis.energies(n) / units.hbar
    phases = np.exp(-1j * reduced_phase(omegas, float(t)))
    a_t = c.coefficients * phases
    total = np.zeros((len(x), len(p)), dtype=complex)
    for i, m in enumerate(n):
        coeff_m = np.conj(a_t[i])
        term = wigner_term(int(m), int(m), L, x, p, units.hbar)
        total += (coeff_m * a_t[i]) * term
        for j in range(i + 1, len(n)):
            term = wigner_term(int(m), int(n[j]), L, x, p, units.hbar)
            # W^{(n,m)} = conj(W^{(m,n)}): add the Hermitian partner
            total += 2.0 * np.real(coeff_m * a_t[j] * term)
    max_imag = float(np.max(np.abs(total.imag)))
    if max_imag > 1e-10:
        raise DomainError(f"assembled distribution has imaginary residue {max_imag:.2e}")
    ax1 = AxisSpec("x", float(x[0]), float(x[-1]), len(x))
    ax2 = AxisSpec("p", float(p[0]), float(p[-1]), len(p))
    return FieldGrid(ax1, ax2, total.real)


def wigner_marginals(grid: FieldGrid, taper_fraction: float = 0.12) -> tuple[np.ndarray, np.ndarray]:
    """(position marginal, momentum marginal) by trapezoid integration
    over the grid axes.

    The momentum integration is cosine-tapered over the outer fraction of
    the axis: the hard-wall distribution carries conditionally-convergent
    oscillatory 1/p tails, and the smooth truncation averages them out.
    The bias is negligible when the grid spans the packet's momentum
    support.
    """
    x = grid.axis1.points()
    p = grid.axis2.points()
    window = np.ones(len(p))
    k = int(taper_fraction * len(p))
    if k > 1:
        ramp = 0.5 * (1.0 + np.cos(np.linspace(0.0, math.pi, k)))
        window[-k:] = ramp
        window[:k] = ramp[::-1]
    pos = np.trapezoid(grid.values * window[None, :], p, axis=1)
    mom = np.trapezoid(grid.values, x, axis=0)
    return pos, mom


# ----------------------------------------------------------------------
# Space-time rasters
# ----------------------------------------------------------------------

def carpet(
    c: CoefficientSet,
    L: float,
    x_count: int,
    t_count: int,
    t_hi: float,
    units: UnitSystem = DEFAULT_UNITS,
) -> tuple[FieldGrid, FieldGrid, FieldGrid]:
    """(total, traveling/classical, interference/quantum) probability
    rasters on (0, L) x (0, t_hi).

    The split groups the double sum into co-moving terms (frequencies
    n - m) and counter-moving terms (frequencies n + m); the two parts
    recombine to |psi|^2 identically.
    """
    if x_count < 64 or t_count < 64:
        raise DomainError("raster needs at least 64 x 64 samples")
    basis = InfiniteWellBasis(L, units)
    n = _basis_indices(c, basis).astype(float)
    x = np.linspace(0.0, L, x_count)
    ts = np.linspace(0.0, t_hi, t_count)
    omegas = basis.energies(n) / units.hbar
    xi = math.pi * np.outer(n, x) / L  # (N, X)
    e_plus = np.exp(1j * xi)
    cls = np.empty((x_count, t_count))
    qc = np.empty((x_count, t_count))
    for j, t in enumerate(ts):
        phases = np.exp(-1j * reduced_phase(omegas, float(t)))
        a_t = c.coefficients * phases
        w_plus = a_t @ e_plus
        w_minus = a_t @ np.conj(e_plus)
        cls[:, j] = (np.abs(w_plus) ** 2 + np.abs(w_minus) ** 2) / (2.0 * L)
        qc[:, j] = -np.real(w_plus * np.conj(w_minus)) / L
    ax1 = AxisSpec("x", 0.0, L, x_count)
    ax2 = AxisSpec("t", 0.0, t_hi, t_count)
    return (
        FieldGrid(ax1, ax2, cls + qc),
        FieldGrid(ax1, ax2, cls),
        FieldGrid(ax1, ax2, qc),
    )
