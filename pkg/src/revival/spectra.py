"""Energy-level models for the 1D systems, with analytic derivatives in a
continuous quantum number, and the classical / revival / superrevival time
scale extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DomainError


@dataclass(frozen=True)
class UnitSystem:
    """Mechanical units. Defaults follow the common nominal choice
    hbar = 1, 2m = 1, L = 1."""

    hbar: float = 1.0
    mass: float = 0.5
    length: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0 or self.length <= 0:
            raise DomainError("unit constants must be strictly positive")


DEFAULT_UNITS = UnitSystem()


@dataclass(frozen=True)
class TimeScales:
    """Characteristic times from successive derivatives of E(n); a
    component is +inf when the corresponding derivative vanishes."""

    t_classical: float
    t_revival: float
    t_super: float


_MODELS = (
    "AnharmonicPoly",
    "InfiniteWell",
    "PowerLawWKB",
    "BouncerWKB",
    "BouncerAiry",
    "Rotor2D",
    "PendulumLowEnergy",
    "Harmonic",
    "CoulombRydberg",
)

# Classical period coefficient for hydrogen-like levels, seconds * n^-3.
RYDBERG_PERIOD_SECONDS = 1.52e-16


@dataclass(frozen=True)
class Spectrum1D:
    """An energy-eigenvalue model E(n) with analytic derivatives
    (tabulated for BouncerAiry). Immutable after construction."""

    model: str
    params: dict = field(default_factory=dict)
    units: UnitSystem = DEFAULT_UNITS

    def __post_init__(self):
        if self.model not in _MODELS:
            raise DomainError(f"unknown spectrum model {self.model!r}")
        object.__setattr__(self, "params", dict(self.params))

    # -- factories ------------------------------------------------------

    @staticmethod
    def anharmonic(alpha: float, beta: float, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        """E(n) = 2*pi*(n - alpha n^2/2 + beta n^3/6)."""
        return Spectrum1D("AnharmonicPoly", {"alpha": alpha, "beta": beta}, units)

    @staticmethod
    def case_a(units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D.anharmonic(1.0 / 800.0, 0.0, units)

    @staticmethod
    def case_b(units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D.anharmonic(1.0 / 800.0, 2.0e-6, units)

    @staticmethod
    def infinite_well(L: float = 1.0, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D("InfiniteWell", {"L": L}, units)

    @staticmethod
    def bouncer_wkb(F: float = 1.0, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D("BouncerWKB", {"F": F}, units)

    @staticmethod
    def bouncer_airy(F: float = 1.0, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D("BouncerAiry", {"F": F}, units)

    @staticmethod
    def rotor(inertia: float, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D("Rotor2D", {"inertia": inertia}, units)

    @staticmethod
    def pendulum(inertia: float, V0: float = 0.0, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        """Free-rotor kinetic ladder plus the quadratic low-energy
        correction hbar^2 (2n^2 + 2n + 1)/(32 I); the optional V0 adds the
        harmonic ladder sqrt(V0/I)*hbar*(n + 1/2)."""
        return Spectrum1D("PendulumLowEnergy", {"inertia": inertia, "V0": V0}, units)

    @staticmethod
    def harmonic(omega: float, units: UnitSystem = DEFAULT_UNITS) -> "Spectrum1D":
        return Spectrum1D("Harmonic", {"omega": omega}, units)

    @staticmethod
    def rydberg(units: UnitSystem = DEFAULT_UNITS, r_eff: float | None = None) -> "Spectrum1D":
        """E(n) = -R_eff / n^2. The default R_eff makes the classical
        period exactly 1.52e-16 s * n^3 when times are read in seconds."""
        if r_eff is None:
            r_eff = math.pi * units.hbar / RYDBERG_PERIOD_SECONDS
        return Spectrum1D("CoulombRydberg", {"r_eff": r_eff}, units)

    # -- evaluation ------------------------------------------------------

    @property
    def ground_index(self) -> float:
        return {"InfiniteWell": 1.0, "CoulombRydberg": 1.0}.get(self.model, 0.0)

    def _derivs(self, n: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        u = self.units
        p = self.params
        if self.model == "AnharmonicPoly":
            a, b = p["alpha"], p["beta"]
            e = 2 * np.pi * (n - a * n**2 / 2 + b * n**3 / 6)
            e1 = 2 * np.pi * (1 - a * n + b * n**2 / 2)
            e2 = 2 * np.pi * (-a + b * n)
            e3 = 2 * np.pi * b * np.ones_like(n)
        elif self.model == "InfiniteWell":
            e0 = u.hbar**2 * np.pi**2 / (2 * u.mass * p["L"] ** 2)
            e = e0 * n**2
            e1 = 2 * e0 * n
            e2 = 2 * e0 * np.ones_like(n)
            e3 = np.zeros_like(n)
        elif self.model == "PowerLawWKB":
            scale, c, expo = p["scale"], p["offset"], p["exponent"]
            base = n + c
            e = scale * base**expo
            e1 = scale * expo * base ** (expo - 1)
            e2 = scale * expo * (expo - 1) * base ** (expo - 2)
            e3 = scale * expo * (expo - 1) * (expo - 2) * base ** (expo - 3)
        elif self.model == "BouncerWKB":
            scale = (u.hbar**2 * p["F"] ** 2 / (2 * u.mass)) ** (1.0 / 3.0)
            base = 1.5 * np.pi * (n + 0.75)
            e = scale * base ** (2.0 / 3.0)
            d = 1.5 * np.pi
            e1 = scale * (2.0 / 3.0) * d * base ** (-1.0 / 3.0)
            e2 = -scale * (2.0 / 9.0) * d**2 * base ** (-4.0 / 3.0)
            e3 = scale * (8.0 / 27.0) * d**3 * base ** (-7.0 / 3.0)
        elif self.model == "BouncerAiry":
            return self._tabulated_derivs(n)
        elif self.model == "Rotor2D":
            c = u.hbar**2 / (2 * p["inertia"])
            e = c * n**2
            e1 = 2 * c * n
            e2 = 2 * c * np.ones_like(n)
            e3 = np.zeros_like(n)
        elif self.model == "PendulumLowEnergy":
            inertia = p["inertia"]
            c = u.hbar**2 / (32 * inertia)
            omega0 = math.sqrt(p["V0"] / inertia) if p.get("V0", 0.0) > 0 else 0.0
            e = u.hbar * omega0 * (n + 0.5) + c * (2 * n**2 + 2 * n + 1)
            e1 = u.hbar * omega0 + c * (4 * n + 2)
            e2 = 4 * c * np.ones_like(n)
            e3 = np.zeros_like(n)
        elif self.model == "Harmonic":
            w = p["omega"]
            e = u.hbar * w * (n + 0.5)
            e1 = u.hbar * w * np.ones_like(n)
            e2 = np.zeros_like(n)
            e3 = np.zeros_like(n)
        elif self.model == "CoulombRydberg":
            r = p["r_eff"]
            e = -r / n**2
            e1 = 2 * r / n**3
            e2 = -6 * r / n**4
            e3 = 24 * r / n**5
        else:  # pragma: no cover
            raise DomainError(self.model)
        return e, e1, e2, e3

    def frequency_polynomial(self) -> list[float] | None:
        """Coefficients g_j with E(n)/(2 pi hbar) = sum_j g_j n^j for the
        polynomial-in-n models, or None. Used for cycle-exact phase
        reduction in long-time overlap sums."""
        u = self.units
        p = self.params
        if self.model == "AnharmonicPoly":
            return [0.0, 1.0 / u.hbar, -p["alpha"] / (2.0 * u.hbar), p["beta"] / (6.0 * u.hbar)]
        if self.model == "InfiniteWell":
            g2 = u.hbar * math.pi / (4.0 * u.mass * p["L"] ** 2)
            return [0.0, 0.0, g2, 0.0]
        if self.model == "Rotor2D":
            return [0.0, 0.0, u.hbar / (4.0 * math.pi * p["inertia"]), 0.0]
        if self.model == "PendulumLowEnergy":
            c = u.hbar / (32.0 * math.pi * p["inertia"])
            w0 = math.sqrt(p["V0"] / p["inertia"]) if p.get("V0", 0.0) > 0 else 0.0
            return [0.5 * c + w0 / (4.0 * math.pi), c + w0 / (2.0 * math.pi), c, 0.0]
        if self.model == "Harmonic":
            w = p["omega"] / (2.0 * math.pi)
            return [0.5 * w, w, 0.0, 0.0]
        return None

    def _tabulated_derivs(self, n):
        u = self.units
        scale = (u.hbar**2 * self.params["F"] ** 2 / (2 * u.mass)) ** (1.0 / 3.0)
        out = []
        for x in np.atleast_1d(n):
            c = int(round(float(x)))
            c = max(c, 2)
            y = np.array([specfun.airy_zero(c + j).value for j in range(-2, 3)])
            e = scale * float(np.interp(float(x), np.arange(c - 2, c + 3), y))
            # 5-point central differences with unit step at the rounded index
            e1 = scale * (y[0] - 8 * y[1] + 8 * y[3] - y[4]) / 12.0
            e2 = scale * (-y[0] + 16 * y[1] - 30 * y[2] + 16 * y[3] - y[4]) / 12.0
            e3 = scale * (-y[0] + 2 * y[1] - 2 * y[3] + y[4]) / 2.0
            out.append((e, e1, e2, e3))
        arr = np.array(out)
        return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


def eval_energy(s: Spectrum1D, n) -> float | np.ndarray:
    """E(n); n may be a real scalar or array (continuous index)."""
    narr = np.asarray(n, dtype=float)
    if np.any(narr < s.ground_index - 1e-12):
        raise DomainError(f"index below ground index {s.ground_index} for {s.model}")
    scalar = narr.ndim == 0
    if s.model == "BouncerAiry" and scalar and float(narr) == round(float(narr)):
        u = s.units
        scale = (u.hbar**2 * s.params["F"] ** 2 / (2 * u.mass)) ** (1.0 / 3.0)
        return scale * specfun.airy_zero(int(round(float(narr)))).value
    e, _, _, _ = s._derivs(np.atleast_1d(narr))
    return float(e[0]) if scalar else e


def energy_derivatives(s: Spectrum1D, n0: float) -> tuple[float, float, float, float]:
    """(E, E', E'', E''') at the continuous index n0."""
    if n0 < s.ground_index - 1e-12:
        raise DomainError(f"index below ground index {s.ground_index} for {s.model}")
    e, e1, e2, e3 = s._derivs(np.atleast_1d(float(n0)))
    return float(e[0]), float(e1[0]), float(e2[0]), float(e3[0])


def time_scales(s: Spectrum1D, n0: float) -> TimeScales:
    """2*pi*hbar over |E'|, |E''|/2, |E'''|/6; +inf for vanishing
    derivatives (relative to the local energy scale, to suppress
    floating-point noise)."""
    e, e1, e2, e3 = energy_derivatives(s, n0)
    hbar = s.units.hbar
    floor = 1e-14 * max(abs(e), abs(e1), 1e-300)

    def scale_for(d):
        return math.inf if abs(d) <= floor else 2 * math.pi * hbar / abs(d)

    return TimeScales(
        t_classical=scale_for(e1),
        t_revival=scale_for(e2 / 2.0),
        t_super=scale_for(e3 / 6.0),
    )


def power_law_ratios(k: float, n0: float) -> tuple[float, float]:
    """For a |x|^k potential: (T_rev/T_cl, T_super/T_rev) at index n0.

    Pass k = math.inf for the hard-wall limit. The first ratio diverges
    at k = 2 (harmonic case).
    """
    if math.isinf(k):
        return 2.0 * n0, math.inf
    if k == 2:
        return math.inf, 3.0 * (k + 2.0) * n0 / 4.0
    rev_over_cl = 2.0 * abs((k + 2.0) / (k - 2.0)) * n0
    super_over_rev = 3.0 * (k + 2.0) * n0 / 4.0
    return rev_over_cl, super_over_rev


def power_law_spectrum(
    k: float,
    V0: float,
    L: float,
    units: UnitSystem = DEFAULT_UNITS,
    hard_wall: bool | None = None,
) -> Spectrum1D:
    """WKB levels of V(x) = V0 |x/L|^k: E_n = scale * (n + cL + cR)^(2k/(k+2)).

    Matching constants are 1/4 per smooth turning point, 1/2 per hard
    wall; `hard_wall` defaults to true only in the k = inf limit. For the
    attractive scaling mode k = -1 the energy scale is -V0 (Rydberg-like),
    exponent -2.
    """
    if k == -2:
        raise DomainError("exponent k = -2 has a singular index power")
    if not (k > 0 or k == -1 or math.isinf(k)):
        raise DomainError("k must be positive, infinite, or the scaling mode -1")
    if V0 <= 0 or L <= 0:
        raise DomainError("V0 and L must be positive")
    if hard_wall is None:
        hard_wall = math.isinf(k)
    offset = 1.0 if hard_wall else 0.5
    if math.isinf(k):
        exponent = 2.0
        scale = (math.pi * units.hbar / (2 * L * math.sqrt(2 * units.mass))) ** 2
    elif k == -1:
        exponent = -2.0
        scale = -V0
    else:
        exponent = 2.0 * k / (k + 2.0)
        gammas = math.gamma(1.0 / k + 1.5) / (math.gamma(1.0 / k + 1.0) * math.gamma(1.5))
        scale = (
            math.pi * units.hbar / (2 * L * math.sqrt(2 * units.mass)) * V0 ** (1.0 / k) * gammas
        ) ** exponent
    return Spectrum1D(
        "PowerLawWKB",
        {"scale": scale, "offset": offset, "exponent": exponent, "k": k},
        units,
    )


def rydberg_times(n0: float) -> tuple[float, float]:
    """(classical period, revival time) in seconds for hydrogen-like
    levels around principal quantum number n0."""
    if n0 <= 0:
        raise DomainError("n0 must be positive")
    t_cl = RYDBERG_PERIOD_SECONDS * n0**3
    return t_cl, (2.0 * n0 / 3.0) * t_cl


def stark_period(n: float, field_over_100Vcm: float) -> float:
    """Classical period (seconds) of the parabolic-ladder beats in an
    applied electric field, 2.6 ps / (n * F/(100 V/cm))."""
    if n <= 0 or field_over_100Vcm <= 0:
        raise DomainError("inputs must be positive")
    return 2.6e-12 / (n * field_over_100Vcm)
