"""
Specular reflectivity of a stratified medium.

Two routes are provided:

* ``kinematic_reflectivity`` - single-scattering (Born) approximation for
  sharp step profiles. It is *not* bounded by 1 and diverges as q -> 0.
* ``dynamical_reflectivity`` - Abeles characteristic-matrix product with
  Nevot-Croce interfacial roughness.

Units throughout: lengths in Angstrom, SLD in Angstrom**-2, q in
Angstrom**-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.special import erf


class NumericalError(ArithmeticError):
    """Raised when the matrix product overflows. ``q`` holds the offending
    momentum-transfer values."""

    def __init__(self, message: str, q: np.ndarray):
        super().__init__(message)
        self.q = q


class UnsupportedModelError(ValueError):
    pass


@dataclass(frozen=True)
class Layer:
    """One slab. ``roughness`` is the Gaussian width of the interface with
    the layer above."""

    thickness: float = 0.0
    sld: float = 0.0
    roughness: float = 0.0
    name: str = ""

    def __post_init__(self):
        for attr in ("thickness", "sld", "roughness"):
            v = getattr(self, attr)
            if not np.isfinite(v):
                raise ValueError(f"layer {self.name!r}: {attr} must be finite, got {v}")
        if self.thickness < 0:
            raise ValueError(f"layer {self.name!r}: negative thickness {self.thickness}")
        if self.roughness < 0:
            raise ValueError(f"layer {self.name!r}: negative roughness {self.roughness}")


@dataclass(frozen=True)
class LayeredStructure:
    """Ambient first, substrate last. Thickness of both semi-infinite media
    and the roughness of the ambient are ignored."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.layers) < 2:
            raise ValueError("a structure needs at least an ambient and a substrate")

    @classmethod
    def from_arrays(cls, thickness, sld, roughness) -> "LayeredStructure":
        return cls(tuple(Layer(float(d), float(r), float(s))
                         for d, r, s in zip(thickness, sld, roughness)))

    @property
    def thickness(self) -> np.ndarray:
        d = np.array([layer.thickness for layer in self.layers], dtype=float)
        d[0] = d[-1] = 0.0
        return d

    @property
    def sld(self) -> np.ndarray:
        return np.array([layer.sld for layer in self.layers], dtype=float)

    @property
    def roughness(self) -> np.ndarray:
        s = np.array([layer.roughness for layer in self.layers], dtype=float)
        s[0] = 0.0
        return s

    def interface_depths(self) -> np.ndarray:
        """Depth of each interface (len(layers) - 1 values); the top one is
        at z = 0 and z increases into the substrate."""
        d = self.thickness
        return np.concatenate([[0.0], np.cumsum(d[1:-1])])

    def __len__(self):
        return len(self.layers)


@dataclass
class ReflectivityCurve:
    q: np.ndarray
    r: np.ndarray
    dr: Optional[np.ndarray] = None

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        if self.q.shape != self.r.shape:
            raise ValueError("q and r must have equal length")
        if self.dr is not None:
            self.dr = np.asarray(self.dr, dtype=float)
            if self.dr.shape != self.q.shape:
                raise ValueError("dr must have the same length as q")
            if np.any(~(self.dr > 0)):
                raise ValueError("uncertainties must be strictly positive")

    def __len__(self):
        return self.q.size


@dataclass
class SLDProfile:
    z: np.ndarray
    rho: np.ndarray


def check_q(q: npt.ArrayLike) -> np.ndarray:
    """Validate a momentum-transfer grid: finite, positive, strictly
    increasing, one-dimensional."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("q must be a non-empty 1-D array")
    if not np.all(np.isfinite(q)):
        raise ValueError("q must be finite")
    if np.any(q <= 0):
        raise ValueError("q must be strictly positive")
    if np.any(np.diff(q) <= 0):
        raise ValueError("q must be strictly increasing")
    return q


def critical_edge(delta_sld: float) -> float:
    """q below which total reflection occurs for an SLD step ``delta_sld``."""
    return 4.0 * np.sqrt(np.pi * delta_sld)


def layer_wavevector(k0, rho_n, rho_0):
    """Perpendicular wavevector inside a medium of SLD ``rho_n``.

    Returns a complex value (or array) with non-negative imaginary part, so
    that below the critical edge the wave decays into the medium.
    """
    k0 = np.asarray(k0, dtype=float)
    radicand = k0 ** 2 - 4.0 * np.pi * (np.asarray(rho_n, dtype=float) - rho_0)
    # a real radicand cast to complex carries +0j, so np.sqrt lands on the
    # upper half plane; the flip guards against -0.0 imaginary parts
    k = np.sqrt(radicand.astype(np.complex128))
    k = np.where(k.imag < 0, -k, k)
    return k[()] if k.ndim == 0 else k


def fresnel_coefficient(k_n, k_n1, sigma=0.0):
    """Amplitude reflection coefficient between two media with Nevot-Croce
    damping for an interface of roughness ``sigma``."""
    k_n = np.asarray(k_n, dtype=np.complex128)
    k_n1 = np.asarray(k_n1, dtype=np.complex128)
    denom = k_n + k_n1
    if np.any(denom == 0):
        raise ValueError("fresnel coefficient undefined for k_n = k_n1 = 0")
    r = (k_n - k_n1) / denom * np.exp(-2.0 * k_n * k_n1 * sigma ** 2)
    return r[()] if r.ndim == 0 else r


def dynamical_reflectivity(structure: LayeredStructure, q: npt.ArrayLike) -> ReflectivityCurve:
    """
    Reflectivity from the Abeles matrix method.

    For each interface j (between layer j-1 and j) the characteristic matrix
    is::

        M_j = [[exp(i b),      r exp(i b)],
               [r exp(-i b),   exp(-i b)]],   b = k_{j-1} d_{j-1}

    with b = 0 for the ambient. With B = M_1 M_2 ... M_N the amplitude is
    B[1, 0] / B[0, 0] and R = |amplitude|**2.

    Parameters
    ----------
    structure : LayeredStructure
    q : array_like
        Strictly increasing, positive momentum transfer (Angstrom**-1).

    Returns
    -------
    ReflectivityCurve
    """
    q = check_q(q)
    sld = structure.sld
    d = structure.thickness
    sigma = structure.roughness

    # rows: q points, columns: layers
    k = layer_wavevector(q[:, None] / 2.0, sld[None, :], sld[0])
    r = fresnel_coefficient(k[:, :-1], k[:, 1:], sigma[None, 1:])

    b00 = np.ones(q.size, np.complex128)
    b01 = r[:, 0].copy()
    b10 = r[:, 0].copy()
    b11 = np.ones(q.size, np.complex128)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for j in range(2, len(structure)):
            e = np.exp(1j * k[:, j - 1] * d[j - 1])
            ei = 1.0 / e
            rj = r[:, j - 1]
            m00, m01, m10, m11 = e, rj * e, rj * ei, ei
            b00, b01, b10, b11 = (
                b00 * m00 + b01 * m10,
                b00 * m01 + b01 * m11,
                b10 * m00 + b11 * m10,
                b10 * m01 + b11 * m11,
            )
        amp = b10 / b00
        refl = (amp * np.conj(amp)).real

    bad = ~np.isfinite(refl)
    if np.any(bad):
        raise NumericalError(
            f"non-finite reflectivity at q = {q[bad].tolist()}", q[bad]
        )
    return ReflectivityCurve(q, refl)


def kinematic_reflectivity(structure: LayeredStructure, q: npt.ArrayLike) -> ReflectivityCurve:
    """
    Born-approximation reflectivity of a sharp step profile.

    The derivative of a piecewise-constant SLD is a sum of delta functions
    at the interfaces, so the Fourier integral is an exact finite sum::

        R(q) = 16 pi^2 / q^4 * |sum_j drho_j exp(-i q z_j)|^2

    The result is deliberately left unclamped.
    """
    q = check_q(q)
    if np.any(structure.roughness[1:] != 0):
        raise UnsupportedModelError(
            "kinematic reflectivity supports sharp interfaces only (all roughness = 0)"
        )
    drho = np.diff(structure.sld)
    z = structure.interface_depths()
    amp = np.exp(-1j * q[:, None] * z[None, :]) @ drho
    refl = 16.0 * np.pi ** 2 / q ** 4 * np.abs(amp) ** 2
    return ReflectivityCurve(q, refl)


def sld_profile(structure: LayeredStructure, n_points: int = 500) -> SLDProfile:
    """
    Real-space SLD profile for display.

    Sharp interfaces are rendered as steps; rough ones as error-function
    transitions of width sigma. Padding of 4 * max(sigma, 10 A) is added
    above and below the stack.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    sld = structure.sld
    sigma = structure.roughness[1:]
    z_int = structure.interface_depths()
    pad = 4.0 * max(float(sigma.max(initial=0.0)), 10.0)
    z = np.linspace(z_int[0] - pad, z_int[-1] + pad, n_points)

    rho = np.full(z.shape, sld[0])
    for zj, dj, sj in zip(z_int, np.diff(sld), sigma):
        if sj > 0:
            step = 0.5 * (1.0 + erf((z - zj) / (sj * np.sqrt(2.0))))
        else:
            step = (z >= zj).astype(float)
        rho += dj * step
    return SLDProfile(z, rho)
