"""DFTs, periodograms, smoothing and reference spectra.

Frequency convention: all marked patterns (point- and lattice-derived alike)
live on the unit square and are transformed at integer frequencies (p, q),
i.e. angular frequencies w = (2*pi*p, 2*pi*q). Regular lattices additionally
have a native-grid transform with frequencies p/l1, q/l2 per cell index.

Cross-spectra follow f_ij = F_i * conj(F_j); the co-spectrum is its real
part and the quadrature spectrum its imaginary part (a_i*a_j + b_i*b_j and
b_i*a_j - a_i*b_j in terms of the DFT parts F = a + i*b).
"""

from __future__ import annotations

import numpy as np
from scipy.special import j0

from .model import FrequencyGrid, LatticeComponent, MarkedPattern

__all__ = [
    "SmoothingKernel",
    "dft_points",
    "dft_marked",
    "dft_lattice",
    "lattice_frequency_grid",
    "auto_periodogram",
    "cross_periodogram",
    "decompose",
    "smooth",
    "csr_bias",
    "isotropic_spectrum",
    "coherence",
]

# Cross-spectrum moduli below this are treated as vanishing (phase undefined).
PHASE_EPS = 1e-12
# Auto-spectra products below this make coherence undefined.
COHERENCE_EPS = 1e-12


class SmoothingKernel:
    """Square smoothing kernel over the (p, q) grid: odd size, weights sum to 1."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("kernel weights must be a square matrix")
        if w.shape[0] % 2 == 0:
            raise ValueError("kernel size must be odd")
        if (w < 0).any():
            raise ValueError("kernel weights must be non-negative")
        total = w.sum()
        if total <= 0:
            raise ValueError("kernel weights must have positive sum")
        self.weights = w / total
        self.size = w.shape[0]

    @classmethod
    def uniform(cls, size: int) -> "SmoothingKernel":
        if size < 1 or size % 2 == 0:
            raise ValueError("kernel size must be a positive odd integer")
        return cls(np.ones((size, size)))

    @property
    def half(self) -> int:
        return self.size // 2

    def __repr__(self) -> str:
        return f"SmoothingKernel(size={self.size})"


def _phase_factors(values: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """exp(-2*pi*i * f * v) for all (frequency, value) pairs -> (F, n)."""
    return np.exp(-2j * np.pi * np.outer(freqs, values))


def dft_marked(pattern: MarkedPattern, grid: FrequencyGrid) -> np.ndarray:
    """Mark-weighted DFT F(p, q) = sum_k m_k exp(-2*pi*i*(p*x_k + q*y_k)).

    Direct summation (no FFT): locations are irregular and the grid is small.
    Returns a complex (P, Q) field aligned with the grid.
    """
    if pattern.n == 0:
        raise ValueError(f"pattern {pattern.name!r} is empty")
    ex = _phase_factors(pattern.xy[:, 0], grid.p_values)
    ey = _phase_factors(pattern.xy[:, 1], grid.q_values)
    return (ex * pattern.marks) @ ey.T


def dft_points(pattern: MarkedPattern, grid: FrequencyGrid) -> np.ndarray:
    """DFT of bare point locations (all marks 1) on the unit square."""
    if pattern.kind != "point-derived":
        raise ValueError("dft_points expects a point-derived pattern")
    return dft_marked(pattern, grid)


def lattice_frequency_grid(l1: int, l2: int) -> FrequencyGrid:
    """Native frequency grid of a regular l1 x l2 lattice: p=0..l1-1, q=0..l2-1."""
    return FrequencyGrid(np.arange(l1), np.arange(l2))


def dft_lattice(component: LatticeComponent) -> tuple[np.ndarray, FrequencyGrid]:
    """Regular-lattice DFT on its native grid.

    F(p, q) = (l1*l2)^(-1/2) * sum_{s1, s2} x(s1, s2)
              exp(-2*pi*i*(p*s1/l1 + q*s2/l2)),
    computed via FFT (identical sum, reordered). Input values must already be
    demeaned; the (0, 0) ordinate is then exactly zero and is pinned to 0.0
    to remove summation round-off.
    """
    grid_vals = component.value_grid()
    l1, l2 = grid_vals.shape
    mass = np.abs(grid_vals).sum()
    if abs(grid_vals.sum()) > 1e-9 * max(mass, 1.0):
        raise ValueError(f"component {component.name!r}: values are not demeaned")
    field = np.fft.fft2(grid_vals) / np.sqrt(l1 * l2)
    field[0, 0] = 0.0
    return field, lattice_frequency_grid(l1, l2)


def auto_periodogram(field: np.ndarray) -> np.ndarray:
    """|F|^2, entrywise; real and non-negative."""
    f = np.asarray(field)
    return (f * np.conj(f)).real


def cross_periodogram(field_i: np.ndarray, field_j: np.ndarray) -> np.ndarray:
    """F_i * conj(F_j), entrywise; self-cross reduces to the auto-periodogram."""
    fi = np.asarray(field_i)
    fj = np.asarray(field_j)
    if fi.shape != fj.shape:
        raise ValueError(f"frequency grids differ: {fi.shape} vs {fj.shape}")
    return fi * np.conj(fj)


def decompose(cross: np.ndarray, mode: str = "cartesian") -> tuple[np.ndarray, np.ndarray]:
    """Split a cross-spectral field into co/quadrature or modulus/phase parts.

    cartesian: (C, Q) with C = Re(f_ij) = a_i*a_j + b_i*b_j and
    Q = Im(f_ij) = b_i*a_j - a_i*b_j. polar: (modulus, phase) with the
    principal-value phase arg(f_ij) in (-pi, pi], NaN where the modulus
    falls below PHASE_EPS (phase is undefined on a vanishing cross-spectrum).
    """
    f = np.asarray(cross, dtype=complex)
    if mode == "cartesian":
        return f.real.copy(), f.imag.copy()
    if mode == "polar":
        modulus = np.abs(f)
        phase = np.angle(f)
        # np.angle returns [-pi, pi]; fold -pi onto the principal value +pi
        phase = np.where(phase == -np.pi, np.pi, phase)
        phase = np.where(modulus < PHASE_EPS, np.nan, phase)
        return modulus, phase
    raise ValueError(f"unknown mode {mode!r}")


def smooth(field: np.ndarray, kernel: SmoothingKernel, mask: np.ndarray | None = None) -> np.ndarray:
    """2D kernel smoothing over the (p, q) grid with edge renormalisation.

    At the grid border (and at masked-out cells) the weights of the cells that
    remain visible are rescaled to sum to 1. Real and complex fields are
    smoothed identically (the convolution is linear and componentwise).
    ``mask`` marks cells excluded as inputs (True = excluded).
    """
    f = np.asarray(field)
    if f.ndim != 2:
        raise ValueError("field must be 2-dimensional")
    if kernel.size > min(f.shape):
        raise ValueError(f"kernel size {kernel.size} exceeds grid {f.shape}")
    valid = np.ones(f.shape)
    if mask is not None:
        valid[np.asarray(mask, dtype=bool)] = 0.0
    num = np.zeros(f.shape, dtype=f.dtype if np.iscomplexobj(f) else float)
    den = np.zeros(f.shape)
    h = kernel.half
    fz = np.where(valid > 0, f, 0)
    P, Q = f.shape
    for du in range(-h, h + 1):
        rs = slice(max(0, -du), P - max(0, du))
        rsrc = slice(max(0, du), P + min(0, du))
        for dv in range(-h, h + 1):
            w = kernel.weights[du + h, dv + h]
            if w == 0.0:
                continue
            cs = slice(max(0, -dv), Q - max(0, dv))
            csrc = slice(max(0, dv), Q + min(0, dv))
            num[rs, cs] += w * fz[rsrc, csrc]
            den[rs, cs] += w * valid[rsrc, csrc]
    out = np.full(f.shape, np.nan, dtype=num.dtype)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def csr_bias(w: tuple[float, float], intensity: float, l1: float, l2: float) -> float:
    """Low-frequency periodogram bias of a homogeneous Poisson pattern.

    B(w) = 2*l1*l2*lambda^2 * [sinc(l1*w_p/2) * sinc(l2*w_q/2)]^2 with
    sinc(x) = sin(x)/x and sinc(0) = 1; w is the angular frequency pair.
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")

    def sinc(x: float) -> float:
        return 1.0 if x == 0.0 else np.sin(x) / x

    wp, wq = w
    s = sinc(l1 * wp / 2.0) * sinc(l2 * wq / 2.0)
    return 2.0 * l1 * l2 * intensity**2 * s**2


def isotropic_spectrum(
    zeta,
    intensity: float,
    varpi: float,
    radius: float,
    rtol: float = 1e-6,
    cross: bool = False,
) -> float:
    """Radially symmetric spectrum via Hankel-transform quadrature.

    f(varpi) = intensity + 2*pi * int_0^R r * zeta(r) * J0(r*varpi) dr for the
    auto case; the cross case drops the intensity term. Adaptive trapezoid
    refinement (panel doubling) to the requested relative tolerance. Intended
    as a numerical reference, not a production estimator.
    """
    if radius <= 0:
        raise ValueError("truncation radius must be positive")

    def integrand(r: np.ndarray) -> np.ndarray:
        return r * np.asarray(zeta(r), dtype=float) * j0(r * varpi)

    n = 64
    r = np.linspace(0.0, radius, n + 1)
    est = np.trapezoid(integrand(r), r)
    for _ in range(24):
        n *= 2
        r = np.linspace(0.0, radius, n + 1)
        new = np.trapezoid(integrand(r), r)
        if not np.isfinite(new):
            raise ArithmeticError("non-finite quadrature")
        if abs(new - est) <= rtol * max(abs(new), 1e-300):
            est = new
            break
        est = new
    integral = 2.0 * np.pi * est
    return integral if cross else intensity + integral


def coherence(
    f_ij: np.ndarray,
    f_ii: np.ndarray,
    f_jj: np.ndarray,
    *,
    smoothed: bool,
    allow_raw: bool = False,
) -> np.ndarray:
    """Squared spectral coherence |f_ij|^2 / (f_ii * f_jj), entrywise in [0, 1].

    Inputs must be smoothed: the raw-periodogram coherence is identically 1
    (a correlation from a single observation pair per frequency), so
    unsmoothed input is refused unless ``allow_raw`` is set to demonstrate
    exactly that pitfall. Undefined entries (vanishing denominator) are NaN.
    """
    if not smoothed and not allow_raw:
        raise ValueError(
            "coherence from raw periodograms is unity at all frequencies; "
            "smooth the inputs or set allow_raw=True"
        )
    num = np.abs(np.asarray(f_ij)) ** 2
    den = np.asarray(f_ii).real * np.asarray(f_jj).real
    out = np.full(num.shape, np.nan)
    ok = den >= COHERENCE_EPS
    out[ok] = num[ok] / den[ok]
    return out
