"""Fractional-part machinery: the sawtooth psi, Vaaler's trigonometric
approximation, and the fractional-part form E*(u) of the normalized error.

The two Vaaler polynomials sandwich the sawtooth: |psi(w) + Sigma_H(w)| is
bounded by Sigma*_H(w) for every real w.  Coefficients use
rho(xi) = pi*xi*(1-xi)*cot(pi*xi) + xi, which loses precision near the
endpoints when evaluated literally; series forms are substituted there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import normalized_error_E
from .errors import DomainError
from .manifold import ManifoldParams

_SERIES_CUTOFF = 1e-2


def psi(w):
    """Sawtooth w - floor(w) - 1/2 (range [-1/2, 1/2), closed-left).

    For w within one ulp below an integer the subtraction rounds onto the
    open endpoint 1/2; that case is nudged back inside the range.
    """
    w = np.asarray(w, dtype=np.float64)
    out = w - np.floor(w) - 0.5
    out = np.where(out == 0.5, np.nextafter(0.5, -1.0), out)
    return float(out) if out.ndim == 0 else out


def _one_minus_xcotx(x: float) -> float:
    """1 - x*cot(x) for |x| <= pi/100, by series (full double precision)."""
    x2 = x * x
    return x2 * (1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 / 4725.0)))


def rho(xi: float) -> float:
    """Vaaler's weight rho(xi) on (0,1); limits 1 at 0+ and 0 at 1-."""
    if not 0.0 < xi < 1.0:
        raise DomainError(f"rho defined on (0,1), got {xi}")
    if xi < _SERIES_CUTOFF:
        return (1.0 - xi) * (1.0 - _one_minus_xcotx(math.pi * xi)) + xi
    if xi > 1.0 - _SERIES_CUTOFF:
        eta = 1.0 - xi
        return xi * _one_minus_xcotx(math.pi * eta)
    return math.pi * xi * (1.0 - xi) / math.tan(math.pi * xi) + xi


@dataclass(frozen=True)
class VaalerCoeffs:
    """Coefficients alpha_{h,H}, beta_{h,H} for h = 1..H (index h-1)."""

    H: int
    alpha: np.ndarray
    beta: np.ndarray


def vaaler_coeffs(H: int) -> VaalerCoeffs:
    if H < 1:
        raise DomainError(f"H must be >= 1, got {H}")
    hs = np.arange(1, H + 1)
    alpha = np.array([rho(h / (H + 1)) / (math.pi * h) for h in hs])
    beta = (1.0 - hs / (H + 1)) / (H + 1)
    return VaalerCoeffs(H=H, alpha=alpha, beta=beta)


def sigma_H(w, coeffs: VaalerCoeffs):
    """Sum of alpha_h * sin(2 pi h w); approximates -psi(w)."""
    hs = np.arange(1, coeffs.H + 1)
    out = np.sin(2.0 * math.pi * np.multiply.outer(w, hs)) @ coeffs.alpha
    return float(out) if np.ndim(out) == 0 else out


def sigma_H_star(w, coeffs: VaalerCoeffs):
    """Majorant sum of beta_h * cos(2 pi h w) plus 1/(2H+2)."""
    hs = np.arange(1, coeffs.H + 1)
    out = np.cos(2.0 * math.pi * np.multiply.outer(w, hs)) @ coeffs.beta
    out = out + 1.0 / (2 * coeffs.H + 2)
    return float(out) if np.ndim(out) == 0 else out


def vaaler_slack(w, coeffs: VaalerCoeffs):
    """Sigma*_H(w) - |psi(w) + Sigma_H(w)|; nonnegative by Vaaler's theorem."""
    return sigma_H_star(w, coeffs) - np.abs(psi(w) + sigma_H(w, coeffs))


def estar(ell: int, u: float) -> float:
    """Fractional-part sum E*(u) approximating the normalized error E(u).

    E*(u) = -sum_{1<=m<=u} m*(u^2-m^2)^(ell-1) * psi(u^2/(2m) - m/2 - ell/2).
    """
    if u < 1:
        raise DomainError(f"u must be >= 1, got {u}")
    m = np.arange(1, math.floor(u) + 1, dtype=np.float64)
    amp = m * (u * u - m * m) ** (ell - 1)
    return float(-np.dot(amp, psi(u * u / (2.0 * m) - m / 2.0 - ell / 2.0)))


@dataclass(frozen=True)
class EstarComparison:
    """E(u) vs E*(u) over a u-grid with secular correction and growth fit.

    The difference is first cleaned of a fitted c0 + c1*u^(2*ell) secular
    part (lower-order main terms the fractional-part sum absorbs),
    then the growth exponent of the residual is estimated by least squares
    on the log-log cloud.
    """

    u_values: np.ndarray
    e_values: np.ndarray
    estar_values: np.ndarray
    secular_c0: float
    secular_c1: float
    residuals: np.ndarray
    exponent: float
    exponent_bound: float

    @property
    def within_bound(self) -> bool:
        return self.exponent <= self.exponent_bound


def estar_compare(
    params: ManifoldParams,
    u_min: float = 50.0,
    u_max: float = 500.0,
    samples: int = 200,
    threads: int = 1,
) -> EstarComparison:
    """Measure the growth of |E(u) - E*(u)| after secular-term removal."""
    if not 1 <= u_min < u_max:
        raise DomainError(f"need 1 <= u_min < u_max, got [{u_min}, {u_max}]")
    if samples < 10:
        raise DomainError(f"samples must be >= 10, got {samples}")
    u = np.linspace(u_min, u_max, samples)
    e_vals = np.array([normalized_error_E(params, float(v), threads=threads) for v in u])
    es_vals = np.array([estar(params.ell, float(v)) for v in u])
    diff = e_vals - es_vals

    design = np.column_stack([np.ones_like(u), u ** (2 * params.ell)])
    (c0, c1), *_ = np.linalg.lstsq(design, diff, rcond=None)
    resid = diff - design @ (c0, c1)

    mask = np.abs(resid) > 0
    slope = float(np.polyfit(np.log(u[mask]), np.log(np.abs(resid[mask])), 1)[0])
    return EstarComparison(
        u_values=u,
        e_values=e_vals,
        estar_values=es_vals,
        secular_c0=float(c0),
        secular_c1=float(c1),
        residuals=resid,
        exponent=slope,
        exponent_bound=2 * params.ell - 1 + 0.15,
    )
