"""Riemannian Gaussian on the hyperbolic plane, seen through its radial law.

For a centre ``mu`` and dispersion ``sigma`` the density is
``exp(-d(x, mu)^2 / (2 sigma^2)) / Z(sigma)`` with respect to the hyperbolic
area element ``sinh(r) dr dphi``. Integrating out the angle gives the law of
the radius ``r = d(x, mu)``, whose cumulative distribution has the closed form
implemented in :func:`cdf`.

Numerical notes
---------------
``Z(sigma)`` contains ``exp(sigma^2 / 2)`` and overflows near ``sigma = 37.7``.
The cdf prefactor ``pi sqrt(2 pi) sigma exp(sigma^2/2) / (2 Z)`` equals
``1 / (2 erf(sigma / sqrt 2))`` exactly, so above :data:`OVERFLOW_SIGMA` the
cancelled form is used and nothing overflows. Below it the cached ``Z`` is
used, which keeps the normaliser observable (see ``HGaussModel.z_cache``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .errors import InvalidSigma, NoConvergence

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
OVERFLOW_SIGMA = 30.0

QUANTILE_TOL = 1e-12
QUANTILE_MAX_ITER = 200
_EPS = np.finfo(np.float64).eps


def _check_sigma(sigma):
    s = np.asarray(sigma, dtype=np.float64)
    if not (np.all(np.isfinite(s)) and np.all(s > 0)):
        raise InvalidSigma(f"sigma must be positive and finite, got {sigma!r}")
    return s


def _check_phi(phi):
    phi = float(phi)
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi must lie strictly between 0 and 1, got {phi!r}")
    return phi


def normalizer(sigma):
    """Normalising constant ``Z(sigma) = 2 pi sigma sqrt(pi/2) exp(sigma^2/2) erf(sigma/sqrt 2)``.

    Returns ``inf`` once ``exp(sigma^2 / 2)`` overflows (``sigma > ~37.7``).
    """
    s = _check_sigma(sigma)
    with np.errstate(over="ignore"):
        z = 2.0 * np.pi * s * math.sqrt(np.pi / 2.0) * np.exp(s * s / 2.0) * erf(s / SQRT2)
    return float(z) if z.ndim == 0 else z


@dataclass(frozen=True)
class HGaussModel:
    """Dispersion ``sigma`` plus the normaliser evaluated once at construction.

    Passing ``z_cache`` explicitly overrides the closed form, which is how the
    tests probe sensitivity to the normaliser.
    """

    sigma: float
    z_cache: float = field(default=None)

    def __post_init__(self):
        sigma = float(_check_sigma(self.sigma))
        object.__setattr__(self, "sigma", sigma)
        if self.z_cache is None:
            object.__setattr__(self, "z_cache", normalizer(sigma))
        elif not self.z_cache > 0:
            raise InvalidSigma(f"normaliser must be positive, got {self.z_cache!r}")


def _prefactor(sigma, z):
    sigma = np.asarray(sigma, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    small = sigma <= OVERFLOW_SIGMA
    s_small = np.where(small, sigma, 1.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = np.pi * SQRT2PI * s_small * np.exp(s_small * s_small / 2.0) / (2.0 * z)
        cancelled = 1.0 / (2.0 * erf(sigma / SQRT2))
    return np.where(small, direct, cancelled)


def _cdf(r, sigma, z):
    r = np.asarray(r, dtype=np.float64)
    s2 = sigma * sigma
    den = sigma * SQRT2
    bracket = 2.0 * erf(sigma / SQRT2) + erf((r - s2) / den) - erf((r + s2) / den)
    return np.clip(_prefactor(sigma, z) * bracket, 0.0, 1.0)


def _pdf(r, sigma, z):
    # (2 pi / Z) exp(-r^2 / 2 s^2) sinh(r) == 4 K sinh(r) exp(-r^2/2s^2 - s^2/2) / (sqrt(2 pi) s)
    # with K the cdf prefactor; the exponentials are merged in log space for large r.
    r = np.asarray(r, dtype=np.float64)
    k = _prefactor(sigma, z)
    expo = -r * r / (2.0 * sigma * sigma) - sigma * sigma / 2.0
    big = r > 20.0
    r_small = np.where(big, 0.0, r)
    r_big = np.where(big, r, 20.0)
    with np.errstate(over="ignore", under="ignore"):
        near = np.sinh(r_small) * np.exp(np.where(big, 0.0, expo))
        log_sinh = r_big - math.log(2.0) + np.log1p(-np.exp(-2.0 * r_big))
        far = np.exp(log_sinh + np.where(big, expo, 0.0))
    return 4.0 * k * np.where(big, far, near) / (SQRT2PI * sigma)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def pdf_radial(r, model: HGaussModel):
    """Density of the radius ``r = d(x, mu)``; the derivative of :func:`cdf`."""
    return _scalar_or_array(_pdf(r, model.sigma, model.z_cache))


def cdf(r, model: HGaussModel):
    """Probability that a sample lies within Rao distance ``r`` of the centre.

    ``K * (2 erf(s/sqrt2) + erf((r - s^2)/(s sqrt2)) - erf((r + s^2)/(s sqrt2)))``
    with ``K = pi sqrt(2 pi) s exp(s^2/2) / (2 Z(s))``, clipped to ``[0, 1]``.
    It tends to 1 as ``r -> inf``; the Rao radius is unbounded, so the limit
    is not taken at any finite radius.
    """
    return _scalar_or_array(_cdf(r, model.sigma, model.z_cache))


def quantile_radii(phi: float, sigma, z=None, *, tol: float = QUANTILE_TOL,
                   max_iter: int = QUANTILE_MAX_ITER) -> np.ndarray:
    """Solve ``cdf(r, sigma) = phi`` for every entry of ``sigma`` at once.

    Safeguarded Newton: the seed is the small-sigma (Rayleigh) quantile
    ``sigma sqrt(-2 ln(1 - phi))``; a bracket ``[0, hi]`` is grown by doubling
    from ``hi = sigma`` and any Newton iterate leaving it is replaced by the
    bracket midpoint.

    Raises
    ------
    NoConvergence
        If some entry has not met ``|cdf(r) - phi| <= tol`` after ``max_iter``
        iterations.
    """
    phi = _check_phi(phi)
    sigma = np.atleast_1d(_check_sigma(sigma)).astype(np.float64)
    z = normalizer(sigma) if z is None else np.broadcast_to(np.asarray(z, dtype=np.float64), sigma.shape)
    z = np.atleast_1d(z)

    lo = np.zeros_like(sigma)
    hi = sigma.copy()
    for _ in range(2100):
        short = _cdf(hi, sigma, z) <= phi
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2.0 * hi, hi)
    else:  # pragma: no cover - cdf reaches 1.0 long before this
        raise NoConvergence("could not bracket the quantile")

    r = sigma * math.sqrt(-2.0 * math.log1p(-phi))
    r = np.where((r > lo) & (r < hi), r, 0.5 * (lo + hi))
    done = np.zeros(sigma.shape, dtype=bool)
    for _ in range(max_iter):
        f = _cdf(r, sigma, z) - phi
        d = _pdf(r, sigma, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / d
        converged = (np.abs(f) <= tol) & (
            (np.abs(step) <= 1e-13 * r) | (np.abs(f) <= 4 * _EPS) | ~np.isfinite(step)
        )
        converged |= (np.abs(f) <= tol) & (hi - lo <= 4 * _EPS * hi)
        done |= converged
        if done.all():
            return r
        lo = np.where(~done & (f < 0), r, lo)
        hi = np.where(~done & (f > 0), r, hi)
        newton = r - step
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        r = np.where(done, r, np.where(ok, newton, 0.5 * (lo + hi)))
    bad = np.flatnonzero(~done)
    raise NoConvergence(
        f"quantile did not converge in {max_iter} iterations for sigma={sigma[bad[0]]!r}, phi={phi!r}"
    )


def quantile(phi: float, model: HGaussModel) -> float:
    """Radius ``r*`` with ``|cdf(r*, model) - phi| <= 1e-12``."""
    return float(quantile_radii(phi, model.sigma, model.z_cache)[0])


def lambda_h(phi: float, sigma_r: float) -> float:
    """Significance multiplier ``quantile(phi, sigma_r) / sigma_r``.

    Unlike the Euclidean ``sqrt(2) erfinv(phi)`` it depends on ``sigma_r``.
    """
    model = HGaussModel(sigma_r)
    return quantile(phi, model) / model.sigma
