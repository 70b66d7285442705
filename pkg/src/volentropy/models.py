"""Conditional-variance models: GARCH(1,1), IGARCH(1,1), FIGARCH(1,d,1).

The three families share one evaluation engine.  FIGARCH is evaluated in
truncated ARCH(:math:`\\infty`) form

.. math::

    \\sigma_t^2 = \\frac{\\omega}{1-\\beta}
                  + \\sum_{j=1}^{T} \\lambda_j e_{t-j}^2,

with weights generated by
:math:`\\lambda(L) = 1 - (1-\\beta L)^{-1}\\,\\Phi(L)\\,(1-L)^d`, where
:math:`\\Phi(L) = 1-(\\alpha+\\beta)L`.  IGARCH is the ``d = 1`` slice of the
same machinery, and GARCH (the ``d = 0`` slice) is evaluated by its ordinary
one-lag recursion seeded so that it coincides with the ARCH(:math:`\\infty`)
form under the shared backcast convention.

Innovations are demeaned returns, :math:`e_t = y_t - \\bar y`; pre-sample
:math:`e^2` values are backcast with the sample mean of the squared demeaned
returns.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import convolve, lfilter
from scipy.special import gammaln

from .errors import DataQualityError, DomainError, InfeasibleParamsError

__all__ = [
    "ModelFamily",
    "ParamVector",
    "VariancePath",
    "FracWeights",
    "frac_weights",
    "variance_path",
    "log_likelihood",
    "validate_params",
    "student_logpdf",
    "DEFAULT_TRUNCATION",
]

DEFAULT_TRUNCATION = 1000

# Convolutions shorter than this are evaluated by direct summation, which is
# bit-reproducible against a plain loop; longer ones go through the FFT path
# for speed (relative error ~1e-14, irrelevant at estimation tolerances).
_DIRECT_CONV_LIMIT = 4096

# Numerical slack when checking nonnegativity of the ARCH(inf) weights.
_LAMBDA_TOL = 1e-12


class ModelFamily(enum.Enum):
    """The three supported conditional-variance families."""

    GARCH = "garch"
    IGARCH = "igarch"
    FIGARCH = "figarch"

    @classmethod
    def from_string(cls, text: str) -> "ModelFamily":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown model family {text!r} (expected one of: {valid})") from None

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class ParamVector:
    """Model parameters (omega, alpha, beta, d, nu).

    ``d`` is fixed at 0 for GARCH and 1 for IGARCH, free in [0, 1] for
    FIGARCH.  ``nu`` is the Student-t degrees of freedom (> 2); ``None``
    selects Gaussian innovations.
    """

    omega: float
    alpha: float
    beta: float
    d: float = 0.0
    nu: float | None = None

    def with_(self, **kwargs) -> "ParamVector":
        return replace(self, **kwargs)

    def as_dict(self) -> dict[str, float | None]:
        return {"omega": self.omega, "alpha": self.alpha, "beta": self.beta,
                "d": self.d, "nu": self.nu}


@dataclass(frozen=True)
class VariancePath:
    """Conditional variances plus the total log-likelihood (nats) of the path."""

    sigma2: np.ndarray
    loglik: float


@dataclass(frozen=True)
class FracWeights:
    """Expansion weights of the fractional machinery.

    ``pi`` holds the T+1 coefficients of :math:`(1-L)^d`; ``lam`` holds the
    T ARCH(:math:`\\infty`) weights :math:`\\lambda_1..\\lambda_T` implied by
    the (alpha, beta) pair the weights were built for.
    """

    pi: np.ndarray
    lam: np.ndarray
    T: int


def frac_weights(d: float, T: int, alpha: float = 0.0, beta: float = 0.0) -> FracWeights:
    """Fractional-differencing coefficients and ARCH(:math:`\\infty`) weights.

    Parameters
    ----------
    d : float
        Fractional difference parameter, in [0, 1].
    T : int
        Truncation horizon (number of lags retained), >= 1.
    alpha, beta : float
        Model coefficients entering :math:`\\Phi(L) = 1-(\\alpha+\\beta)L`
        and :math:`1-\\beta L`.  The default (0, 0) is convenient when only
        the ``pi`` expansion is of interest.

    Notes
    -----
    ``pi`` follows the binomial recursion ``pi[0] = 1``,
    ``pi[j] = pi[j-1] * (j - 1 - d) / j``.  The lambda weights satisfy

    .. math::

        \\lambda_1 = \\alpha + d, \\qquad
        \\lambda_j = \\beta\\lambda_{j-1} + (\\alpha+\\beta)\\pi_{j-1} - \\pi_j
        \\quad (j \\ge 2),

    which reduces to :math:`\\lambda_j = \\alpha\\beta^{j-1}` at ``d = 0``.
    """
    if not (0.0 <= d <= 1.0):
        raise DomainError(f"d must lie in [0,1], got {d}")
    if T < 1:
        raise DomainError(f"truncation horizon must be >= 1, got {T}")

    j = np.arange(1, T + 1, dtype=float)
    pi = np.concatenate(([1.0], np.cumprod((j - 1.0 - d) / j)))

    phi = alpha + beta
    x = phi * pi[:-1] - pi[1:]
    x[0] -= beta  # folds the leading beta*lambda_0 term out of the recursion
    lam = lfilter([1.0], [1.0, -beta], x)
    return FracWeights(pi=pi, lam=lam, T=T)


def validate_params(family: ModelFamily, params: ParamVector,
                    T: int = DEFAULT_TRUNCATION) -> None:
    """Check the family invariants, raising DomainError naming the violation.

    GARCH requires ``alpha, beta >= 0`` and ``alpha + beta < 1``; IGARCH pins
    ``d = 1``; FIGARCH requires ``d`` in [0,1] and every ARCH(inf) weight
    ``lambda_j >= 0`` up to the truncation horizon (checked numerically).
    The ARCH(inf) engine additionally needs ``beta < 1`` for the
    :math:`(1-\\beta L)^{-1}` inversion.
    """
    if not (math.isfinite(params.omega) and params.omega > 0):
        raise DomainError(f"omega must be positive, got {params.omega}")
    if params.nu is not None and not (math.isfinite(params.nu) and params.nu > 2):
        raise DomainError(f"nu must exceed 2 for finite innovation variance, got {params.nu}")

    if family is ModelFamily.GARCH:
        if params.d != 0.0:
            raise DomainError(f"d is fixed at 0 for GARCH, got {params.d}")
        if params.alpha < 0 or params.beta < 0:
            raise DomainError("alpha and beta must be nonnegative for GARCH")
        if params.alpha + params.beta >= 1:
            raise DomainError(
                f"alpha + beta must lie below 1 for covariance stationarity, "
                f"got {params.alpha + params.beta}"
            )
    elif family is ModelFamily.IGARCH:
        if params.d != 1.0:
            raise DomainError(f"d is fixed at 1 for IGARCH, got {params.d}")
        if params.alpha < 0 or params.beta < 0:
            raise DomainError("alpha and beta must be nonnegative for IGARCH")
        if params.beta >= 1:
            raise DomainError(f"beta must lie below 1 for the ARCH(inf) engine, got {params.beta}")
    elif family is ModelFamily.FIGARCH:
        if not (0.0 <= params.d <= 1.0):
            raise DomainError(f"d must lie in [0,1], got {params.d}")
        if params.beta < 0 or params.beta >= 1:
            raise DomainError(f"beta must lie in [0,1) for the ARCH(inf) engine, got {params.beta}")
        lam = frac_weights(params.d, T, params.alpha, params.beta).lam
        bad = np.nonzero(lam < -_LAMBDA_TOL)[0]
        if bad.size:
            j = int(bad[0]) + 1
            raise InfeasibleParamsError(
                f"ARCH(inf) weights must be nonnegative: lambda_{j} = {lam[bad[0]]:.3e} < 0"
            )
    else:  # pragma: no cover - exhaustive enum
        raise DomainError(f"unknown family {family!r}")


def _demean(returns: np.ndarray) -> tuple[np.ndarray, float]:
    e = returns - returns.mean()
    e2 = e * e
    return e2, float(e2.mean())


def _garch_recursion(omega: float, alpha: float, beta: float,
                     e2: np.ndarray, backcast: float) -> np.ndarray:
    # sigma2_t = omega + alpha*e2_{t-1} + beta*sigma2_{t-1}, seeded at the
    # ARCH(inf)-implied pre-sample level so the d=0 slice of the fractional
    # engine reproduces this path to machine precision.
    x = omega + alpha * np.concatenate(([backcast], e2[:-1]))
    s_pre = (omega + alpha * backcast) / (1.0 - beta)
    sig2, _ = lfilter([1.0], [1.0, -beta], x, zi=np.array([beta * s_pre]))
    return sig2


def _arch_inf_path(omega: float, beta: float, lam: np.ndarray,
                   e2: np.ndarray, backcast: float) -> np.ndarray:
    T = lam.size
    n = e2.size
    e2_ext = np.concatenate((np.full(T, backcast), e2))
    kernel = np.concatenate(([0.0], lam))
    method = "direct" if n <= _DIRECT_CONV_LIMIT else "fft"
    acc = convolve(e2_ext, kernel, method=method)
    return omega / (1.0 - beta) + acc[T:T + n]


def student_logpdf(z: np.ndarray | float, nu: float) -> np.ndarray | float:
    """Log-density of the standardized (unit-variance) Student-t law.

    This is the innovation density used by the Student-t likelihood: a
    classical :math:`t_\\nu` variate rescaled by :math:`\\sqrt{(\\nu-2)/\\nu}`
    so that its variance is exactly 1 for every ``nu > 2``.
    """
    if not nu > 2:
        raise DomainError(f"nu must exceed 2, got {nu}")
    z = np.asarray(z, dtype=float)
    const = (gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)
             - 0.5 * math.log(math.pi * (nu - 2.0)))
    out = const - ((nu + 1.0) / 2.0) * np.log1p(z * z / (nu - 2.0))
    return out if out.ndim else float(out)


def _loglik_from_path(sigma2: np.ndarray, e2: np.ndarray, nu: float | None) -> float:
    n = e2.size
    if nu is None:
        ll = -0.5 * (n * math.log(2.0 * math.pi)
                     + np.log(sigma2).sum()
                     + (e2 / sigma2).sum())
    else:
        const = (gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)
                 - 0.5 * math.log(math.pi * (nu - 2.0)))
        ll = (n * const
              - 0.5 * np.log(sigma2).sum()
              - ((nu + 1.0) / 2.0) * np.log1p(e2 / ((nu - 2.0) * sigma2)).sum())
    return float(ll)


def variance_path(family: ModelFamily, params: ParamVector,
                  returns: np.ndarray, T: int = DEFAULT_TRUNCATION) -> VariancePath:
    """Conditional-variance path and total log-likelihood for a return vector.

    The caller is responsible for the family invariants (see
    :func:`validate_params`); this function only signals *infeasibility*:
    any non-positive conditional variance raises
    :class:`InfeasibleParamsError`, which the optimizer treats as a
    rejection rather than a crash.

    The innovation law is selected by ``params.nu`` (``None`` = Gaussian,
    otherwise standardized Student-t).
    """
    r = np.asarray(returns, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise DomainError("returns must be a nonempty one-dimensional vector")
    if not np.isfinite(r).all():
        raise DomainError("returns contain NaN or infinite entries")
    if params.beta >= 1.0 - 1e-12:
        raise InfeasibleParamsError(
            f"beta = {params.beta} too close to 1 for the ARCH(inf) engine"
        )

    e2, backcast = _demean(r)

    if family is ModelFamily.GARCH:
        sig2 = _garch_recursion(params.omega, params.alpha, params.beta, e2, backcast)
    else:
        d = 1.0 if family is ModelFamily.IGARCH else params.d
        lam = frac_weights(d, T, params.alpha, params.beta).lam
        sig2 = _arch_inf_path(params.omega, params.beta, lam, e2, backcast)

    if not np.isfinite(sig2).all() or (sig2 <= 0.0).any():
        worst = float(np.nanmin(sig2))
        raise InfeasibleParamsError(
            f"non-positive conditional variance encountered (min sigma2 = {worst:.3e})"
        )

    ll = _loglik_from_path(sig2, e2, params.nu)
    if not math.isfinite(ll):
        raise DataQualityError("log-likelihood is not finite on this series")
    return VariancePath(sigma2=sig2, loglik=ll)


def log_likelihood(family: ModelFamily, params: ParamVector,
                   returns: np.ndarray, T: int = DEFAULT_TRUNCATION) -> float:
    """Total log-likelihood (nats); see :func:`variance_path` for conventions."""
    return variance_path(family, params, returns, T=T).loglik
