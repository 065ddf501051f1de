"""Independent reference implementations used only by the tests.

High-precision densities come from mpmath (series summed at 50+ decimal
digits, so alternating-series cancellation is immaterial); integrals and
moments use plain dense-grid trapezoids. Nothing here shares code with
the package's own evaluation paths.
"""

import mpmath as mp
import numpy as np


def mp_log_nct_pdf(x, df, delta, dps=None):
    """Noncentral t log density: explicit series sum in mpmath.

    The series alternates for x*delta < 0; precision scales with the
    cancellation magnitude (~exp(q^2/2)) so the quoted digits survive.
    Explicit summation is used because adaptive extrapolation can miss
    the interior term hump.
    """
    qf = float(x) * float(delta) * 2**0.5 / (float(df) + float(x) ** 2) ** 0.5
    if dps is None:
        dps = 60 + int(0.45 * qf * qf)
    jmax = int(qf * qf / 2 + 30 * abs(qf) + 500)
    with mp.workdps(dps):
        x, df, d = mp.mpf(x), mp.mpf(df), mp.mpf(delta)
        q = x * d * mp.sqrt(2) / mp.sqrt(df + x * x)
        s = mp.fsum(
            mp.gamma((df + j + 1) / 2) / mp.gamma(j + 1) * q**j for j in range(jmax)
        )
        f = (
            df ** (df / 2)
            * mp.e ** (-d * d / 2)
            / (mp.sqrt(mp.pi) * mp.gamma(df / 2) * (df + x * x) ** ((df + 1) / 2))
        ) * s
        return float(mp.log(f))


def mp_log_ncf_pdf(x, d1, d2, lam, dps=60):
    """Noncentral F log density: explicit Poisson-mixture sum in mpmath."""
    kmax = int(float(lam) / 2 + 30 * (float(lam) / 2 + 50) ** 0.5 + 500)
    with mp.workdps(dps):
        x, d1, d2, lam = mp.mpf(x), mp.mpf(d1), mp.mpf(d2), mp.mpf(lam)

        def term(k):
            return (
                mp.e ** (-lam / 2)
                * (lam / 2) ** k
                / mp.gamma(k + 1)
                / mp.beta(d1 / 2 + k, d2 / 2)
                * (d1 / d2) ** (d1 / 2 + k)
                * x ** (d1 / 2 + k - 1)
                * (1 + d1 * x / d2) ** (-(d1 + d2) / 2 - k)
            )

        return float(mp.log(mp.fsum(term(k) for k in range(kmax))))


def trapezoid_log_integral(log_f, grid):
    """log of the trapezoid integral of exp(log_f) over a dense grid."""
    vals = np.asarray(log_f(grid), dtype=float)
    m = vals.max()
    return m + np.log(np.trapezoid(np.exp(vals - m), grid))


def trapezoid_moments(log_f, grid):
    """(mean, sd) of the density proportional to exp(log_f) on the grid."""
    vals = np.asarray(log_f(grid), dtype=float)
    w = np.exp(vals - vals.max())
    z = np.trapezoid(w, grid)
    mean = np.trapezoid(grid * w, grid) / z
    second = np.trapezoid(grid**2 * w, grid) / z
    return float(mean), float(np.sqrt(second - mean**2))
