"""Independent numerical oracles used by the test suite.

Everything here is computed by quadrature, dense linear algebra or brute
force, never through the library's own simulation / factorization paths.
"""

import numpy as np
from scipy import integrate, special
from scipy.stats import gamma as gamma_dist


def ts_density(x, C, alpha, beta):
    return C * x ** (-1.0 - alpha) * np.exp(-beta * x)


def ts_moment(k, C, alpha, beta):
    """int x^k * density dx over (0, inf) by quadrature."""
    val, _ = integrate.quad(lambda x: x ** k * ts_density(x, C, alpha, beta), 0, np.inf)
    return val


def ts_tail_mass(eps, C, alpha, beta):
    val, _ = integrate.quad(lambda x: ts_density(x, C, alpha, beta), eps, np.inf)
    return val


def ts_tail_cdf_grid(eps, C, alpha, beta, upper, n_grid=20000):
    """CDF of the normalized jump density on [eps, upper], on a log grid."""
    grid = np.geomspace(eps, upper, n_grid)
    dens = ts_density(grid, C, alpha, beta)
    cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
    cdf /= ts_tail_mass(eps, C, alpha, beta)
    return grid, np.clip(cdf, 0.0, 1.0)


def truncated_ts_moments(C, alpha, beta, n_terms, rate):
    """Mean and variance of the n-term thinned stable series.

    Conditions on the last Poisson epoch G_n ~ Gamma(n_terms, rate): given
    G_n = g the earlier epochs are i.i.d. uniform on (0, g), so the inner
    moments reduce to incomplete-gamma integrals of the candidate map
    h(u) = (alpha u / C)^(-1/alpha) with Bernoulli(e^{-beta x}) thinning.
    """
    n = n_terms

    def h(g):
        return (alpha * g / C) ** (-1.0 / alpha)

    def g1(x):
        return x * np.exp(-beta * x)

    def g2(x):
        return x * x * np.exp(-beta * x)

    def int_g1_above(c):
        # int_c^inf x e^{-beta x} C x^{-1-alpha} dx
        return (C * beta ** (alpha - 1) * special.gamma(1 - alpha)
                * special.gammaincc(1 - alpha, beta * c))

    def int_g2_above(c):
        return (C * beta ** (alpha - 2) * special.gamma(2 - alpha)
                * special.gammaincc(2 - alpha, beta * c))

    def cond_mean(g):
        c = h(g)
        return g1(c) + (n - 1) / g * int_g1_above(c)

    def cond_var(g):
        c = h(g)
        a1 = int_g1_above(c) / g
        a2 = int_g2_above(c) / g
        return (g2(c) - g1(c) ** 2) + (n - 1) * (a2 - a1 ** 2)

    gn = gamma_dist(a=n, scale=1.0 / rate)
    lo, hi = gn.ppf(1e-12), gn.ppf(1 - 1e-12)
    mean = integrate.quad(lambda g: cond_mean(g) * gn.pdf(g), lo, hi, limit=300)[0]
    e_var = integrate.quad(lambda g: cond_var(g) * gn.pdf(g), lo, hi, limit=300)[0]
    e_m2 = integrate.quad(lambda g: cond_mean(g) ** 2 * gn.pdf(g), lo, hi, limit=300)[0]
    return mean, e_var + e_m2 - mean ** 2


def gamma_fn_by_quadrature(z):
    """Gamma function via its integral definition, independent of scipy.special."""
    val, _ = integrate.quad(lambda t: t ** (z - 1.0) * np.exp(-t), 0, np.inf)
    return val


def dense_gp_posterior(Xw, y, Xw_test, kernel_fn, noise_variance, jitter_variance):
    """Naive O(n^3) GP posterior and log-likelihood via explicit inverse.

    ``kernel_fn`` maps a distance matrix to covariances; ``Xw``/``Xw_test``
    are warped coordinate matrices.
    """
    from scipy.spatial.distance import cdist

    n = Xw.shape[0]
    K = kernel_fn(cdist(Xw, Xw)) + jitter_variance * np.eye(n)
    Ky = K + noise_variance * np.eye(n)
    Ky_inv = np.linalg.inv(Ky)
    mean = kernel_fn(cdist(Xw, Xw_test)).T @ Ky_inv @ y
    K_cross = kernel_fn(cdist(Xw, Xw_test))
    cov = kernel_fn(cdist(Xw_test, Xw_test)) - K_cross.T @ Ky_inv @ K_cross
    sign, logdet = np.linalg.slogdet(Ky)
    assert sign > 0
    log_lik = -0.5 * y @ Ky_inv @ y - 0.5 * logdet - 0.5 * n * np.log(2 * np.pi)
    return mean, cov, log_lik


def brute_force_mixture(means, covs):
    """Mixture mean/cov by direct elementwise arithmetic loops."""
    N = len(means)
    m = len(means[0])
    mean = [sum(means[k][i] for k in range(N)) / N for i in range(m)]
    cov = [[0.0] * m for _ in range(m)]
    for k in range(N):
        for i in range(m):
            for j in range(m):
                cov[i][j] += (covs[k][i][j]
                              + (means[k][i] - mean[i]) * (means[k][j] - mean[j])) / N
    return np.asarray(mean), np.asarray(cov)
