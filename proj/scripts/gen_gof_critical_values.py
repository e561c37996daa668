#!/usr/bin/env python3
"""Regenerate include/svevt/gof_critical_values.hpp.

Asymptotic upper-tail critical points of the Cramer-von Mises (W^2) and
Anderson-Darling (A^2) statistics for testing a generalized Pareto fit when
both the shape and the scale are estimated by maximum likelihood
(Choulakian-Stephens case 3).

Method: the empirical process of the fitted-CDF transforms converges to a
Gaussian process with covariance

    rho(s,t) = min(s,t) - s*t - g(s)' * Sigma * g(t)

where g(t) = (dF/dxi, dF/dbeta) at the t-quantile and Sigma is the asymptotic
covariance of the MLE, Sigma = (1+xi) * [[1+xi, -beta], [-beta, 2*beta^2]]
(valid for xi > -1/2; beta drops out of the product). W^2 is the integral of
the squared process, A^2 the integral weighted by 1/(t(1-t)); both are
distributed as sum_i lambda_i * chi2_1 with lambda_i the eigenvalues of the
corresponding covariance kernel. Tail probabilities are inverted with Imhof's
characteristic-function formula.

Self-check: with Sigma = 0 (fully specified null) the same machinery must
reproduce the classical points W^2_0.10 = 0.347, A^2_0.10 = 1.933.
"""

import numpy as np
from scipy import integrate, optimize

GRID_M = 2000
XI_GRID = [-0.9, -0.7, -0.5, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0]
LEVELS = [0.25, 0.10, 0.05, 0.01]


def grad_cdf(t, xi):
    """(dF/dxi, dF/dbeta) of the GPD CDF at its t-quantile, beta = 1."""
    omt = 1.0 - t
    L = np.log(omt)
    if abs(xi) < 1e-9:
        return -omt * L * L / 2.0, omt * L
    d_xi = -omt * (-(L / xi) - (1.0 - omt**xi) / xi**2)
    d_beta = -(1.0 / xi) * (omt - omt ** (1.0 + xi))
    return d_xi, d_beta


def kernel_eigenvalues(xi, weighted, estimated=True, m=GRID_M):
    t = (np.arange(m) + 0.5) / m
    cov = np.minimum.outer(t, t) - np.outer(t, t)
    if estimated:
        sigma = (1.0 + xi) * np.array([[1.0 + xi, -1.0], [-1.0, 2.0]])
        g = np.array([grad_cdf(ti, xi) for ti in t])  # m x 2
        cov -= g @ sigma @ g.T
    if weighted:
        w = 1.0 / np.sqrt(t * (1.0 - t))
        cov = cov * np.outer(w, w)
    eig = np.linalg.eigvalsh(cov / m)
    eig = eig[eig > 1e-10][::-1]
    return eig


def imhof_tail(x, lam):
    """P(sum lam_i chi2_1 > x) by Imhof (1961)."""

    def integrand(u):
        theta = 0.5 * np.sum(np.arctan(lam * u)) - 0.5 * x * u
        rho = np.exp(0.25 * np.sum(np.log1p((lam * u) ** 2)))
        return np.sin(theta) / (u * rho)

    val, _ = integrate.quad(integrand, 1e-10, 300.0, limit=2000)
    return 0.5 + val / np.pi


def critical_value(lam, level):
    lo, hi = 1e-3, 50.0
    return optimize.brentq(lambda x: imhof_tail(x, lam) - level, lo, hi, xtol=1e-10)


def main():
    # fully-specified sanity anchors
    for weighted, name, want in ((False, "W2", 0.34730), (True, "A2", 1.9330)):
        lam = kernel_eigenvalues(0.0, weighted, estimated=False)
        got = critical_value(lam, 0.10)
        assert abs(got - want) / want < 0.005, (name, got, want)
        print(f"anchor {name}(0.10, fully specified) = {got:.5f} (expect {want})")

    w2 = np.zeros((len(XI_GRID), len(LEVELS)))
    a2 = np.zeros_like(w2)
    for i, xi in enumerate(XI_GRID):
        lam_w = kernel_eigenvalues(xi, weighted=False)
        lam_a = kernel_eigenvalues(xi, weighted=True)
        for j, lv in enumerate(LEVELS):
            w2[i, j] = critical_value(lam_w, lv)
            a2[i, j] = critical_value(lam_a, lv)
        print(f"xi={xi:+.2f}  W2={np.round(w2[i], 4)}  A2={np.round(a2[i], 4)}")

    with open("include/svevt/gof_critical_values.hpp", "w") as f:
        f.write("// Generated by scripts/gen_gof_critical_values.py -- do not edit by hand.\n")
        f.write("//\n")
        f.write("// Asymptotic upper-tail critical points of the Cramer-von Mises (W2) and\n")
        f.write("// Anderson-Darling (A2) statistics for a generalized Pareto fit with both\n")
        f.write("// parameters estimated by maximum likelihood, tabulated against the shape\n")
        f.write("// xi. Linear interpolation in xi; clamped at the grid ends.\n")
        f.write("#pragma once\n\n")
        f.write("#include <array>\n\n")
        f.write("namespace svevt::gof_table {\n\n")
        f.write(f"inline constexpr int kNumXi = {len(XI_GRID)};\n")
        f.write(f"inline constexpr int kNumLevels = {len(LEVELS)};\n\n")
        f.write("inline constexpr std::array<double, kNumXi> kXi = {\n    ")
        f.write(", ".join(f"{x:.2f}" for x in XI_GRID))
        f.write("};\n\n")
        f.write("inline constexpr std::array<double, kNumLevels> kLevels = {")
        f.write(", ".join(f"{x:.2f}" for x in LEVELS))
        f.write("};\n\n")
        for name, tab in (("kW2", w2), ("kA2", a2)):
            f.write(f"inline constexpr std::array<std::array<double, kNumLevels>, kNumXi> {name} = {{{{\n")
            for row in tab:
                f.write("    {" + ", ".join(f"{v:.4f}" for v in row) + "},\n")
            f.write("}};\n\n")
        f.write("}  // namespace svevt::gof_table\n")
    print("wrote include/svevt/gof_critical_values.hpp")


if __name__ == "__main__":
    main()
