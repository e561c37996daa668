#include "svevt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svevt/errors.hpp"

namespace svevt::optim {

std::vector<double> num_gradient(const ObjFn& f, const std::vector<double>& x, double step) {
    std::size_t n = x.size();
    std::vector<double> g(n), xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        double h = step * std::max(1.0, std::fabs(x[i]));
        xp[i] = x[i] + h;
        double fp = f(xp);
        xp[i] = x[i] - h;
        double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<std::vector<double>> num_hessian(const ObjFn& f, const std::vector<double>& x,
                                             double step) {
    std::size_t n = x.size();
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    std::vector<double> xp = x;
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = step * std::max(1.0, std::fabs(x[i]));
    double f0 = f(x);
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] = x[i] + h[i];
        double fp = f(xp);
        xp[i] = x[i] - h[i];
        double fm = f(xp);
        xp[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            xp[i] = x[i] + h[i];
            xp[j] = x[j] + h[j];
            double fpp = f(xp);
            xp[j] = x[j] - h[j];
            double fpm = f(xp);
            xp[i] = x[i] - h[i];
            double fmm = f(xp);
            xp[j] = x[j] + h[j];
            double fmp = f(xp);
            xp[i] = x[i];
            xp[j] = x[j];
            hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return hess;
}

MinResult bfgs(const ObjFn& f, std::vector<double> x0, int max_iter, double grad_tol) {
    std::size_t n = x0.size();
    MinResult res;
    res.x = std::move(x0);
    res.fval = f(res.x);

    // inverse Hessian approximation, starts at identity
    std::vector<std::vector<double>> hinv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) hinv[i][i] = 1.0;

    std::vector<double> g = num_gradient(f, res.x);

    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter;
        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
        if (gnorm < grad_tol) {
            res.converged = true;
            return res;
        }

        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dir[i] -= hinv[i][j] * g[j];

        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
        if (!(slope < 0.0)) {
            // reset to steepest descent if curvature info went bad
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(hinv[i].begin(), hinv[i].end(), 0.0);
                hinv[i][i] = 1.0;
                dir[i] = -g[i];
            }
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
            if (!(slope < 0.0)) {
                res.converged = true;
                return res;
            }
        }

        // backtracking Armijo line search
        double alpha = 1.0;
        const double c1 = 1e-4;
        std::vector<double> xnew(n);
        double fnew = res.fval;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xnew[i] = res.x[i] + alpha * dir[i];
            fnew = f(xnew);
            if (std::isfinite(fnew) && fnew <= res.fval + c1 * alpha * slope) {
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) {
            res.converged = gnorm < 1e-5;
            return res;
        }

        std::vector<double> gnew = num_gradient(f, xnew);
        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xnew[i] - res.x[i];
            y[i] = gnew[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-12) {
            double rho = 1.0 / sy;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hy[i] += hinv[i][j] * y[j];
            double yhy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hinv[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                                  rho * (s[i] * hy[j] + hy[i] * s[j]);
                }
            }
        }
        res.x = std::move(xnew);
        res.fval = fnew;
        g = std::move(gnew);
    }
    return res;
}

MinResult nelder_mead(const ObjFn& f, std::vector<double> x0, int max_iter, double ftol,
                      double scale) {
    std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double step = scale * std::max(1.0, std::fabs(x0[i]));
        simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    MinResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter;
        // order
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> sx(n + 1);
        std::vector<double> sf(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            sx[i] = simplex[idx[i]];
            sf[i] = fv[idx[i]];
        }
        simplex = std::move(sx);
        fv = std::move(sf);

        if (std::fabs(fv[n] - fv[0]) <
            ftol * (std::fabs(fv[0]) + std::fabs(fv[n]) + 1e-30)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = point(-1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = point(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                simplex[n] = std::move(xe);
                fv[n] = fe;
            } else {
                simplex[n] = std::move(xr);
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = std::move(xr);
            fv[n] = fr;
        } else {
            std::vector<double> xc = point(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = std::move(xc);
                fv[n] = fc;
            } else {
                // shrink toward best
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.fval = fv[best];
    return res;
}

double brent_min(const ObjFn1d& f, double a, double b, double tol) {
    const double kGold = 0.3819660112501051;
    double x = a + kGold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double m = 0.5 * (a + b);
        double tol1 = tol * std::fabs(x) + 1e-12;
        double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) return x;
        bool parabolic = false;
        if (std::fabs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            double etmp = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * etmp) && p > q * (a - x) &&
                p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = kGold * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u < x)
                b = x;
            else
                a = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return x;
}

namespace {

// lower-triangular Cholesky factor in place; throws on non-PD
void cholesky_factor(std::vector<std::vector<double>>& a) {
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            if (i == j) {
                if (s <= 0.0) throw NumericError("matrix not positive definite");
                a[i][i] = std::sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
        for (std::size_t j = i + 1; j < n; ++j) a[i][j] = 0.0;
    }
}

}  // namespace

std::vector<std::vector<double>> cholesky_lower(std::vector<std::vector<double>> a) {
    cholesky_factor(a);
    return a;
}

std::vector<double> cholesky_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    std::size_t n = a.size();
    if (b.size() != n) throw NumericError("cholesky_solve dimension mismatch");
    cholesky_factor(a);
    // forward solve L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    // back solve L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k][ii] * b[k];
        b[ii] = s / a[ii][ii];
    }
    return b;
}

std::vector<std::vector<double>> spd_inverse(const std::vector<std::vector<double>>& a) {
    std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        std::vector<double> col = cholesky_solve(a, e);
        for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
    }
    // symmetrize against roundoff
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            inv[i][j] = inv[j][i] = 0.5 * (inv[i][j] + inv[j][i]);
    return inv;
}

std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a, int max_sweeps) {
    std::size_t n = a.size();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace svevt::optim
