#pragma once

#include <functional>
#include <vector>

namespace svevt::optim {

using ObjFn = std::function<double(const std::vector<double>&)>;
using ObjFn1d = std::function<double(double)>;

struct MinResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Central-difference gradient of f at x.
std::vector<double> num_gradient(const ObjFn& f, const std::vector<double>& x,
                                 double step = 1e-6);

// Central-difference Hessian of f at x (symmetric).
std::vector<std::vector<double>> num_hessian(const ObjFn& f, const std::vector<double>& x,
                                             double step = 1e-4);

// Quasi-Newton minimizer with backtracking line search.
MinResult bfgs(const ObjFn& f, std::vector<double> x0, int max_iter = 500,
               double grad_tol = 1e-8);

// Derivative-free simplex minimizer.
MinResult nelder_mead(const ObjFn& f, std::vector<double> x0, int max_iter = 2000,
                      double ftol = 1e-10, double scale = 0.1);

// Brent's method on [a, b]. Returns argmin.
double brent_min(const ObjFn1d& f, double a, double b, double tol = 1e-10);

// Solve A x = b for symmetric positive definite A via Cholesky.
// Throws NumericError if A is not positive definite.
std::vector<double> cholesky_solve(std::vector<std::vector<double>> a,
                                   std::vector<double> b);

// Lower-triangular Cholesky factor L with A = L L^T.
std::vector<std::vector<double>> cholesky_lower(std::vector<std::vector<double>> a);

// Inverse of a symmetric positive definite matrix via Cholesky.
std::vector<std::vector<double>> spd_inverse(const std::vector<std::vector<double>>& a);

// Eigenvalues of a symmetric matrix (Jacobi rotations), ascending order.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a,
                                          int max_sweeps = 100);

}  // namespace svevt::optim
