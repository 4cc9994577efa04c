#pragma once

// Cell-centered pressure Poisson problem with homogeneous Neumann walls,
// solved by (preconditioned) conjugate gradients on the zero-mean subspace.
//
// The default preconditioner is the exact inverse of the discrete operator in
// the cosine basis (DCT-II / DCT-III through FFTW), so CG normally terminates
// after one or two iterations; `Preconditioner::none` gives plain CG.

#include "cavitydyn/fluid/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace cavitydyn::fluid {

enum class Preconditioner { none, spectral };

struct PoissonResult {
    ScalarField phi;
    int iterations = 0;
    std::vector<double> residual_history;
};

class PressureSolver {
  public:
    static constexpr double default_rel_tol = 1e-10;

    explicit PressureSolver(const MacGrid& grid, Preconditioner pre = Preconditioner::spectral,
                            double rel_tol = default_rel_tol)
        : grid_(grid), pre_(pre), rel_tol_(rel_tol) {
        const double n13 = std::cbrt(double(grid.cell_count()));
        max_iters_ = int(std::min(20000.0, std::ceil(10.0 * n13 * n13)));
        if (pre_ == Preconditioner::spectral) {
            setup_spectral();
        }
    }

    PressureSolver(const PressureSolver&) = delete;
    PressureSolver& operator=(const PressureSolver&) = delete;
    PressureSolver(PressureSolver&&) = default;
    PressureSolver& operator=(PressureSolver&&) = default;

    const MacGrid& grid() const { return grid_; }
    int max_iterations() const { return max_iters_; }
    void set_max_iterations(int n) { max_iters_ = n; }

    /// Applies the SPD operator -div(grad(.)).
    std::vector<double> apply(const std::vector<double>& x) const {
        const MacGrid& g = grid_;
        std::vector<double> out(x.size(), 0.0);
        const std::array<std::ptrdiff_t, 3> cs{1, g.n[0], std::ptrdiff_t(g.n[0]) * g.n[1]};
        const std::array<double, 3> ih2{1.0 / (g.h[0] * g.h[0]), 1.0 / (g.h[1] * g.h[1]),
                                        1.0 / (g.h[2] * g.h[2])};
        for (int k = 0; k < g.n[2]; ++k) {
            for (int j = 0; j < g.n[1]; ++j) {
                for (int i = 0; i < g.n[0]; ++i) {
                    const Index3 idx{i, j, k};
                    const std::ptrdiff_t cell = std::ptrdiff_t(g.cell_index(i, j, k));
                    double acc = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        if (idx[a] > 0) {
                            acc += (x[cell] - x[cell - cs[a]]) * ih2[a];
                        }
                        if (idx[a] < g.n[a] - 1) {
                            acc += (x[cell] - x[cell + cs[a]]) * ih2[a];
                        }
                    }
                    out[cell] = acc;
                }
            }
        }
        return out;
    }

    /// Solves -div grad phi = b (b is made zero-mean first). Returns zero-mean phi.
    PoissonResult solve(std::vector<double> b) const {
        PoissonResult res;
        res.phi = ScalarField(grid_);
        remove_mean(b);
        const double bnorm = norm(b);
        if (bnorm == 0.0) {
            return res;
        }
        std::vector<double>& x = res.phi.data;
        std::vector<double> r = b;
        std::vector<double> z = precondition(r);
        std::vector<double> p = z;
        double rz = dot(r, z);
        for (int it = 1; it <= max_iters_; ++it) {
            const std::vector<double> Ap = apply(p);
            const double pAp = dot(p, Ap);
            if (!(pAp > 0.0)) {
                break;
            }
            const double alpha = rz / pAp;
            for (std::size_t n = 0; n < x.size(); ++n) {
                x[n] += alpha * p[n];
                r[n] -= alpha * Ap[n];
            }
            const double rel = norm(r) / bnorm;
            res.residual_history.push_back(rel);
            res.iterations = it;
            if (!std::isfinite(rel)) {
                break;
            }
            if (rel <= rel_tol_) {
                remove_mean(x);
                return res;
            }
            z = precondition(r);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t n = 0; n < p.size(); ++n) {
                p[n] = z[n] + beta * p[n];
            }
        }
        std::ostringstream msg;
        msg << "pressure CG did not reach relative residual " << rel_tol_ << " in " << max_iters_
            << " iterations; residual history:";
        for (double v : res.residual_history) {
            msg << ' ' << v;
        }
        throw SolverDivergence(msg.str(), res.residual_history);
    }

  private:
    struct FftwFree {
        void operator()(double* p) const { fftw_free(p); }
    };
    struct PlanDeleter {
        void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
    };

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    void setup_spectral() {
        const MacGrid& g = grid_;
        const std::size_t N = g.cell_count();
        buffer_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * N)));
        {
            // FFTW's planner is not thread safe; ESTIMATE keeps plans deterministic.
            std::lock_guard lock(planner_mutex());
            forward_.reset(fftw_plan_r2r_3d(g.n[2], g.n[1], g.n[0], buffer_.get(), buffer_.get(), FFTW_REDFT10,
                                            FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE));
            backward_.reset(fftw_plan_r2r_3d(g.n[2], g.n[1], g.n[0], buffer_.get(), buffer_.get(), FFTW_REDFT01,
                                             FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE));
        }
        const double norm = 8.0 * double(g.n[0]) * g.n[1] * g.n[2];
        inv_eig_.assign(N, 0.0);
        for (int k = 0; k < g.n[2]; ++k) {
            for (int j = 0; j < g.n[1]; ++j) {
                for (int i = 0; i < g.n[0]; ++i) {
                    const Index3 idx{i, j, k};
                    double lam = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        const double s = std::sin(std::numbers::pi * idx[a] / (2.0 * g.n[a]));
                        lam += 4.0 * s * s / (g.h[a] * g.h[a]);
                    }
                    inv_eig_[g.cell_index(i, j, k)] = lam > 0.0 ? 1.0 / (lam * norm) : 0.0;
                }
            }
        }
    }

    std::vector<double> precondition(const std::vector<double>& r) const {
        if (pre_ == Preconditioner::none) {
            return r;
        }
        std::copy(r.begin(), r.end(), buffer_.get());
        fftw_execute(forward_.get());
        for (std::size_t n = 0; n < r.size(); ++n) {
            buffer_.get()[n] *= inv_eig_[n];
        }
        fftw_execute(backward_.get());
        std::vector<double> z(buffer_.get(), buffer_.get() + r.size());
        remove_mean(z);
        return z;
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    }
    static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }
    static void remove_mean(std::vector<double>& a) {
        const double mean = std::accumulate(a.begin(), a.end(), 0.0) / double(a.size());
        for (double& v : a) {
            v -= mean;
        }
    }

    MacGrid grid_;
    Preconditioner pre_;
    double rel_tol_;
    int max_iters_ = 0;
    std::unique_ptr<double, FftwFree> buffer_;
    std::unique_ptr<fftw_plan_s, PlanDeleter> forward_;
    std::unique_ptr<fftw_plan_s, PlanDeleter> backward_;
    std::vector<double> inv_eig_;
};

} // namespace cavitydyn::fluid
