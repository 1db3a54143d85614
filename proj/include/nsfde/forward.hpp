#pragma once

#include <functional>
#include <vector>

#include "nsfde/kernels.hpp"
#include "nsfde/tree.hpp"

namespace nsfde {

struct BoxConstraint {
    std::vector<double> lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    double clamp(double v, int k) const {
        if (v < lo[static_cast<size_t>(k)]) return lo[static_cast<size_t>(k)];
        if (v > hi[static_cast<size_t>(k)]) return hi[static_cast<size_t>(k)];
        return v;
    }
};

// Controlled NSFDE  d[X(t) - g(t, X^t)] = b dt + sigma dW,  X = phi on [-delta, 0].
// Coefficient evaluators receive the grid index and the backward window X^t
// (segment[r] = X(t - r dt)). kappa is the declared contraction bound of g.
struct NsfdeProblem {
    int n = 1, m = 1;
    double kappa = 0.0;
    std::function<Vec(int i, const Segment& xpast)> g;  // null means g == 0
    std::function<Vec(int i, const Segment& xpast, const Vec& u)> drift;
    std::function<Mat(int i, const Segment& xpast, const Vec& u)> diffusion;  // n x d
    std::function<double(int i, const Segment& xpast, const Vec& u)> running_cost;
    std::vector<Vec> initial_path;  // phi at levels -L..0 (L+1 deterministic values)
    BoxConstraint box;
};

using ControlProcess = AdaptedProcess;  // levels 0..N-1, values in the box

struct NeutralOptions {
    double tol = 1e-12;
    int max_iter = 100;
};

// Fixed-point recovery of x from D = x - g(t, segment(x)); the endpoint slot
// of `window` is overwritten during iteration. Converges geometrically at
// rate <= kappa < 1.
Vec neutral_resolve(const Vec& D, Segment& window, int i,
                    const std::function<Vec(int, const Segment&)>& g, double kappa, const NeutralOptions& opts,
                    int64_t node_for_error);

AdaptedProcess solve_nsfde(const NsfdeProblem& p, const ControlProcess& u, const ScenarioTree& tree,
                           const NeutralOptions& opts = {});

// Linear variational equation (the chi of the first-order expansion), driven
// by (A3) kernels sampled along the candidate pair and a direction v.
// chi == 0 on levels <= 0.
AdaptedProcess solve_variational(const Linearization& lin, const AdaptedProcess& v, const ScenarioTree& tree,
                                 const NeutralOptions& opts = {});

// rho(t) = int_0^t b_u v ds + int_0^t sigma_u v dW, the perturbation process
// of the duality; rho(0) = 0, levels 0..N.
AdaptedProcess perturbation_rho(const Linearization& lin, const AdaptedProcess& v, const ScenarioTree& tree);

// J(u) = E[ sum_i l(t_i, X^{t_i}, u_i) dt ], left Riemann sum, exact tree mean.
double eval_cost(const NsfdeProblem& p, const AdaptedProcess& X, const ControlProcess& u, const ScenarioTree& tree);

// Remainder norms r(eps) = E[ sup_i |X_eps - Xbar - eps chi|^2 ]^{1/2} of the
// first-order expansion, for each eps.
struct ExpansionRow {
    double eps;
    double remainder;
};
std::vector<ExpansionRow> first_order_check(const NsfdeProblem& p, const ControlProcess& ubar,
                                            const AdaptedProcess& chi, const AdaptedProcess& v,
                                            const std::vector<double>& epsilons, const ScenarioTree& tree,
                                            const NeutralOptions& opts = {});

}  // namespace nsfde
