#include "nsfde/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsfde {

Vec neutral_resolve(const Vec& D, Segment& window, int i,
                    const std::function<Vec(int, const Segment&)>& g, double kappa, const NeutralOptions& opts,
                    int64_t node_for_error) {
    if (!(kappa < 1.0)) throw std::invalid_argument("neutral_resolve: kappa must be < 1 (assumption A2)");
    if (!g) return D;
    Vec x = D;
    double res = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        window.at[0] = x;
        Vec next = D + g(i, window);
        res = max_abs(next - x);
        x = next;
        if (res <= opts.tol) return x;
    }
    // One more residual evaluation at the final iterate.
    window.at[0] = x;
    res = max_abs(D + g(i, window) - x);
    if (res <= opts.tol) return x;
    throw std::runtime_error("neutral_resolve: no convergence at level " + std::to_string(i) + " node " +
                             std::to_string(node_for_error) + ", residual " + std::to_string(res));
}

static Segment backward_window(const AdaptedProcess& X, int i, int L, int64_t node) {
    return segment_view(X, i, L, Direction::Backward, Boundary::Zero, i, node);
}

AdaptedProcess solve_nsfde(const NsfdeProblem& p, const ControlProcess& u, const ScenarioTree& tree,
                           const NeutralOptions& opts) {
    const int N = tree.grid().N;
    const int L = tree.grid().L;
    if (static_cast<int>(p.initial_path.size()) != L + 1)
        throw std::invalid_argument("solve_nsfde: initial path must supply levels -L..0");
    AdaptedProcess X(tree, -L, N, p.n, 1);
    for (int k = 0; k <= L; ++k) X.set_value(k - L, 0, p.initial_path[static_cast<size_t>(k)]);

    // D(t) = X(t) - g(t, X^t), advanced explicitly; X recovered per node.
    AdaptedProcess D(tree, 0, N, p.n, 1);
    {
        Segment seg = backward_window(X, 0, L, 0);
        Vec d0 = X.value(0, 0);
        if (p.g) d0 -= p.g(0, seg);
        D.set_value(0, 0, d0);
    }
    for (int i = 0; i < N; ++i) {
        const int64_t nodes = tree.nodes_at(i);
        for (int64_t nd = 0; nd < nodes; ++nd) {
            Segment seg = backward_window(X, i, L, nd);
            const Vec uv = u.value(i, nd);
            const Vec b = p.drift ? p.drift(i, seg, uv) : Vec(p.n, 1);
            const Mat sig = p.diffusion ? p.diffusion(i, seg, uv) : Mat(p.n, tree.bdim());
            const Vec d = D.value(i, nd);
            for (int br = 0; br < tree.branching(); ++br) {
                Vec dn = d;
                dn.add_scaled(tree.grid().dt, b);
                for (int c = 0; c < tree.bdim(); ++c)
                    for (int r = 0; r < p.n; ++r) dn[r] += sig(r, c) * tree.dw(br, c);
                const int64_t ch = tree.child(nd, br);
                D.set_value(i + 1, ch, dn);
                Segment win = backward_window(X, i + 1, L, ch);  // lag-0 slot is stale
                X.set_value(i + 1, ch, neutral_resolve(dn, win, i + 1, p.g, p.kappa, opts, ch));
            }
        }
    }
    return X;
}

namespace {

// Sum_a w_a K(i, node, a) * seg[lag_a], block `blk` of the table.
Vec kernel_apply(const KernelTable& k, int i, int64_t node, const Segment& seg, int blk = 0) {
    Vec out(k.rows, 1);
    for (int a = 0; a < k.atoms(); ++a) {
        const Mat K = k.at(i, node, a);
        out.add_scaled(k.measure.atoms[static_cast<size_t>(a)].weight, mul(k.empty() ? K : k.at(i, node, a, blk), seg[k.measure.atoms[static_cast<size_t>(a)].lag]));
    }
    return out;
}

}  // namespace

AdaptedProcess solve_variational(const Linearization& lin, const AdaptedProcess& v, const ScenarioTree& tree,
                                 const NeutralOptions& opts) {
    const int N = tree.grid().N;
    const int L = tree.grid().L;
    const int n = lin.n;
    AdaptedProcess chi(tree, -L, N, n, 1);  // zero history
    AdaptedProcess D(tree, 0, N, n, 1);     // D(0) = 0 since chi vanishes on [-delta, 0]

    const bool has_g = !lin.k.G.empty();
    for (int i = 0; i < N; ++i) {
        const int64_t nodes = tree.nodes_at(i);
        for (int64_t nd = 0; nd < nodes; ++nd) {
            Segment seg = backward_window(chi, i, L, nd);
            const Vec vv = v.value(i, nd);
            Vec b = lin.k.B.empty() ? Vec(n, 1) : kernel_apply(lin.k.B, i, nd, seg);
            b += mul(lin.b_u.value(i, nd), vv);
            Mat sig = lin.sig_u_apply(i, nd, vv);
            if (!lin.k.Sig.empty())
                for (int c = 0; c < lin.d; ++c) {
                    const Vec col = kernel_apply(lin.k.Sig, i, nd, seg, c);
                    for (int r = 0; r < n; ++r) sig(r, c) += col[r];
                }
            const Vec d = D.value(i, nd);
            for (int br = 0; br < tree.branching(); ++br) {
                Vec dn = d;
                dn.add_scaled(tree.grid().dt, b);
                for (int c = 0; c < tree.bdim(); ++c)
                    for (int r = 0; r < n; ++r) dn[r] += sig(r, c) * tree.dw(br, c);
                const int64_t ch = tree.child(nd, br);
                D.set_value(i + 1, ch, dn);
                if (has_g) {
                    Segment win = backward_window(chi, i + 1, L, ch);
                    auto gfun = [&lin, ch](int lev, const Segment& s) { return kernel_apply(lin.k.G, lev, ch, s); };
                    chi.set_value(i + 1, ch, neutral_resolve(dn, win, i + 1, gfun, lin.k.kappa, opts, ch));
                } else {
                    chi.set_value(i + 1, ch, dn);
                }
            }
        }
    }
    return chi;
}

AdaptedProcess perturbation_rho(const Linearization& lin, const AdaptedProcess& v, const ScenarioTree& tree) {
    const int N = tree.grid().N;
    AdaptedProcess rho(tree, 0, N, lin.n, 1);
    for (int i = 0; i < N; ++i) {
        const int64_t nodes = tree.nodes_at(i);
        for (int64_t nd = 0; nd < nodes; ++nd) {
            const Vec vv = v.value(i, nd);
            const Vec b = mul(lin.b_u.value(i, nd), vv);
            const Mat sig = lin.sig_u_apply(i, nd, vv);
            const Vec cur = rho.value(i, nd);
            for (int br = 0; br < tree.branching(); ++br) {
                Vec nx = cur;
                nx.add_scaled(tree.grid().dt, b);
                for (int c = 0; c < tree.bdim(); ++c)
                    for (int r = 0; r < lin.n; ++r) nx[r] += sig(r, c) * tree.dw(br, c);
                rho.set_value(i + 1, tree.child(nd, br), nx);
            }
        }
    }
    return rho;
}

double eval_cost(const NsfdeProblem& p, const AdaptedProcess& X, const ControlProcess& u, const ScenarioTree& tree) {
    const int N = tree.grid().N;
    const int L = tree.grid().L;
    double J = 0.0;
    for (int i = 0; i < N; ++i) {
        const int64_t nodes = tree.nodes_at(i);
        double lvl = 0.0;
        for (int64_t nd = 0; nd < nodes; ++nd) {
            Segment seg = backward_window(X, i, L, nd);
            lvl += p.running_cost ? p.running_cost(i, seg, u.value(i, nd)) : 0.0;
        }
        J += tree.grid().dt * lvl / static_cast<double>(nodes);
    }
    return J;
}

std::vector<ExpansionRow> first_order_check(const NsfdeProblem& p, const ControlProcess& ubar,
                                            const AdaptedProcess& chi, const AdaptedProcess& v,
                                            const std::vector<double>& epsilons, const ScenarioTree& tree,
                                            const NeutralOptions& opts) {
    const int N = tree.grid().N;
    const AdaptedProcess Xbar = solve_nsfde(p, ubar, tree, opts);
    std::vector<ExpansionRow> rows;
    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw std::invalid_argument("first_order_check: epsilons must be positive");
        ControlProcess ue = ubar;
        for (int i = 0; i < N; ++i) {
            auto& lvl = ue.level_data(i);
            const auto& dv = v.level_data(i);
            for (size_t k = 0; k < lvl.size(); ++k) lvl[k] += eps * dv[k];
        }
        const AdaptedProcess Xe = solve_nsfde(p, ue, tree, opts);
        // pathwise running max of |X_eps - Xbar - eps*chi|^2 over levels 0..N
        std::vector<double> runmax(1, 0.0);
        for (int lev = 0; lev <= N; ++lev) {
            const int64_t nodes = tree.nodes_at(lev);
            std::vector<double> nxt(static_cast<size_t>(nodes), 0.0);
            for (int64_t nd = 0; nd < nodes; ++nd) {
                const Vec diff = Xe.value(lev, nd) - Xbar.value(lev, nd) - eps * chi.value(lev, nd);
                const double prev = (lev == 0) ? 0.0 : runmax[static_cast<size_t>(tree.parent(nd))];
                nxt[static_cast<size_t>(nd)] = std::max(prev, norm2sq(diff));
            }
            runmax.swap(nxt);
        }
        double mean = 0.0;
        for (double x : runmax) mean += x;
        mean /= static_cast<double>(runmax.size());
        rows.push_back({eps, std::sqrt(mean)});
    }
    return rows;
}

}  // namespace nsfde
