#include "nsfde/tree.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsfde {

ScenarioTree::ScenarioTree(TimeGrid grid, int brownian_dim, int budget_bits) : grid_(grid), d_(brownian_dim) {
    if (d_ < 1 || d_ > 2) throw std::invalid_argument("ScenarioTree: brownian_dim must be 1 or 2");
    if (static_cast<int64_t>(d_) * grid_.N > budget_bits)
        throw std::invalid_argument("ScenarioTree: d*N = " + std::to_string(d_ * grid_.N) + " exceeds budget of " +
                                    std::to_string(budget_bits) + " bits");
    sqrt_dt_ = std::sqrt(grid_.dt);
}

AdaptedProcess::AdaptedProcess(const ScenarioTree& tree, int lo, int hi, int rows, int cols)
    : tree_(&tree), lo_(lo), hi_(hi), rows_(rows), cols_(cols) {
    if (hi_ < lo_) throw std::invalid_argument("AdaptedProcess: empty level range");
    data_.resize(static_cast<size_t>(hi_ - lo_ + 1));
    for (int lev = lo_; lev <= hi_; ++lev)
        data_[static_cast<size_t>(lev - lo_)].assign(static_cast<size_t>(tree.nodes_at(lev)) * dim(), 0.0);
}

std::vector<double>& AdaptedProcess::level_data(int level) {
    if (level < lo_ || level > hi_) throw std::out_of_range("AdaptedProcess: level " + std::to_string(level) + " not stored");
    return data_[static_cast<size_t>(level - lo_)];
}

const std::vector<double>& AdaptedProcess::level_data(int level) const {
    if (level < lo_ || level > hi_) throw std::out_of_range("AdaptedProcess: level " + std::to_string(level) + " not stored");
    return data_[static_cast<size_t>(level - lo_)];
}

double* AdaptedProcess::raw(int level, int64_t node) { return level_data(level).data() + static_cast<size_t>(node) * dim(); }

const double* AdaptedProcess::raw(int level, int64_t node) const {
    return level_data(level).data() + static_cast<size_t>(node) * dim();
}

Mat AdaptedProcess::value(int level, int64_t node) const {
    Mat v(rows_, cols_);
    const double* p = raw(level, node);
    for (int k = 0; k < dim(); ++k) v.a[static_cast<size_t>(k)] = p[k];
    return v;
}

void AdaptedProcess::set_value(int level, int64_t node, const Mat& v) {
    double* p = raw(level, node);
    for (int k = 0; k < dim(); ++k) p[k] = v.a[static_cast<size_t>(k)];
}

std::vector<double> cond_expect(const ScenarioTree& tree, int from_level, int to_level,
                                const std::vector<double>& values, int dim) {
    if (to_level > from_level) throw std::invalid_argument("cond_expect: target level above source level");
    const int sf = tree.storage_level(from_level);
    const int st = tree.storage_level(to_level);
    std::vector<double> cur = values;
    const int br = tree.branching();
    const double p = tree.branch_prob();
    for (int lev = sf; lev > st; --lev) {
        const int64_t parents = int64_t{1} << (static_cast<int64_t>(tree.bdim()) * (lev - 1));
        std::vector<double> nxt(static_cast<size_t>(parents) * dim, 0.0);
        for (int64_t pn = 0; pn < parents; ++pn)
            for (int b = 0; b < br; ++b) {
                const double* src = cur.data() + static_cast<size_t>((pn << tree.bdim()) | b) * dim;
                double* dst = nxt.data() + static_cast<size_t>(pn) * dim;
                for (int k = 0; k < dim; ++k) dst[k] += src[k];
            }
        for (double& x : nxt) x *= p;
        cur.swap(nxt);
    }
    return cur;
}

AdaptedProcess cond_expect_process(const AdaptedProcess& p, int level, int target_level) {
    AdaptedProcess out(p.tree(), target_level, target_level, p.rows(), p.cols());
    out.level_data(target_level) = cond_expect(p.tree(), level, target_level, p.level_data(level), p.dim());
    return out;
}

std::vector<double> ito_integrate(const ScenarioTree& tree, const AdaptedProcess& integrand, int a, int b) {
    if (a > b) throw std::invalid_argument("ito_integrate: a > b");
    const int n = integrand.rows();
    const int d = integrand.cols();
    if (d != tree.bdim()) throw std::invalid_argument("ito_integrate: integrand cols must equal brownian dim");
    std::vector<double> cur(static_cast<size_t>(tree.nodes_at(a)) * n, 0.0);
    for (int lev = a; lev < b; ++lev) {
        const int64_t nodes = tree.nodes_at(lev);
        std::vector<double> nxt(static_cast<size_t>(tree.nodes_at(lev + 1)) * n, 0.0);
        for (int64_t nd = 0; nd < nodes; ++nd) {
            const double* sig = integrand.raw(lev, nd);
            const double* acc = cur.data() + static_cast<size_t>(nd) * n;
            for (int br = 0; br < tree.branching(); ++br) {
                double* dst = nxt.data() + static_cast<size_t>(tree.child(nd, br)) * n;
                for (int r = 0; r < n; ++r) {
                    double inc = 0.0;
                    for (int c = 0; c < d; ++c) inc += sig[r * d + c] * tree.dw(br, c);
                    dst[r] = acc[r] + inc;
                }
            }
        }
        cur.swap(nxt);
    }
    return cur;
}

MartingaleRep martingale_represent(const ScenarioTree& tree, const std::vector<double>& values_at_i, int level_i,
                                   int dim) {
    MartingaleRep rep;
    const int d = tree.bdim();
    rep.Z = AdaptedProcess(tree, 0, std::max(0, level_i - 1), dim, d);
    const double inv2s = 1.0 / (2.0 * tree.sqrt_dt());
    std::vector<double> cur = values_at_i;  // conditional means M_{lev}
    for (int lev = tree.storage_level(level_i); lev > 0; --lev) {
        const int64_t parents = tree.nodes_at(lev - 1);
        std::vector<double> nxt(static_cast<size_t>(parents) * dim, 0.0);
        for (int64_t pn = 0; pn < parents; ++pn) {
            double* mean = nxt.data() + static_cast<size_t>(pn) * dim;
            for (int b = 0; b < tree.branching(); ++b) {
                const double* src = cur.data() + static_cast<size_t>(tree.child(pn, b)) * dim;
                for (int k = 0; k < dim; ++k) mean[k] += src[k];
            }
            for (int k = 0; k < dim; ++k) mean[k] *= tree.branch_prob();
            if (lev - 1 <= rep.Z.hi()) {
                double* z = rep.Z.raw(lev - 1, pn);
                // Z_c = (mean over children with +sqrt(dt) in c - mean with -) / (2 sqrt(dt))
                for (int c = 0; c < d; ++c) {
                    const double cp = 2.0 * tree.branch_prob();  // per-sign mean weight
                    for (int k = 0; k < dim; ++k) {
                        double diff = 0.0;
                        for (int b = 0; b < tree.branching(); ++b) {
                            const double* src = cur.data() + static_cast<size_t>(tree.child(pn, b)) * dim;
                            diff += (((b >> c) & 1) ? 1.0 : -1.0) * src[k];
                        }
                        z[k * d + c] = diff * cp * inv2s;
                    }
                }
            }
        }
        cur.swap(nxt);
    }
    rep.mean = Mat(dim, 1);
    for (int k = 0; k < dim; ++k) rep.mean[k] = cur[static_cast<size_t>(k)];
    return rep;
}

std::vector<double> reconstruct(const ScenarioTree& tree, const Mat& mean, const AdaptedProcess& Z, int level_i) {
    const int dim = mean.size();
    if (level_i > 0 && Z.hi() < level_i - 1) throw std::invalid_argument("reconstruct: Z missing levels");
    std::vector<double> cur(mean.a);
    for (int lev = 0; lev < tree.storage_level(level_i); ++lev) {
        const int64_t nodes = tree.nodes_at(lev);
        std::vector<double> nxt(static_cast<size_t>(tree.nodes_at(lev + 1)) * dim, 0.0);
        for (int64_t nd = 0; nd < nodes; ++nd) {
            const double* z = Z.raw(lev, nd);
            const double* acc = cur.data() + static_cast<size_t>(nd) * dim;
            for (int b = 0; b < tree.branching(); ++b) {
                double* dst = nxt.data() + static_cast<size_t>(tree.child(nd, b)) * dim;
                for (int k = 0; k < dim; ++k) {
                    double inc = 0.0;
                    for (int c = 0; c < tree.bdim(); ++c) inc += z[k * tree.bdim() + c] * tree.dw(b, c);
                    dst[k] = acc[k] + inc;
                }
            }
        }
        cur.swap(nxt);
    }
    return cur;
}

Segment segment_view(const AdaptedProcess& p, int t_index, int window, Direction dir, Boundary boundary,
                     int at_level, int64_t node) {
    Segment seg;
    seg.at.reserve(static_cast<size_t>(window) + 1);
    const ScenarioTree& tree = p.tree();
    for (int r = 0; r <= window; ++r) {
        int lev = (dir == Direction::Backward) ? t_index - r : t_index + r;
        if (lev < p.lo() || lev > p.hi()) {
            if (boundary == Boundary::Zero) {
                seg.at.emplace_back(p.rows(), p.cols());
                continue;
            }
            lev = (lev < p.lo()) ? p.lo() : p.hi();
        }
        if (tree.storage_level(lev) > tree.storage_level(at_level))
            throw std::logic_error("segment_view: read above evaluation level");
        seg.at.push_back(p.read_at(lev, at_level, node));
    }
    return seg;
}

TwoParamProcess::TwoParamProcess(const ScenarioTree& tree, int n) : tree_(&tree), n_(n) {
    const int N = tree.grid().N;
    const int L = tree.grid().L;
    rows_.reserve(static_cast<size_t>(N + L + 1));
    for (int i = 0; i <= N + L; ++i) rows_.emplace_back(tree, 0, std::max(0, N - 1), n, tree.bdim());
}

Mat TwoParamProcess::value(int i, int j, int64_t node_at_j) const {
    if (j < 0 || j >= tree_->grid().N) return Mat(n_, tree_->bdim());
    return rows_[static_cast<size_t>(i)].value(j, node_at_j);
}

Mat TwoParamProcess::read_at(int i, int j, int at_level, int64_t node_at) const {
    if (j < 0 || j >= tree_->grid().N) return Mat(n_, tree_->bdim());
    return rows_[static_cast<size_t>(i)].read_at(j, at_level, node_at);
}

void TwoParamProcess::set_value(int i, int j, int64_t node_at_j, const Mat& v) {
    rows_[static_cast<size_t>(i)].set_value(j, node_at_j, v);
}

}  // namespace nsfde
