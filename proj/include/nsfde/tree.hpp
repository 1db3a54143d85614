#pragma once

#include <cstdint>
#include <vector>

#include "nsfde/grid.hpp"
#include "nsfde/linalg.hpp"

namespace nsfde {

// Non-recombining 2^d-ary tree over levels 0..N with per-branch Brownian
// increments in {-sqrt(dt), +sqrt(dt)}^d and uniform branch probability
// 2^{-d}. Conditional expectations, Ito sums and (for d=1) martingale
// representation are exact on this filtration, which is what lets the
// adjoint identities be certified to round-off.
class ScenarioTree {
  public:
    ScenarioTree(TimeGrid grid, int brownian_dim, int budget_bits = 24);

    const TimeGrid& grid() const { return grid_; }
    int bdim() const { return d_; }
    int branching() const { return 1 << d_; }
    double sqrt_dt() const { return sqrt_dt_; }
    double branch_prob() const { return 1.0 / branching(); }

    // Storage level: history levels collapse to a single deterministic slot,
    // levels beyond N stay at leaf (F_T) granularity.
    int storage_level(int level) const {
        if (level < 0) return 0;
        if (level > grid_.N) return grid_.N;
        return level;
    }
    int64_t nodes_at(int level) const { return int64_t{1} << (static_cast<int64_t>(d_) * storage_level(level)); }

    int64_t parent(int64_t node) const { return node >> d_; }
    int64_t child(int64_t node, int branch) const { return (node << d_) | branch; }
    int branch_of(int64_t node) const { return static_cast<int>(node & (branching() - 1)); }
    // Node identity at `to_level` on the path through `node` at `from_level`
    // (to_level <= from_level in storage terms).
    int64_t ancestor(int64_t node, int from_level, int to_level) const {
        const int shift = d_ * (storage_level(from_level) - storage_level(to_level));
        return node >> shift;
    }

    // Increment of Brownian component `comp` on branch `branch`.
    double dw(int branch, int comp) const { return ((branch >> comp) & 1) ? sqrt_dt_ : -sqrt_dt_; }

  private:
    TimeGrid grid_;
    int d_;
    double sqrt_dt_;
};

// F-adapted process: one value (rows x cols, flattened row-major) per node
// for each level in [lo, hi]. Levels < 0 hold a single deterministic value,
// levels > N hold leaf-granular (F_T-measurable) values.
class AdaptedProcess {
  public:
    AdaptedProcess() = default;
    AdaptedProcess(const ScenarioTree& tree, int lo, int hi, int rows, int cols);

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int dim() const { return rows_ * cols_; }
    const ScenarioTree& tree() const { return *tree_; }

    double* raw(int level, int64_t node);
    const double* raw(int level, int64_t node) const;
    Mat value(int level, int64_t node) const;
    void set_value(int level, int64_t node, const Mat& v);

    std::vector<double>& level_data(int level);
    const std::vector<double>& level_data(int level) const;

    // Value at `level` seen from a node at `at_level` >= level (ancestor read).
    Mat read_at(int level, int at_level, int64_t node_at) const {
        return value(level, tree_->ancestor(node_at, at_level, level));
    }

  private:
    const ScenarioTree* tree_ = nullptr;
    int lo_ = 0, hi_ = -1, rows_ = 0, cols_ = 0;
    std::vector<std::vector<double>> data_;
};

// E[values at level j | F_{level i}], i <= j. Children are summed in
// ascending branch order and divided by 2^d (exact in binary arithmetic).
std::vector<double> cond_expect(const ScenarioTree& tree, int from_level, int to_level,
                                const std::vector<double>& values, int dim);
AdaptedProcess cond_expect_process(const AdaptedProcess& p, int level, int target_level);

// Pathwise prefix sum of integrand(node) * dW(branch) from level a to b;
// integrand is n x d on levels a..b-1, result is n-dim values at level b.
std::vector<double> ito_integrate(const ScenarioTree& tree, const AdaptedProcess& integrand, int a, int b);

// Martingale representation of level-i values Y:
//   Y = E[Y] + sum_{j<i} Z(s_j) dW_j     (exact for d=1; L2 projection for d=2)
// Z at a level-j node, component c, is the half-difference of the child
// conditional means along component c divided by sqrt(dt).
struct MartingaleRep {
    Mat mean;           // E[Y]
    AdaptedProcess Z;   // levels 0..i-1, rows = value dim, cols = d
};
MartingaleRep martingale_represent(const ScenarioTree& tree, const std::vector<double>& values_at_i, int level_i,
                                   int dim);
std::vector<double> reconstruct(const ScenarioTree& tree, const Mat& mean, const AdaptedProcess& Z, int level_i);

// Read-only window of an adapted process, seen from (at_level, node). The
// boundary rule closes entries outside the stored level range.
Segment segment_view(const AdaptedProcess& p, int t_index, int window, Direction dir, Boundary boundary,
                     int at_level, int64_t node);

// The field Z(t_i, s_j) of an M-solution on [0, T+delta]^2. Row i holds the
// second-index processes for j = 0..N-1 (where Brownian increments exist);
// queries with j >= N or j beyond storage return zero, which realizes the
// Definition 4.1 convention Z = 0 on the upper extension region.
class TwoParamProcess {
  public:
    TwoParamProcess() = default;
    TwoParamProcess(const ScenarioTree& tree, int n);

    int n() const { return n_; }
    int first_count() const { return static_cast<int>(rows_.size()); }  // N+L+1
    const ScenarioTree& tree() const { return *tree_; }

    // Z(t_i, s_j) at a level-j node; zero for j outside 0..N-1.
    Mat value(int i, int j, int64_t node_at_j) const;
    // Z(t_i, s_j) read from a node at level at_level >= j.
    Mat read_at(int i, int j, int at_level, int64_t node_at) const;
    void set_value(int i, int j, int64_t node_at_j, const Mat& v);

    AdaptedProcess& row(int i) { return rows_[static_cast<size_t>(i)]; }
    const AdaptedProcess& row(int i) const { return rows_[static_cast<size_t>(i)]; }

  private:
    const ScenarioTree* tree_ = nullptr;
    int n_ = 0;
    std::vector<AdaptedProcess> rows_;
};

}  // namespace nsfde
