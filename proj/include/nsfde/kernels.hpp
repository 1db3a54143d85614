#pragma once

#include <vector>

#include "nsfde/tree.hpp"

namespace nsfde {

// Samples of a kernel K(t_i, r) at grid times i = 0..N and the atom lags of
// its measure; adapted (one block per node). `blocks` > 1 stacks independent
// kernels sharing the measure (used for the per-Brownian-component Sigma).
// Layout per node: [atom][block][row*cols + col].
struct KernelTable {
    LagMeasure measure;
    int rows = 0, cols = 0, blocks = 1;
    AdaptedProcess samples;  // levels 0..N, dim = atoms * blocks * rows * cols

    bool empty() const { return samples.hi() < samples.lo() || rows == 0; }
    int atoms() const { return static_cast<int>(measure.atoms.size()); }
    int block_dim() const { return rows * cols; }

    static KernelTable make(const ScenarioTree& tree, LagMeasure m, int rows, int cols, int blocks = 1) {
        KernelTable k;
        k.measure = std::move(m);
        k.rows = rows;
        k.cols = cols;
        k.blocks = blocks;
        k.samples = AdaptedProcess(tree, 0, tree.grid().N, rows * cols * blocks * static_cast<int>(k.measure.atoms.size()), 1);
        return k;
    }

    Mat at(int i, int64_t node, int atom, int block = 0) const {
        Mat v(rows, cols);
        const double* p = samples.raw(i, node) + (static_cast<size_t>(atom) * blocks + block) * block_dim();
        for (int k = 0; k < block_dim(); ++k) v.a[static_cast<size_t>(k)] = p[k];
        return v;
    }
    Mat read_at(int i, int at_level, int64_t node_at, int atom, int block = 0) const {
        return at(i, samples.tree().ancestor(node_at, at_level, i), atom, block);
    }
    void set(int i, int64_t node, int atom, int block, const Mat& v) {
        double* p = samples.raw(i, node) + (static_cast<size_t>(atom) * blocks + block) * block_dim();
        for (int k = 0; k < block_dim(); ++k) p[k] = v.a[static_cast<size_t>(k)];
    }
};

// (A3) kernel data of a linearized problem: Gbar, Bbar are n x n, Sigma is
// n x n per Brownian component, Lbar is 1 x n; each paired with its lag
// measure lambda_0..lambda_3.
struct A3Kernels {
    KernelTable G;    // measure lambda0
    KernelTable B;    // measure lambda1
    KernelTable Sig;  // measure lambda2, blocks = d
    KernelTable Lk;   // measure lambda3
    // sup over sampled (t, node) of the lambda0-weighted operator norm of G;
    // inherits (A2)'s ||g_x|| <= kappa < 1.
    double kappa = 0.0;
};

// Adjoint-equation data extracted along a candidate pair (Xbar, ubar).
struct Linearization {
    int n = 1, m = 1, d = 1;
    A3Kernels k;
    AdaptedProcess b_u;    // levels 0..N-1, n x m
    AdaptedProcess sig_u;  // levels 0..N-1, (n*d) x m; control column k is an n x d block
    AdaptedProcess l_u;    // levels 0..N-1, m x 1

    Mat sig_u_block(int i, int64_t node, int ctrl) const {
        Mat blockv(n, d);
        const double* p = sig_u.raw(i, node);
        for (int r = 0; r < n * d; ++r) blockv.a[static_cast<size_t>(r)] = p[static_cast<size_t>(r) * m + ctrl];
        return blockv;
    }
    // sigma_u applied to a control vector: sum_k u_k * block_k, an n x d matrix.
    Mat sig_u_apply(int i, int64_t node, const Mat& u) const {
        Mat out(n, d);
        for (int k = 0; k < m; ++k) out.add_scaled(u[k], sig_u_block(i, node, k));
        return out;
    }
    // Transpose pairing <sigma_u' M>_k = <block_k, M>_Frobenius.
    Mat sig_u_tapply(int i, int64_t node, const Mat& M) const {
        Mat out(m, 1);
        for (int k = 0; k < m; ++k) out[k] = dot(sig_u_block(i, node, k), M);
        return out;
    }
};

}  // namespace nsfde
