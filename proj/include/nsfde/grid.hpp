#pragma once

#include <vector>

#include "nsfde/linalg.hpp"

namespace nsfde {

// Uniform grid on [0, T] with N steps, extended to [-delta, T+delta] for
// path histories and terminal windows. The delay is always an integer
// multiple of dt (delta = L*dt), so every lag lands on a grid node.
struct TimeGrid {
    double T = 1.0;
    int N = 1;
    int L = 0;
    double dt = 1.0;
    double delta = 0.0;

    // time(N) == T exactly: i/N is exact at i == N.
    double time(int i) const { return T * (static_cast<double>(i) / static_cast<double>(N)); }
};

TimeGrid make_grid(double T, int N, int L);

// Probability measure on the lag lattice {0..L}: atoms (lag index, weight).
struct LagMeasure {
    struct Atom {
        int lag;
        double weight;
    };
    std::vector<Atom> atoms;

    static LagMeasure dirac(int lag = 0) { return LagMeasure{{{lag, 1.0}}}; }
    // Throws if weights are negative, don't sum to 1 within 1e-14, or lags
    // are not strictly increasing within {0..L}.
    void validate(int L) const;
    bool has_lag_zero() const { return !atoms.empty() && atoms.front().lag == 0; }
    int max_lag() const { return atoms.empty() ? 0 : atoms.back().lag; }
};

// Sum_a w_a f(lag_a), atoms in ascending lag order (deterministic reduction).
double measure_integrate(const LagMeasure& m, const std::vector<double>& f_by_lag);

// Path window of a process over L+1 consecutive grid nodes. at[r] is the
// value at lag r: X(t - r*dt) for a backward window, Y(t + r*dt) for a
// forward one. Boundary extensions are applied at construction; a segment
// never exposes an undefined entry.
struct Segment {
    std::vector<Mat> at;
    const Mat& operator[](int lag) const { return at[static_cast<size_t>(lag)]; }
    int lags() const { return static_cast<int>(at.size()) - 1; }
};

enum class Direction { Backward, Forward };
enum class Boundary { Zero, Hold };

}  // namespace nsfde
