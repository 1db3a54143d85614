#include "nsfde/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsfde {

TimeGrid make_grid(double T, int N, int L) {
    if (!(T > 0.0)) throw std::invalid_argument("make_grid: T must be positive");
    if (N < 1) throw std::invalid_argument("make_grid: N must be >= 1");
    if (L < 0 || L > N) throw std::invalid_argument("make_grid: need 0 <= L <= N (delay longer than horizon unsupported)");
    TimeGrid g;
    g.T = T;
    g.N = N;
    g.L = L;
    g.dt = T / N;
    g.delta = L * g.dt;
    return g;
}

void LagMeasure::validate(int L) const {
    if (atoms.empty()) throw std::invalid_argument("LagMeasure: no atoms");
    double sum = 0.0;
    int prev = -1;
    for (const Atom& a : atoms) {
        if (a.lag <= prev) throw std::invalid_argument("LagMeasure: lags must be strictly increasing");
        if (a.lag < 0 || a.lag > L)
            throw std::invalid_argument("LagMeasure: lag " + std::to_string(a.lag) + " outside {0.." + std::to_string(L) + "}");
        if (a.weight < 0.0) throw std::invalid_argument("LagMeasure: negative weight");
        sum += a.weight;
        prev = a.lag;
    }
    if (std::fabs(sum - 1.0) > 1e-14)
        throw std::invalid_argument("LagMeasure: weights sum to " + std::to_string(sum) + ", not a probability measure");
}

double measure_integrate(const LagMeasure& m, const std::vector<double>& f_by_lag) {
    double s = 0.0;
    for (const LagMeasure::Atom& a : m.atoms) {
        if (a.lag < 0 || static_cast<size_t>(a.lag) >= f_by_lag.size())
            throw std::invalid_argument("measure_integrate: missing sample at lag " + std::to_string(a.lag));
        s += a.weight * f_by_lag[static_cast<size_t>(a.lag)];
    }
    return s;
}

}  // namespace nsfde
