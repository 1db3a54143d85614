#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace nsfde {

// Small dense row-major matrix. State/control dimensions in this engine are
// tiny (n,m,d <= 2), so everything is by-value and unoptimized on purpose.
// A column vector is a Mat with cols == 1.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    Mat(int r, int c, std::initializer_list<double> init) : rows(r), cols(c), a(init) {
        if (a.size() != static_cast<size_t>(r) * c) throw std::invalid_argument("Mat: init size mismatch");
    }

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }
    int size() const { return rows * cols; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat col(std::initializer_list<double> v) {
        Mat m(static_cast<int>(v.size()), 1);
        m.a = v;
        return m;
    }

    Mat& operator+=(const Mat& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& x : a) x *= s;
        return *this;
    }
    // this += s * o
    void add_scaled(double s, const Mat& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += s * o.a[i];
    }
};

using Vec = Mat;

inline Vec vec(int n) { return Mat(n, 1); }

inline Mat operator+(Mat l, const Mat& r) { return l += r; }
inline Mat operator-(Mat l, const Mat& r) { return l -= r; }
inline Mat operator*(double s, Mat m) { return m *= s; }

inline Mat mul(const Mat& A, const Mat& B) {
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

// A' B
inline Mat tmul(const Mat& A, const Mat& B) {
    Mat C(A.cols, B.cols);
    for (int k = 0; k < A.rows; ++k)
        for (int i = 0; i < A.cols; ++i) {
            const double aki = A(k, i);
            for (int j = 0; j < B.cols; ++j) C(i, j) += aki * B(k, j);
        }
    return C;
}

inline double dot(const Mat& x, const Mat& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) s += x.a[i] * y.a[i];
    return s;
}

inline double norm2sq(const Mat& x) { return dot(x, x); }

inline double max_abs(const Mat& x) {
    double s = 0.0;
    for (double v : x.a) s = std::max(s, std::fabs(v));
    return s;
}

// Spectral norm, exact for rows,cols <= 2 (largest singular value of A'A).
inline double op_norm(const Mat& A) {
    const Mat G = tmul(A, A);
    if (G.rows == 1) return std::sqrt(G(0, 0));
    if (G.rows == 2) {
        const double tr = G(0, 0) + G(1, 1);
        const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return std::sqrt(std::max(0.0, tr / 2.0 + disc));
    }
    // Frobenius upper bound for anything larger.
    return std::sqrt(norm2sq(A));
}

}  // namespace nsfde
