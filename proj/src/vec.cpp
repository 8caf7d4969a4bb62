#include "dsp/vec.hpp"

#include <algorithm>
#include <cmath>

namespace dsp {

double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Vector& x) { return std::sqrt(dot(x, x)); }

double norm_inf(const Vector& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, const Vector& x, Vector& y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, Vector& x) {
    for (double& v : x) v *= alpha;
}

Vector subtract(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionError("subtract: length mismatch");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

bool all_finite(const Vector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

void split3(const Vector& r, index_t n, index_t m, index_t l,
            Vector& r1, Vector& r2, Vector& r3) {
    if (static_cast<index_t>(r.size()) != n + m + l)
        throw DimensionError("split3: length does not match n+m+l");
    r1.assign(r.begin(), r.begin() + n);
    r2.assign(r.begin() + n, r.begin() + n + m);
    r3.assign(r.begin() + n + m, r.end());
}

Vector join3(const Vector& w1, const Vector& w2, const Vector& w3) {
    Vector w;
    w.reserve(w1.size() + w2.size() + w3.size());
    w.insert(w.end(), w1.begin(), w1.end());
    w.insert(w.end(), w2.begin(), w2.end());
    w.insert(w.end(), w3.begin(), w3.end());
    return w;
}

}  // namespace dsp
