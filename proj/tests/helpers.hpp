#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rdlab/common.hpp"

namespace testutil {

/// Independent discount oracle: explicit power series, no Horner sharing
/// with the implementation under test.
inline double naive_discounted(const std::vector<double>& r, double gamma) {
    double acc = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) acc += std::pow(gamma, static_cast<double>(t)) * r[t];
    return acc;
}

inline std::string rand_token(rdlab::Rng& rng) {
    static const char* kAlpha = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::size_t len = 1 + rng.uniform_int(7);
    std::string t;
    for (std::size_t i = 0; i < len; ++i) t.push_back(kAlpha[rng.uniform_int(36)]);
    return t;
}

/// Noisy surface text: tokens with random casing, punctuation and articles
/// sprinkled in, to exercise normalization paths.
inline std::string rand_text(rdlab::Rng& rng, std::size_t max_tokens = 8) {
    std::string out;
    std::size_t n = rng.uniform_int(max_tokens + 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.empty()) out.push_back(' ');
        double u = rng.uniform();
        if (u < 0.15) out += (u < 0.05 ? "the" : (u < 0.10 ? "a" : "an"));
        else {
            std::string tok = rand_token(rng);
            if (rng.uniform() < 0.3 && !tok.empty()) tok[0] = static_cast<char>(std::toupper(tok[0]));
            if (rng.uniform() < 0.3) tok.push_back(rng.uniform() < 0.5 ? ',' : '?');
            out += tok;
        }
    }
    return out;
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

/// Relative gap between an analytic and a finite-difference gradient.
inline double rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        da += a[i] * a[i];
        db += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(1e-12, std::sqrt(da) + std::sqrt(db));
}

}  // namespace testutil
