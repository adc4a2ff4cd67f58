#ifndef KDV5_LAMBDA_HPP
#define KDV5_LAMBDA_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include "kdv5/core.hpp"

namespace kdv5 {

constexpr double kLambdaMin = 0.5;
constexpr double kLambdaMax = 1.5;

/// A finite sample of the parameter interval Pi = [1/2, 3/2] with one
/// payload per sample; the basis for sup/lip norms in lambda.
template <class T>
struct LambdaFamily {
    std::vector<double> lambdas;
    std::vector<T> payloads;
    std::vector<double> omega_bar;
    double alpha0 = 0.0;
    double tau0 = 0.0;

    void validate() const {
        if (lambdas.size() != payloads.size())
            throw ConfigError("LambdaFamily: sample/payload size mismatch");
        for (double l : lambdas)
            if (l < kLambdaMin || l > kLambdaMax)
                throw ConfigError("LambdaFamily: lambda outside [1/2, 3/2]");
    }

    std::vector<double> omega(std::size_t i) const {
        std::vector<double> w = omega_bar;
        for (double& x : w) x *= lambdas[i];
        return w;
    }
};

/// Equispaced lambda samples over [1/2, 3/2].
inline std::vector<double> lambda_samples(int count) {
    if (count < 1) throw ConfigError("lambda_samples: count must be positive");
    std::vector<double> out;
    if (count == 1) {
        out.push_back(1.0);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.push_back(kLambdaMin + (kLambdaMax - kLambdaMin) * i / (count - 1));
    return out;
}

template <class T, class Norm>
double sup_norm(const LambdaFamily<T>& fam, Norm&& n) {
    fam.validate();
    if (fam.payloads.empty()) throw ConfigError("sup_norm: empty family");
    double m = 0.0;
    for (const T& p : fam.payloads) m = std::max(m, n(p));
    return m;
}

/// Two-point finite-difference Lipschitz seminorm over all sample pairs.
template <class T, class Norm>
double lip_seminorm(const LambdaFamily<T>& fam, Norm&& n) {
    fam.validate();
    if (fam.payloads.size() < 2)
        throw ConfigError("lip_seminorm: at least 2 samples required");
    double m = 0.0;
    for (std::size_t i = 0; i < fam.payloads.size(); ++i)
        for (std::size_t j = i + 1; j < fam.payloads.size(); ++j) {
            double dl = std::abs(fam.lambdas[i] - fam.lambdas[j]);
            if (dl == 0.0) throw ConfigError("lip_seminorm: duplicate lambda samples");
            m = std::max(m, n(fam.payloads[i] - fam.payloads[j]) / dl);
        }
    return m;
}

/// Lipschitz norm: sup over samples plus the finite-difference seminorm.
template <class T, class Norm>
double lip_norm(const LambdaFamily<T>& fam, Norm&& n) {
    return sup_norm(fam, n) + lip_seminorm(fam, n);
}

}  // namespace kdv5

#endif
