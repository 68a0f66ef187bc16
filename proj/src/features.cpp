#include "oc/features.hpp"

#include <cmath>
#include <numbers>

namespace oc {

FeatureMap FeatureMap::one_hot(int n_states) {
    if (n_states <= 0) throw std::invalid_argument("one_hot: n_states must be positive");
    FeatureMap m;
    m.kind_ = FeatureKind::one_hot;
    m.input_dim_ = n_states;
    m.n_features_ = n_states;
    return m;
}

FeatureMap FeatureMap::fourier(int dim, int order) {
    if (dim <= 0 || order < 0) throw std::invalid_argument("fourier: bad dim/order");
    FeatureMap m;
    m.kind_ = FeatureKind::fourier;
    m.input_dim_ = dim;
    m.order_ = order;
    int n = 1;
    for (int i = 0; i < dim; ++i) n *= order + 1;
    m.n_features_ = n;
    m.coeffs_.resize(n, dim);
    // lexicographic lattice enumeration, first coordinate slowest
    for (int i = 0; i < n; ++i) {
        int rem = i;
        for (int j = dim - 1; j >= 0; --j) {
            m.coeffs_(i, j) = rem % (order + 1);
            rem /= order + 1;
        }
    }
    m.lr_scaling_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double norm = m.coeffs_.row(i).cast<double>().norm();
        m.lr_scaling_[i] = norm > 0.0 ? norm : 1.0;
    }
    return m;
}

FeatureVec FeatureMap::featurize(int state) const {
    if (kind_ != FeatureKind::one_hot)
        throw std::invalid_argument("featurize(state) requires a one-hot map");
    if (state < 0 || state >= input_dim_)
        throw std::invalid_argument("featurize: state " + std::to_string(state) + " out of range");
    FeatureVec f;
    f.hot = state;
    return f;
}

FeatureVec FeatureMap::featurize(std::span<const double> x) const {
    if (kind_ != FeatureKind::fourier)
        throw std::invalid_argument("featurize(vector) requires a fourier map");
    if (static_cast<int>(x.size()) != input_dim_)
        throw std::invalid_argument("featurize: input dimension mismatch");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("featurize: input " + std::to_string(v) +
                                        " outside [0,1]");
    FeatureVec f;
    f.dense.resize(n_features_);
    for (int i = 0; i < n_features_; ++i) {
        double cx = 0.0;
        for (int j = 0; j < input_dim_; ++j) cx += coeffs_(i, j) * x[j];
        f.dense[i] = std::cos(std::numbers::pi * cx);
    }
    return f;
}

const Eigen::VectorXd& FeatureMap::lr_scaling() const {
    if (kind_ != FeatureKind::fourier)
        throw std::invalid_argument("lr_scaling is defined for fourier maps only");
    return lr_scaling_;
}

Eigen::VectorXd FeatureMap::to_dense(const FeatureVec& f) const {
    if (f.hot >= 0) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_features_);
        v[f.hot] = 1.0;
        return v;
    }
    return f.dense;
}

}  // namespace oc
