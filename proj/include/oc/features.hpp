#pragma once

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <vector>

namespace oc {

/// What an environment exposes per step: a discrete state index (state >= 0)
/// or a normalized continuous vector in [0,1]^d.
struct Observation {
    int state = -1;
    std::vector<double> vec;
};

/// Feature vector in either sparse one-hot form (hot >= 0) or dense form.
struct FeatureVec {
    int hot = -1;
    Eigen::VectorXd dense;
};

template <typename Derived>
double dot(const Eigen::MatrixBase<Derived>& w, const FeatureVec& f) {
    if (f.hot >= 0) return w(f.hot);
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) s += w(i) * f.dense[i];
    return s;
}

/// w += c * f; accepts writable expressions (matrix rows included).
template <typename Derived>
void axpy(double c, const FeatureVec& f, const Eigen::MatrixBase<Derived>& w_expr) {
    auto& w = const_cast<Eigen::MatrixBase<Derived>&>(w_expr);
    if (f.hot >= 0) {
        w(f.hot) += c;
    } else {
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) += c * f.dense[i];
    }
}

enum class FeatureKind { one_hot, fourier };

/// Feature map shared by policies, terminations and linear critics.
///
/// one-hot: indicator over discrete states.
/// fourier: full integer lattice {0..order}^d in lexicographic order
/// (first coordinate slowest), features cos(pi * c_i . x) for x in [0,1]^d.
class FeatureMap {
public:
    FeatureMap() = default;  // empty map; assign from one_hot()/fourier()
    static FeatureMap one_hot(int n_states);
    static FeatureMap fourier(int dim, int order);

    FeatureKind kind() const { return kind_; }
    int input_dim() const { return input_dim_; }
    int order() const { return order_; }
    int n_features() const { return n_features_; }
    const Eigen::MatrixXi& coefficients() const { return coeffs_; }

    FeatureVec featurize(int state) const;
    FeatureVec featurize(std::span<const double> x) const;
    FeatureVec featurize(const Observation& obs) const {
        return obs.state >= 0 ? featurize(obs.state) : featurize(std::span<const double>(obs.vec));
    }

    /// Per-feature learning-rate divisor ||c_i||_2, with 1 for the constant
    /// feature. Fourier maps only.
    const Eigen::VectorXd& lr_scaling() const;

    Eigen::VectorXd to_dense(const FeatureVec& f) const;

private:
    FeatureKind kind_ = FeatureKind::one_hot;
    int input_dim_ = 0;
    int order_ = 0;
    int n_features_ = 0;
    Eigen::MatrixXi coeffs_;      // (n_features, dim), fourier only
    Eigen::VectorXd lr_scaling_;  // fourier only
};

}  // namespace oc
