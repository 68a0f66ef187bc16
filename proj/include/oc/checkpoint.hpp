#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace oc {

/// Versioned flat-text parameter snapshot.
///
/// Layout:
///   ocv1 <env> <agent> <n_options> <feature_kind> <input_dim> <order>
///        <n_actions> <critic_variant> <vomega> <fourier_scaling>
///        <tau> <epsilon> <gamma>
///   array <name> <dim0> <dim1> ...
///   <whitespace-separated decimals, shortest round-trip formatting>
///
/// Multi-dimensional arrays are stored row-major over their dims. Loading
/// restores values bit-exactly; version or dimension mismatches refuse with
/// a message and leave no partial state.
struct Checkpoint {
    std::string env;            // fourrooms | pinball | mdp-file
    std::string agent = "oc";   // oc | sarsa | ac
    int n_options = 0;
    std::string feature_kind;   // one-hot | fourier
    int input_dim = 0;
    int order = 0;              // 0 for one-hot
    int n_actions = 0;
    std::string critic_variant; // qu | qomega | none
    std::string vomega = "greedy";
    bool fourier_scaling = false;
    double tau = 0.0, epsilon = 0.0, gamma = 0.0;

    struct Array {
        std::vector<int> dims;
        std::vector<double> data;
    };
    std::map<std::string, Array> arrays;

    void put(const std::string& name, const Eigen::MatrixXd& m);
    void put(const std::string& name, const std::vector<Eigen::MatrixXd>& tensor);
    Eigen::MatrixXd get_matrix(const std::string& name) const;
    std::vector<Eigen::MatrixXd> get_tensor(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace oc
