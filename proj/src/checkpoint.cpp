#include "oc/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oc/mdp.hpp"

namespace oc {

void Checkpoint::put(const std::string& name, const Eigen::MatrixXd& m) {
    Array arr;
    arr.dims = {static_cast<int>(m.rows()), static_cast<int>(m.cols())};
    arr.data.reserve(m.size());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) arr.data.push_back(m(i, j));
    arrays[name] = std::move(arr);
}

void Checkpoint::put(const std::string& name, const std::vector<Eigen::MatrixXd>& tensor) {
    Array arr;
    arr.dims = {static_cast<int>(tensor.size()), static_cast<int>(tensor[0].rows()),
                static_cast<int>(tensor[0].cols())};
    for (const auto& m : tensor)
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) arr.data.push_back(m(i, j));
    arrays[name] = std::move(arr);
}

Eigen::MatrixXd Checkpoint::get_matrix(const std::string& name) const {
    const auto it = arrays.find(name);
    if (it == arrays.end() || it->second.dims.size() != 2)
        throw std::invalid_argument("checkpoint: missing 2-d array '" + name + "'");
    const auto& arr = it->second;
    Eigen::MatrixXd m(arr.dims[0], arr.dims[1]);
    std::size_t k = 0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = arr.data[k++];
    return m;
}

std::vector<Eigen::MatrixXd> Checkpoint::get_tensor(const std::string& name) const {
    const auto it = arrays.find(name);
    if (it == arrays.end() || it->second.dims.size() != 3)
        throw std::invalid_argument("checkpoint: missing 3-d array '" + name + "'");
    const auto& arr = it->second;
    std::vector<Eigen::MatrixXd> tensor(arr.dims[0], Eigen::MatrixXd(arr.dims[1], arr.dims[2]));
    std::size_t k = 0;
    for (auto& m : tensor)
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = arr.data[k++];
    return tensor;
}

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
    out << "ocv1 " << ckpt.env << " " << ckpt.agent << " " << ckpt.n_options << " "
        << ckpt.feature_kind << " " << ckpt.input_dim << " " << ckpt.order << " "
        << ckpt.n_actions << " " << ckpt.critic_variant << " " << ckpt.vomega << " "
        << (ckpt.fourier_scaling ? 1 : 0) << " " << format_double(ckpt.tau) << " "
        << format_double(ckpt.epsilon) << " " << format_double(ckpt.gamma) << "\n";
    for (const auto& [name, arr] : ckpt.arrays) {
        out << "array " << name;
        for (int d : arr.dims) out << " " << d;
        out << "\n";
        for (std::size_t i = 0; i < arr.data.size(); ++i)
            out << format_double(arr.data[i]) << ((i + 1) % 8 == 0 ? "\n" : " ");
        if (arr.data.size() % 8 != 0) out << "\n";
    }
}

void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    save_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(std::istream& in) {
    Checkpoint ckpt;
    std::string magic;
    int scaling = 0;
    if (!(in >> magic)) throw std::invalid_argument("checkpoint: empty file");
    if (magic != "ocv1")
        throw std::invalid_argument("checkpoint: unsupported version '" + magic + "'");
    if (!(in >> ckpt.env >> ckpt.agent >> ckpt.n_options >> ckpt.feature_kind >>
          ckpt.input_dim >> ckpt.order >> ckpt.n_actions >> ckpt.critic_variant >>
          ckpt.vomega >> scaling >> ckpt.tau >> ckpt.epsilon >> ckpt.gamma))
        throw std::invalid_argument("checkpoint: truncated header");
    ckpt.fourier_scaling = scaling != 0;

    std::string tag;
    while (in >> tag) {
        if (tag != "array")
            throw std::invalid_argument("checkpoint: expected 'array', got '" + tag + "'");
        std::string name;
        if (!(in >> name)) throw std::invalid_argument("checkpoint: truncated array header");
        Checkpoint::Array arr;
        std::size_t count = 1;
        for (;;) {  // dims run to the end of the header line
            const int ch = in.peek();
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                in.get();
                continue;
            }
            if (ch == '\n' || ch == EOF) break;
            int d;
            if (!(in >> d)) throw std::invalid_argument("checkpoint: bad dims for '" + name + "'");
            if (d <= 0) throw std::invalid_argument("checkpoint: non-positive dim");
            arr.dims.push_back(d);
            count *= d;
        }
        if (arr.dims.empty()) throw std::invalid_argument("checkpoint: array without dims");
        arr.data.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!(in >> arr.data[i]))
                throw std::invalid_argument("checkpoint: truncated data in '" + name + "'");
        ckpt.arrays[name] = std::move(arr);
    }
    return ckpt;
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open checkpoint: " + path);
    return load_checkpoint(in);
}

}  // namespace oc
