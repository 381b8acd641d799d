#include "maser/nn/checkpoint.hpp"

#include "maser/errors.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace maser::nn {

void write_checkpoint(std::ostream& out, std::span<const Parameter* const> params) {
    out << "maser-checkpoint " << kCheckpointVersion << '\n';
    out << "arrays " << params.size() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const Parameter* p : params) {
        out << p->name << ' ' << p->value.rows() << ' ' << p->value.cols() << '\n';
        for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                if (c > 0) {
                    out << ' ';
                }
                out << p->value(r, c);
            }
            out << '\n';
        }
    }
}

std::vector<NamedArray> read_checkpoint(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "maser-checkpoint") {
        throw ConfigError("not a maser checkpoint");
    }
    if (version != kCheckpointVersion) {
        throw ConfigError("unsupported checkpoint version " + std::to_string(version));
    }
    std::string key;
    std::size_t count = 0;
    if (!(in >> key >> count) || key != "arrays") {
        throw ConfigError("checkpoint: missing array count");
    }
    std::vector<NamedArray> arrays;
    arrays.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        NamedArray a;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        if (!(in >> a.name >> rows >> cols) || rows < 0 || cols < 0) {
            throw ConfigError("checkpoint: bad header for array " + std::to_string(k));
        }
        a.value.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(in >> a.value(r, c))) {
                    throw ConfigError("checkpoint: truncated values in " + a.name);
                }
            }
        }
        arrays.push_back(std::move(a));
    }
    return arrays;
}

void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write checkpoint " + path.string());
    }
    write_checkpoint(out, params);
}

std::vector<NamedArray> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open checkpoint " + path.string());
    }
    return read_checkpoint(in);
}

void restore(std::span<Parameter* const> params, const std::vector<NamedArray>& arrays) {
    std::unordered_map<std::string, const NamedArray*> by_name;
    for (const NamedArray& a : arrays) {
        by_name[a.name] = &a;
    }
    for (Parameter* p : params) {
        auto it = by_name.find(p->name);
        if (it == by_name.end()) {
            throw ConfigError("checkpoint has no array named " + p->name);
        }
        const Matrix& v = it->second->value;
        if (v.rows() != p->value.rows() || v.cols() != p->value.cols()) {
            throw ConfigError("checkpoint shape mismatch for " + p->name);
        }
        p->value = v;
        p->zero_grad();
    }
}

} // namespace maser::nn
