// SPDX-License-Identifier: Apache-2.0

#include "voxforge/autodiff/checkpoint.hpp"

#include <fstream>
#include <map>

#include "voxforge/error.hpp"
#include "voxforge/util/binary_io.hpp"

namespace voxforge::ad {

using util::read_le;
using util::write_le;

void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors) {
    out.write("TNSR", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
        for (auto d : t.shape()) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
        for (double v : t.data()) write_le<double>(out, v);
    }
}

std::vector<NamedTensor> read_tensors(std::istream& in) {
    util::expect_magic(in, "TNSR");
    const auto count = read_le<std::uint32_t>(in, "TNSR count");
    std::vector<NamedTensor> out;
    out.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto len = read_le<std::uint32_t>(in, "TNSR name length");
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) throw IoError("truncated TNSR name");
        const auto rank = read_le<std::uint32_t>(in, "TNSR rank");
        Shape shape(rank);
        for (auto& d : shape) d = read_le<std::uint32_t>(in, "TNSR dims");
        std::vector<double> data(shape_numel(shape));
        for (auto& v : data) v = read_le<double>(in, "TNSR data");
        out.emplace_back(std::move(name), Tensor::from(std::move(shape), std::move(data)));
    }
    return out;
}

void save_tensors(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_tensors(out, tensors);
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<NamedTensor> load_tensors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_tensors(in);
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void assign_tensors(const std::vector<NamedTensor>& loaded, const std::vector<NamedTensor>& into) {
    std::map<std::string, const Tensor*> by_name;
    for (const auto& [name, t] : loaded) by_name[name] = &t;
    for (const auto& [name, t] : into) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw ShapeError("checkpoint is missing tensor '" + name + "'");
        if (it->second->shape() != t.shape()) {
            throw ShapeError("checkpoint tensor '" + name + "' has shape " + shape_str(it->second->shape()) +
                             ", model expects " + shape_str(t.shape()));
        }
        auto dst = Tensor(t).mutable_data();
        const auto src = it->second->data();
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

}  // namespace voxforge::ad
