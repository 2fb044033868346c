#include "xxzmagic/state_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace xxzmagic {

namespace {

constexpr char kMagic[8] = {'V', 'D', 'M', 'P', 'S', '0', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;
// Index convention 1: row-major entries, physical d = 2s + s', Pauli order I,X,Y,Z.
constexpr std::uint32_t kIndexConvention = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("load_state: truncated file");
    return v;
}

}  // namespace

void save_state(const VectorizedDensityMps& state, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_state: cannot open " + file.string());
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kFormatVersion);
    write_pod(out, kIndexConvention);
    write_pod(out, static_cast<std::uint64_t>(state.length()));
    const auto center = state.ortho_center();
    write_pod(out, static_cast<std::int64_t>(center ? static_cast<std::int64_t>(*center) : -1));
    for (std::size_t b : state.bond_dimensions()) write_pod(out, static_cast<std::uint64_t>(b));
    for (std::size_t j = 0; j < state.length(); ++j) {
        const DenseTensor& t = state.site(j);
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(Complex)));
    }
    if (!out) throw std::runtime_error("save_state: write failed for " + file.string());
}

VectorizedDensityMps load_state(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("load_state: cannot open " + file.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_state: not a state container: " + file.string());
    }
    if (read_pod<std::uint32_t>(in) != kFormatVersion) {
        throw std::runtime_error("load_state: unsupported format version");
    }
    if (read_pod<std::uint32_t>(in) != kIndexConvention) {
        throw std::runtime_error("load_state: unsupported index convention");
    }
    const auto length = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    const auto center = read_pod<std::int64_t>(in);
    std::vector<std::size_t> bonds(length + 1);
    for (std::size_t& b : bonds) b = static_cast<std::size_t>(read_pod<std::uint64_t>(in));

    std::vector<DenseTensor> sites;
    sites.reserve(length);
    for (std::size_t j = 0; j < length; ++j) {
        DenseTensor t({bonds[j], 4, bonds[j + 1]});
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(Complex)));
        if (!in) throw std::runtime_error("load_state: truncated tensor payload");
        sites.push_back(std::move(t));
    }
    VectorizedDensityMps state(std::move(sites));
    if (center >= 0) state.assume_center(static_cast<std::size_t>(center));
    return state;
}

}  // namespace xxzmagic
