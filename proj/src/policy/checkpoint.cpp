#include "ffr/policy/checkpoint.hpp"

#include "ffr/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ffr::policy {
namespace {

constexpr char kMagic[8] = {'F', 'F', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw CorruptCheckpoint("checkpoint truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const PolicyParams& params) {
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.vocab));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.spec.dim));
    put<std::uint64_t>(out, params.spec.hash_seed);
    put<std::uint64_t>(out, params.weights.size());
    for (double w : params.weights) put<double>(out, w);
}

PolicyParams read_checkpoint(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw CorruptCheckpoint("bad checkpoint magic");
    if (get<std::uint32_t>(in) != kCheckpointVersion) throw CorruptCheckpoint("unsupported checkpoint version");
    const auto V = get<std::uint32_t>(in);
    const auto F = get<std::uint32_t>(in);
    const auto seed = get<std::uint64_t>(in);
    const auto n = get<std::uint64_t>(in);
    if (V != static_cast<std::uint32_t>(kVocabSize)) throw CorruptCheckpoint("vocabulary size mismatch");
    if (F < static_cast<std::uint32_t>(kMinFeatureDim) || F > (1u << 20) || n != static_cast<std::uint64_t>(V) * F)
        throw CorruptCheckpoint("weight shape mismatch");
    PolicyParams p = PolicyParams::zeros(FeatureSpec{static_cast<int>(F), seed});
    for (auto& w : p.weights) w = get<double>(in);
    if (in.peek() != std::char_traits<char>::eof()) throw CorruptCheckpoint("trailing bytes after weights");
    if (!p.all_finite()) throw CorruptCheckpoint("non-finite weight in checkpoint");
    return p;
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io_error", "cannot write " + tmp);
        write_checkpoint(out, params);
        if (!out) throw Error("io_error", "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

PolicyParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptCheckpoint("checkpoint_not_found", "cannot open " + path.string());
    return read_checkpoint(in);
}

}  // namespace ffr::policy
