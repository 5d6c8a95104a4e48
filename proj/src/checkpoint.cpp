#include "sncse/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "sncse/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

namespace sncse::num {

namespace {

void put_u32(std::ostream& os, uint32_t x) { os.write(reinterpret_cast<const char*>(&x), 4); }
void put_i64(std::ostream& os, int64_t x) { os.write(reinterpret_cast<const char*>(&x), 8); }

void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t get_u32(std::istream& is) {
    uint32_t x = 0;
    is.read(reinterpret_cast<char*>(&x), 4);
    if (!is) throw DataError("checkpoint: truncated file");
    return x;
}

int64_t get_i64(std::istream& is) {
    int64_t x = 0;
    is.read(reinterpret_cast<char*>(&x), 8);
    if (!is) throw DataError("checkpoint: truncated file");
    return x;
}

std::string get_str(std::istream& is) {
    uint32_t len = get_u32(is);
    if (len > (1u << 20)) throw DataError("checkpoint: implausible string length");
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw DataError("checkpoint: truncated file");
    return s;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("checkpoint: cannot open '" + path + "' for writing");
    put_u32(os, kMagic);
    put_u32(os, kVersion);
    put_u32(os, static_cast<uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        put_str(os, k);
        put_str(os, v);
    }
    put_u32(os, static_cast<uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put_str(os, name);
        put_u32(os, static_cast<uint32_t>(t.shape().size()));
        for (int d : t.shape()) put_i64(os, d);
        os.write(reinterpret_cast<const char*>(t.data()),
                 static_cast<std::streamsize>(t.numel() * sizeof(double)));
    }
    if (!os) throw IoError("checkpoint: write failed for '" + path + "'");
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open '" + path + "'");
    if (get_u32(is) != kMagic) throw DataError("checkpoint: bad magic in '" + path + "'");
    const uint32_t version = get_u32(is);
    if (version != kVersion)
        throw DataError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    const uint32_t nmeta = get_u32(is);
    for (uint32_t i = 0; i < nmeta; ++i) {
        std::string k = get_str(is);
        ck.meta[k] = get_str(is);
    }
    const uint32_t ntensors = get_u32(is);
    for (uint32_t i = 0; i < ntensors; ++i) {
        std::string name = get_str(is);
        const uint32_t ndim = get_u32(is);
        if (ndim > 8) throw DataError("checkpoint: implausible rank for '" + name + "'");
        std::vector<int> shape(ndim);
        for (uint32_t d = 0; d < ndim; ++d) shape[d] = static_cast<int>(get_i64(is));
        Tensor t(shape);
        is.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.numel() * sizeof(double)));
        if (!is) throw DataError("checkpoint: truncated tensor '" + name + "'");
        ck.tensors.emplace(std::move(name), std::move(t));
    }
    return ck;
}

}  // namespace sncse::num
