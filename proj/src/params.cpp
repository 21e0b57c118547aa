#include "tpat/params.hpp"

#include <cstdint>
#include <fstream>

#include "tpat/errors.hpp"

namespace tpat {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'P', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void ParamStore::put(const std::string& name, Tensor t) { entries_[name] = std::move(t); }

const Tensor& ParamStore::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw IoError("parameter '" + name + "' not in store");
    return it->second;
}

bool ParamStore::contains(const std::string& name) const { return entries_.count(name) > 0; }

void ParamStore::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os.write(kMagic, 4);
    write_u32(os, static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [name, t] : entries_) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.ndim()));
        for (int d = 0; d < t.ndim(); ++d) write_u32(os, static_cast<std::uint32_t>(t.extent(d)));
        // f32 payload, little-endian host assumed.
        os.write(reinterpret_cast<const char*>(t.data()),
                 static_cast<std::streamsize>(t.numel() * 4));
    }
    if (!os) throw IoError("write failed for " + path);
}

ParamStore ParamStore::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4))
        throw IoError(path + " is not a parameter container");
    ParamStore store;
    const std::uint32_t count = read_u32(is);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const std::uint32_t ndim = read_u32(is);
        std::vector<int> shape(ndim);
        std::int64_t numel = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            shape[d] = static_cast<int>(read_u32(is));
            numel *= shape[d];
        }
        std::vector<float> values(static_cast<size_t>(numel));
        is.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(numel * 4));
        if (!is) throw IoError("truncated parameter container " + path);
        store.put(name, Tensor(std::move(shape), std::move(values)));
    }
    return store;
}

void ParamStore::save_manifest(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    for (const auto& [name, t] : entries_) os << name << " " << shape_str(t.shape()) << "\n";
}

}  // namespace tpat
