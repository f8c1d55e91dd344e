#include "csilsh/error.hpp"
#include "csilsh/lsh_index.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace csilsh {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'S', 'I', 'L', 'S', 'H', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

private:
    void le(std::uint64_t v, int n) {
        char buf[8];
        for (int i = 0; i < n; ++i) {
            buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        }
        bytes(buf, static_cast<std::size_t>(n));
    }

    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    void bytes(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw Error(Errc::MalformedIndex, "unexpected end of index stream");
        }
    }

private:
    std::uint64_t le(int n) {
        unsigned char buf[8];
        bytes(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = n - 1; i >= 0; --i) {
            v = (v << 8) | buf[i];
        }
        return v;
    }

    std::istream& in_;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > UINT32_MAX) {
        throw Error(Errc::InvalidConfig, std::string(what) + " does not fit the index format");
    }
    return static_cast<std::uint32_t>(v);
}

} // namespace

void save_index(const LshIndex& index, std::ostream& out) {
    const HashConfig& c = index.config();
    Writer w(out);
    w.bytes(kMagic.data(), kMagic.size());
    w.u32(kVersion);
    w.u32(checked_u32(c.dim, "dim"));
    w.u32(checked_u32(c.bits, "L"));
    w.u32(checked_u32(c.tables, "T"));
    w.u32(checked_u32(c.delta, "delta"));
    w.u32(checked_u32(index.size(), "N"));
    w.u64(c.seed);

    for (const auto& omega : index.subsets()) {
        for (auto i : omega) {
            w.u32(i);
        }
    }

    const auto signs = index.diagonal().signs();
    std::vector<char> packed((signs.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] > 0) {
            packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
        }
    }
    w.bytes(packed.data(), packed.size());

    const std::size_t key_bytes = (c.bits + 7) / 8;
    std::vector<char> kb(key_bytes);
    for (const auto& table : index.tables()) {
        w.u32(checked_u32(table.size(), "bucket count"));
        for (const auto& [key, bucket] : table) {
            std::fill(kb.begin(), kb.end(), 0);
            for (std::size_t t = 0; t < key.bits(); ++t) {
                if (key.test(t)) {
                    kb[t / 8] = static_cast<char>(kb[t / 8] | (1 << (t % 8)));
                }
            }
            w.bytes(kb.data(), kb.size());
            w.u32(checked_u32(bucket.size(), "bucket length"));
            for (auto n : bucket) {
                w.u32(n);
            }
        }
    }
    if (!out) {
        throw Error(Errc::IoError, "failed writing index");
    }
}

LshIndex load_index(std::istream& in) {
    Reader r(in);
    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != kMagic) {
        throw Error(Errc::MalformedIndex, "bad magic");
    }
    if (const auto version = r.u32(); version != kVersion) {
        throw Error(Errc::MalformedIndex, "unsupported version " + std::to_string(version));
    }
    HashConfig c;
    c.dim = r.u32();
    c.bits = r.u32();
    c.tables = r.u32();
    c.delta = r.u32();
    const std::size_t n_points = r.u32();
    c.seed = r.u64();
    try {
        c.validate();
    } catch (const Error& e) {
        throw Error(Errc::MalformedIndex, e.what());
    }
    const std::size_t tdim = c.transform_dim();

    std::vector<Subset> subsets(c.tables, Subset(c.bits));
    for (auto& omega : subsets) {
        for (auto& i : omega) {
            i = r.u32();
        }
    }

    std::vector<char> packed((tdim + 7) / 8);
    r.bytes(packed.data(), packed.size());
    std::vector<std::int8_t> signs(tdim);
    for (std::size_t i = 0; i < tdim; ++i) {
        signs[i] = ((static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1U) ? 1 : -1;
    }

    const std::size_t key_bytes = (c.bits + 7) / 8;
    std::vector<char> kb(key_bytes);
    std::vector<HashTable> tables(c.tables);
    for (auto& table : tables) {
        const std::uint32_t buckets = r.u32();
        for (std::uint32_t b = 0; b < buckets; ++b) {
            r.bytes(kb.data(), kb.size());
            HashKey key(c.bits);
            for (std::size_t t = 0; t < c.bits; ++t) {
                if ((static_cast<unsigned char>(kb[t / 8]) >> (t % 8)) & 1U) {
                    key.set(t);
                }
            }
            const std::uint32_t len = r.u32();
            if (len == 0 || len > n_points) {
                throw Error(Errc::MalformedIndex, "bucket length out of range");
            }
            std::vector<std::uint32_t> bucket(len);
            for (auto& n : bucket) {
                n = r.u32();
                if (n >= n_points) {
                    throw Error(Errc::MalformedIndex, "bucket entry out of range");
                }
            }
            if (!table.emplace(std::move(key), std::move(bucket)).second) {
                throw Error(Errc::MalformedIndex, "duplicate bucket key");
            }
        }
    }
    try {
        return LshIndex::assemble(c, std::move(subsets), SignDiagonal::from_signs(std::move(signs), c.seed),
                                  std::move(tables), n_points);
    } catch (const Error& e) {
        throw Error(Errc::MalformedIndex, e.what());
    }
}

void save_index(const LshIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path + " for writing");
    }
    save_index(index, out);
}

LshIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path);
    }
    return load_index(in);
}

} // namespace csilsh
