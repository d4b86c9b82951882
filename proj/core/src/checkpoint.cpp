#include "pepita/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace pepita {
namespace {

constexpr char kMagic[8] = {'P', 'E', 'P', 'I', 'T', 'A', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

// The build targets little-endian hosts; serialization writes the native
// representation, so a big-endian port would need byte swaps here.
void put_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void put_u8(std::string& out, std::uint8_t v) {
    out.push_back(static_cast<char>(v));
}

void put_f64(std::string& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

class Reader {
  public:
    Reader(const std::string& bytes, const std::string& origin)
        : bytes_(bytes), origin_(origin) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }

    double f64() {
        need(8);
        double v;
        std::memcpy(&v, bytes_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    void raw(char* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << origin_ << ": " << what << " at offset " << pos_;
        throw ParseError(os.str());
    }

  private:
    void need(std::size_t n) {
        if (remaining() < n) fail("truncated checkpoint");
    }

    const std::string& bytes_;
    std::string origin_;
    std::size_t pos_ = 0;
};

std::string sidecar_path(const std::string& path) { return path + ".json"; }

}  // namespace

std::string serialize_checkpoint(const Mlp& m) {
    m.validate();
    std::string out;
    out.append(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(m.layers.size()));
    for (const Layer& l : m.layers) {
        put_u32(out, static_cast<std::uint32_t>(l.W.rows));
        put_u32(out, static_cast<std::uint32_t>(l.W.cols));
        put_u8(out, static_cast<std::uint8_t>(l.act));
    }
    put_u32(out, static_cast<std::uint32_t>(m.F.rows));
    put_u32(out, static_cast<std::uint32_t>(m.F.cols));
    put_f64(out, m.dropout_rate);
    put_u8(out, m.dropout_input ? 1 : 0);
    for (const Layer& l : m.layers) {
        for (double v : l.W.v) put_f64(out, v);
        for (double v : l.b.v) put_f64(out, v);
    }
    for (double v : m.F.v) put_f64(out, v);
    return out;
}

Mlp deserialize_checkpoint(const std::string& bytes) {
    Reader r(bytes, "checkpoint");
    char magic[8];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        r.fail("bad magic");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        r.fail("unsupported version " + std::to_string(version));
    const std::uint32_t n_layers = r.u32();
    if (n_layers == 0 || n_layers > 64) r.fail("implausible layer count");

    Mlp m;
    m.layers.resize(n_layers);
    for (Layer& l : m.layers) {
        const std::uint32_t rows = r.u32();
        const std::uint32_t cols = r.u32();
        const std::uint8_t act = r.u8();
        if (act > 2) r.fail("unknown activation code");
        l.W = Tensor2(rows, cols);
        l.b = Tensor1(rows);
        l.act = static_cast<Activation>(act);
    }
    const std::uint32_t f_rows = r.u32();
    const std::uint32_t f_cols = r.u32();
    m.F = Tensor2(f_rows, f_cols);
    m.dropout_rate = r.f64();
    m.dropout_input = r.u8() != 0;

    for (Layer& l : m.layers) {
        for (double& v : l.W.v) v = r.f64();
        for (double& v : l.b.v) v = r.f64();
    }
    for (double& v : m.F.v) v = r.f64();
    if (r.remaining() != 0) r.fail("trailing bytes");
    m.validate();
    return m;
}

void save_checkpoint(const std::string& path, const Mlp& m,
                     const nlohmann::json& sidecar) {
    const std::string bytes = serialize_checkpoint(m);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ParseError("short write to " + path);
    std::ofstream sf(sidecar_path(path), std::ios::trunc);
    if (!sf) throw ParseError("cannot open " + sidecar_path(path));
    sf << sidecar.dump(2) << '\n';
}

Mlp load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return deserialize_checkpoint(buf.str());
}

nlohmann::json load_sidecar(const std::string& path) {
    std::ifstream sf(sidecar_path(path));
    if (!sf) return nlohmann::json::object();
    nlohmann::json j;
    sf >> j;
    return j;
}

std::uint64_t model_hash(const Mlp& m) {
    const std::string bytes = serialize_checkpoint(m);
    return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace pepita
