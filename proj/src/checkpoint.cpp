#include "cacnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cacnn {

namespace {

constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}
void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}
void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}
void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void need(std::istream& in, unsigned char* dst, std::size_t n, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error(std::string("checkpoint truncated: ") + what);
}
std::uint16_t get_u16(std::istream& in, const char* what) {
    unsigned char b[2];
    need(in, b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}
std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    need(in, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(std::istream& in, const char* what) {
    unsigned char b[8];
    need(in, b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
double get_f64(std::istream& in, const char* what) {
    const std::uint64_t bits = get_u64(in, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}
std::string get_str(std::istream& in, const char* what) {
    const std::uint32_t len = get_u32(in, what);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (static_cast<std::uint32_t>(in.gcount()) != len)
        throw std::runtime_error(std::string("checkpoint truncated: ") + what);
    return s;
}

void put_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    put_u16(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    out.put(static_cast<char>(t.rank()));
    for (int e : t.shape()) put_u32(out, static_cast<std::uint32_t>(e));
    for (std::size_t i = 0; i < t.size(); ++i) put_f64(out, t[i]);
}

}  // namespace

void save_checkpoint(Model& model, const std::string& path, const CheckpointMeta& meta,
                     const AdamSnapshot* adam) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("CAMW", 4);
    put_u16(out, kVersion);
    put_str(out, model.architecture());
    std::ostringstream metatext;
    metatext << "epoch=" << meta.epoch << "\nseed=" << meta.seed
             << "\ndataset_manifest_hash=" << meta.dataset_manifest_hash << "\n";
    put_str(out, metatext.str());
    out.put(adam ? 1 : 0);

    std::vector<std::pair<std::string, Tensor*>> tensors;
    for (const ParamRef& p : model.params()) tensors.emplace_back(p.name, p.value);
    for (const ParamRef& p : model.state()) tensors.emplace_back(p.name, p.value);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) put_tensor(out, name, *t);

    if (adam) {
        put_u64(out, adam->steps);
        put_f64(out, adam->lr);
        put_u64(out, adam->m.size());
        for (double v : adam->m) put_f64(out, v);
        put_u64(out, adam->v.size());
        for (double v : adam->v) put_f64(out, v);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    unsigned char magic[4];
    need(in, magic, 4, "magic");
    if (std::memcmp(magic, "CAMW", 4) != 0) throw std::runtime_error("bad checkpoint magic");
    const std::uint16_t version = get_u16(in, "version");
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    LoadedCheckpoint out;
    const std::string arch = get_str(in, "architecture");
    const std::string metatext = get_str(in, "metadata");
    out.model = Model::from_config(arch, 0);
    {
        std::istringstream ms(metatext);
        std::string line;
        while (std::getline(ms, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(0, eq);
            const std::string val = line.substr(eq + 1);
            if (key == "epoch") out.meta.epoch = std::stoi(val);
            if (key == "seed") out.meta.seed = std::stoull(val);
            if (key == "dataset_manifest_hash") out.meta.dataset_manifest_hash = std::stoull(val);
        }
    }
    unsigned char has_adam;
    need(in, &has_adam, 1, "flags");

    std::map<std::string, Tensor*> by_name;
    for (const ParamRef& p : out.model.params()) by_name[p.name] = p.value;
    for (const ParamRef& p : out.model.state()) by_name[p.name] = p.value;

    const std::uint32_t count = get_u32(in, "tensor count");
    for (std::uint32_t ti = 0; ti < count; ++ti) {
        const std::uint16_t name_len = get_u16(in, "tensor name");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (static_cast<std::uint16_t>(in.gcount()) != name_len)
            throw std::runtime_error("checkpoint truncated: tensor name");
        unsigned char rank;
        need(in, &rank, 1, "tensor rank");
        std::vector<int> shape(rank);
        for (auto& e : shape) e = static_cast<int>(get_u32(in, "tensor extent"));
        Tensor t(shape);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = get_f64(in, "tensor values");
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint tensor not in architecture: " + name);
        if (it->second->shape() != shape)
            throw std::runtime_error("checkpoint tensor shape mismatch: " + name);
        *it->second = std::move(t);
    }

    if (has_adam) {
        AdamSnapshot snap;
        snap.steps = get_u64(in, "adam steps");
        snap.lr = get_f64(in, "adam lr");
        snap.m.resize(get_u64(in, "adam m size"));
        for (double& v : snap.m) v = get_f64(in, "adam m");
        snap.v.resize(get_u64(in, "adam v size"));
        for (double& v : snap.v) v = get_f64(in, "adam v");
        out.adam = std::move(snap);
    }
    return out;
}

}  // namespace cacnn
