#include "cacnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "cacnn/ca.hpp"
#include "cacnn/pgm.hpp"
#include "cacnn/rng.hpp"

namespace cacnn {

DatasetSpec DatasetSpec::paper_group(int group, double scale, std::uint64_t base_seed) {
    DatasetSpec spec;
    spec.porosity = 0.7;
    spec.base_seed = base_seed;
    for (int c = 1; c <= 10; ++c) spec.sigma_classes.push_back(c);
    spec.samples_per_class = std::max(10, static_cast<int>(std::floor(1000.0 * scale)));
    if (group == 1) {
        spec.domain_sizes = {25, 50, 100, 150};
        spec.iteration_counts = {50};
    } else if (group == 2) {
        spec.domain_sizes = {150};
        spec.iteration_counts = {0, 5, 25, 50};
    } else {
        throw std::invalid_argument("paper_group: group must be 1 or 2");
    }
    return spec;
}

namespace {

unsigned generation_threads() {
    if (const char* env = std::getenv("CACNN_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace

DatasetFile generate(const DatasetSpec& spec) {
    if (spec.domain_sizes.empty() || spec.iteration_counts.empty() || spec.sigma_classes.empty() ||
        spec.samples_per_class < 1)
        throw EmptySpecError("dataset spec produces no samples");

    // Flatten the (N, T, class, index) cross product; each job's seed depends
    // only on its coordinates, so the output is identical for any worker count.
    struct Job {
        int n, t, index;
        std::size_t cls;
    };
    std::vector<Job> jobs;
    for (int n : spec.domain_sizes)
        for (int t : spec.iteration_counts)
            for (std::size_t cls = 0; cls < spec.sigma_classes.size(); ++cls)
                for (int i = 0; i < spec.samples_per_class; ++i) jobs.push_back({n, t, i, cls});

    DatasetFile out;
    out.samples.resize(jobs.size());
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const Job& job = jobs[j];
            SimConfig cfg;
            cfg.n = job.n;
            cfg.porosity = spec.porosity;
            cfg.sigma = spec.sigma_classes[job.cls];
            cfg.iterations = job.t;
            cfg.seed = mix_seed(spec.base_seed, {static_cast<std::uint64_t>(job.n),
                                                 static_cast<std::uint64_t>(job.t), job.cls,
                                                 static_cast<std::uint64_t>(job.index)});
            Sample& s = out.samples[j];
            s.grid = simulate(cfg);
            s.label = static_cast<std::uint8_t>(job.cls);
            s.meta = {job.n, job.t, spec.porosity, cfg.seed};
        }
    };

    const unsigned workers = std::min<std::size_t>(generation_threads(), jobs.size());
    if (workers <= 1) {
        run_range(0, jobs.size());
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (jobs.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(jobs.size(), begin + chunk);
        if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
    return out;
}

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint16_t as_u16(const unsigned char* b) {
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t as_u32(const unsigned char* b) {
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write(const DatasetFile& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot open for writing: " + path);
    out.write("CADS", 4);
    put_u16(out, DatasetFile::kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(file.samples.size()));
    std::vector<unsigned char> row;
    for (const Sample& s : file.samples) {
        const int n = s.grid.n();
        put_u16(out, static_cast<std::uint16_t>(n));
        put_u16(out, static_cast<std::uint16_t>(n));
        out.put(static_cast<char>(s.label));
        put_u16(out, static_cast<std::uint16_t>(s.meta.iterations));
        const int row_bytes = (n + 7) / 8;
        row.assign(row_bytes, 0);
        for (int y = 0; y < n; ++y) {
            std::fill(row.begin(), row.end(), 0);
            for (int x = 0; x < n; ++x)
                if (s.grid.at(x, y)) row[x / 8] |= static_cast<unsigned char>(1u << (x % 8));
            out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
        }
    }
    if (!out) throw DatasetError("write failed: " + path);
}

DatasetFile read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open: " + path);
    unsigned char header[10];
    if (!get_bytes(in, header, 10)) throw TruncatedFileError("truncated header: " + path);
    if (std::memcmp(header, "CADS", 4) != 0) throw BadMagicError("bad magic in " + path);
    const std::uint16_t version = as_u16(header + 4);
    if (version != DatasetFile::kFormatVersion)
        throw UnsupportedVersionError("unsupported dataset version " + std::to_string(version));
    const std::uint32_t count = as_u32(header + 6);
    DatasetFile out;
    out.samples.reserve(count);
    std::vector<unsigned char> row;
    for (std::uint32_t i = 0; i < count; ++i) {
        unsigned char sh[7];
        if (!get_bytes(in, sh, 7))
            throw TruncatedFileError("truncated at sample " + std::to_string(i));
        const int h = as_u16(sh);
        const int w = as_u16(sh + 2);
        const std::uint8_t label = sh[4];
        const int iters = as_u16(sh + 5);
        if (h < 1 || w != h)
            throw DatasetError("bad sample dims at sample " + std::to_string(i));
        Sample s;
        s.grid = Lattice(h);
        s.label = label;
        s.meta = {h, iters, 0.0, 0};
        const int row_bytes = (w + 7) / 8;
        row.resize(row_bytes);
        for (int y = 0; y < h; ++y) {
            if (!get_bytes(in, row.data(), static_cast<std::size_t>(row_bytes)))
                throw TruncatedFileError("truncated at sample " + std::to_string(i));
            for (int x = 0; x < w; ++x)
                s.grid.set(x, y, (row[x / 8] >> (x % 8)) & 1u);
        }
        out.samples.push_back(std::move(s));
    }
    return out;
}

SplitResult split(const DatasetFile& file, double train_frac, double val_frac, double test_frac,
                  std::uint64_t seed) {
    if (!(train_frac > 0 && val_frac > 0 && test_frac > 0))
        throw std::invalid_argument("split: fractions must be positive");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must sum to 1");

    std::map<std::tuple<int, int, int>, std::vector<std::uint32_t>> strata;
    for (std::uint32_t i = 0; i < file.samples.size(); ++i) {
        const Sample& s = file.samples[i];
        strata[{s.label, s.grid.n(), s.meta.iterations}].push_back(i);
    }
    SplitResult out;
    std::size_t stratum_index = 0;
    for (auto& [key, ids] : strata) {
        SplitMix64 rng(mix_seed(seed, {stratum_index++}));
        rng.shuffle(ids.data(), ids.size());
        const std::size_t total = ids.size();
        if (total < 3) {
            std::ostringstream msg;
            msg << "stratum (class=" << std::get<0>(key) << ", n=" << std::get<1>(key)
                << ", t=" << std::get<2>(key) << ") has " << total
                << " samples; assigned wholly to train";
            out.warnings.push_back(msg.str());
            for (auto id : ids) out.train.samples.push_back(file.samples[id]);
            continue;
        }
        std::size_t n_train = static_cast<std::size_t>(std::llround(train_frac * total));
        std::size_t n_val = static_cast<std::size_t>(std::llround(val_frac * total));
        n_train = std::min(n_train, total - 2);
        if (n_train == 0) n_train = 1;
        if (n_val == 0) n_val = 1;
        if (n_train + n_val >= total) n_val = total - n_train - 1;
        for (std::size_t k = 0; k < total; ++k) {
            const Sample& s = file.samples[ids[k]];
            if (k < n_train)
                out.train.samples.push_back(s);
            else if (k < n_train + n_val)
                out.val.samples.push_back(s);
            else
                out.test.samples.push_back(s);
        }
    }
    return out;
}

std::size_t export_images(const DatasetFile& file, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw DatasetError("cannot create directory: " + dir);
    std::size_t written = 0;
    for (std::size_t i = 0; i < file.samples.size(); ++i) {
        const Sample& s = file.samples[i];
        std::ostringstream name;
        name << i << "_c" << int(s.label) << "_n" << s.grid.n() << "_t" << s.meta.iterations
             << ".pgm";
        write_pgm(s.grid, (fs::path(dir) / name.str()).string());
        ++written;
    }
    return written;
}

std::string manifest_text(const DatasetSpec& spec) {
    std::ostringstream out;
    out << "format=CADS\n";
    out << "version=" << DatasetFile::kFormatVersion << "\n";
    out << "tool=cacnn 1.0\n";
    out << "porosity=" << spec.porosity << "\n";
    out << "domain_sizes=";
    for (std::size_t i = 0; i < spec.domain_sizes.size(); ++i)
        out << (i ? "," : "") << spec.domain_sizes[i];
    out << "\niteration_counts=";
    for (std::size_t i = 0; i < spec.iteration_counts.size(); ++i)
        out << (i ? "," : "") << spec.iteration_counts[i];
    out << "\nsigma_classes=";
    for (std::size_t i = 0; i < spec.sigma_classes.size(); ++i)
        out << (i ? "," : "") << spec.sigma_classes[i];
    out << "\nsamples_per_class=" << spec.samples_per_class << "\n";
    out << "base_seed=" << spec.base_seed << "\n";
    return out.str();
}

void write_manifest(const DatasetSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open for writing: " + path);
    out << manifest_text(spec);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace cacnn
