// Command-line front end for the CA simulator, dataset tooling, and the
// classifier training / evaluation pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cacnn/ca.hpp"
#include "cacnn/checkpoint.hpp"
#include "cacnn/dataset.hpp"
#include "cacnn/gradcheck.hpp"
#include "cacnn/loss.hpp"
#include "cacnn/pgm.hpp"
#include "cacnn/train.hpp"

namespace fs = std::filesystem;
using namespace cacnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// key=value spec file, same keys as the generated manifest sidecar.
DatasetSpec parse_spec_file(const std::string& path) {
    DatasetSpec spec;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "porosity") spec.porosity = std::stod(val);
        else if (key == "domain_sizes")
            for (double v : parse_list(val)) spec.domain_sizes.push_back(static_cast<int>(v));
        else if (key == "iteration_counts")
            for (double v : parse_list(val)) spec.iteration_counts.push_back(static_cast<int>(v));
        else if (key == "sigma_classes") spec.sigma_classes = parse_list(val);
        else if (key == "samples_per_class") spec.samples_per_class = std::stoi(val);
        else if (key == "base_seed") spec.base_seed = std::stoull(val);
        else if (key == "format" || key == "version" || key == "tool") continue;
        else throw std::invalid_argument("unknown spec key: " + key);
    }
    return spec;
}

// Loads a lattice from either the text dump or a PGM, keyed on content.
Lattice load_lattice(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    char head[2] = {0, 0};
    probe.read(head, 2);
    probe.close();
    if (head[0] == 'P' && head[1] == '5') return read_pgm(path);
    return Lattice::from_text_file(path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open for writing: " + path);
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"two-phase cellular automaton simulator and jump-parameter classifier"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "run one CA simulation");
    SimConfig sim_cfg{50, 0.7, 1.0, 50, 0};
    std::string sim_out, sim_pgm;
    sim->add_option("--n", sim_cfg.n, "resolution (cells per side)")->check(CLI::PositiveNumber);
    sim->add_option("--porosity", sim_cfg.porosity, "void fraction")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--sigma", sim_cfg.sigma, "jump parameter")->check(CLI::NonNegativeNumber);
    sim->add_option("--iters", sim_cfg.iterations, "CA iterations")->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", sim_cfg.seed, "RNG seed");
    sim->add_option("--out", sim_out, "text dump output path");
    sim->add_option("--pgm", sim_pgm, "PGM output path");

    // ---- gen-dataset ----
    auto* gen = app.add_subcommand("gen-dataset", "generate a labeled dataset");
    std::string gen_spec_path, gen_out;
    int gen_group = 0;
    double gen_scale = 1.0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec_path, "key=value spec file");
    gen->add_option("--paper-group", gen_group, "preset 1 (domain sizes) or 2 (iterations)")
        ->check(CLI::Range(1, 2));
    gen->add_option("--scale", gen_scale, "samples-per-class multiplier for presets")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--out", gen_out, "output dataset path")->required();

    // ---- train ----
    auto* tr = app.add_subcommand("train", "train a classifier");
    std::string tr_data, tr_val, tr_arch_path, tr_ckpt = "model.camw", tr_history;
    TrainConfig tr_cfg;
    tr->add_option("--data", tr_data, "training dataset (CADS)")->required();
    tr->add_option("--val", tr_val, "validation dataset (CADS)");
    tr->add_option("--arch", tr_arch_path, "architecture config file (default: built-in)");
    tr->add_option("--epochs", tr_cfg.epochs)->check(CLI::PositiveNumber);
    tr->add_option("--batch", tr_cfg.batch_size)->check(CLI::Range(2, 1 << 20));
    tr->add_option("--lr", tr_cfg.learning_rate)->check(CLI::PositiveNumber);
    tr->add_option("--seed", tr_cfg.seed);
    tr->add_option("--out", tr_ckpt, "checkpoint output path");
    tr->add_option("--history", tr_history, "per-epoch CSV output path");

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string ev_ckpt, ev_data, ev_csv, ev_confusion;
    bool ev_timing = false;
    ev->add_option("--ckpt", ev_ckpt)->required();
    ev->add_option("--data", ev_data)->required();
    ev->add_option("--csv-out", ev_csv, "metrics CSV output path");
    ev->add_option("--confusion-out", ev_confusion, "confusion matrix CSV output path");
    ev->add_flag("--timing", ev_timing, "also report inference timing");

    // ---- infer ----
    auto* inf = app.add_subcommand("infer", "classify one snapshot (PGM or text dump)");
    std::string inf_ckpt, inf_image;
    inf->add_option("--ckpt", inf_ckpt)->required();
    inf->add_option("--image", inf_image)->required();

    // ---- render ----
    auto* ren = app.add_subcommand("render", "export dataset samples as PGM images");
    std::string ren_data, ren_dir;
    ren->add_option("--data", ren_data)->required();
    ren->add_option("--dir", ren_dir, "output directory")->required();

    // ---- gradcheck ----
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::string gc_arch_path;
    int gc_n = 25, gc_batch = 4;
    double gc_h = 1e-5, gc_tol = 1e-4;
    std::size_t gc_samples = 40;
    std::uint64_t gc_seed = 0;
    gc->add_option("--arch", gc_arch_path, "architecture config file (default: built-in)");
    gc->add_option("--n", gc_n, "input resolution")->check(CLI::PositiveNumber);
    gc->add_option("--batch", gc_batch)->check(CLI::Range(2, 4096));
    gc->add_option("--step", gc_h, "finite-difference step");
    gc->add_option("--tol", gc_tol, "pass tolerance");
    gc->add_option("--samples", gc_samples, "checked entries per tensor (0 = all)");
    gc->add_option("--seed", gc_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    if (sim->parsed()) {
        std::cout << "resolved config: simulate n=" << sim_cfg.n << " porosity=" << sim_cfg.porosity
                  << " sigma=" << sim_cfg.sigma << " iters=" << sim_cfg.iterations
                  << " seed=" << sim_cfg.seed << "\n";
        const Lattice lat = simulate(sim_cfg);
        if (!sim_out.empty()) write_text_file(sim_out, lat.to_text());
        if (!sim_pgm.empty()) write_pgm(lat, sim_pgm);
        if (sim_out.empty() && sim_pgm.empty()) std::cout << lat.to_text();
        std::cout << "solid cells: " << lat.solid_count()
                  << ", mean solid neighbors: " << lat.mean_solid_neighbors() << "\n";
        return kExitOk;
    }

    if (gen->parsed()) {
        DatasetSpec spec;
        if (!gen_spec_path.empty())
            spec = parse_spec_file(gen_spec_path);
        else if (gen_group != 0)
            spec = DatasetSpec::paper_group(gen_group, gen_scale, gen_seed);
        else
            throw std::invalid_argument("gen-dataset needs --spec or --paper-group");
        if (gen_seed != 0) spec.base_seed = gen_seed;
        std::cout << "resolved config:\n" << manifest_text(spec);
        const DatasetFile file = generate(spec);
        write(file, gen_out);
        write_manifest(spec, gen_out + ".manifest");
        std::cout << "wrote " << file.samples.size() << " samples to " << gen_out << "\n";
        return kExitOk;
    }

    if (tr->parsed()) {
        const std::string arch =
            tr_arch_path.empty() ? Model::default_architecture() : read_file(tr_arch_path);
        std::cout << "resolved config: train data=" << tr_data << " epochs=" << tr_cfg.epochs
                  << " batch=" << tr_cfg.batch_size << " lr=" << tr_cfg.learning_rate
                  << " seed=" << tr_cfg.seed << "\n";
        const DatasetFile train_set = read(tr_data);
        const DatasetFile val_set = tr_val.empty() ? DatasetFile{} : read(tr_val);
        Model model = Model::from_config(arch, tr_cfg.seed);
        const TrainResult result = train(model, train_set, val_set, tr_cfg);
        for (const EpochStats& e : result.history)
            std::cout << "epoch " << e.epoch << ": train_loss=" << e.train_loss
                      << " val_top1=" << e.val_top1 << "\n";
        CheckpointMeta meta;
        meta.epoch = tr_cfg.epochs;
        meta.seed = tr_cfg.seed;
        fs::path manifest = tr_data + ".manifest";
        if (fs::exists(manifest)) meta.dataset_manifest_hash = fnv1a64(read_file(manifest.string()));
        save_checkpoint(model, tr_ckpt, meta);
        if (!tr_history.empty()) write_text_file(tr_history, result.history_csv());
        std::cout << "checkpoint written to " << tr_ckpt << "\n";
        return kExitOk;
    }

    if (ev->parsed()) {
        std::cout << "resolved config: eval ckpt=" << ev_ckpt << " data=" << ev_data << "\n";
        LoadedCheckpoint ckpt = load_checkpoint(ev_ckpt);
        const DatasetFile data = read(ev_data);
        const Metrics m = evaluate(ckpt.model, data);
        std::cout << m.to_text();
        if (!ev_csv.empty())
            write_text_file(ev_csv, Metrics::csv_header() + m.csv_row(fs::path(ev_data).stem().string()));
        if (!ev_confusion.empty()) write_text_file(ev_confusion, m.confusion_csv());
        if (ev_timing) std::cout << measure_inference(ckpt.model, data).to_text();
        return kExitOk;
    }

    if (inf->parsed()) {
        std::cout << "resolved config: infer ckpt=" << inf_ckpt << " image=" << inf_image << "\n";
        LoadedCheckpoint ckpt = load_checkpoint(inf_ckpt);
        const Lattice lat = load_lattice(inf_image);
        Tensor input({1, 1, lat.n(), lat.n()});
        for (std::size_t i = 0; i < lat.size(); ++i) input[i] = lat[i];
        const Tensor probs = ckpt.model.forward(input, Mode::Infer);
        std::cout << "class probabilities (class c <-> sigma = c + 1):\n";
        for (int c = 0; c < 10; ++c) std::cout << "  class " << c << ": " << probs[c] << "\n";
        std::vector<std::pair<double, int>> ranked;
        for (int c = 0; c < 10; ++c) ranked.push_back({-probs[c], c});
        std::sort(ranked.begin(), ranked.end());
        std::cout << "top-3:";
        for (int i = 0; i < 3; ++i) std::cout << " " << ranked[i].second;
        std::cout << "\n";
        return kExitOk;
    }

    if (ren->parsed()) {
        std::cout << "resolved config: render data=" << ren_data << " dir=" << ren_dir << "\n";
        const DatasetFile data = read(ren_data);
        std::cout << "wrote " << export_images(data, ren_dir) << " images\n";
        return kExitOk;
    }

    if (gc->parsed()) {
        const std::string arch =
            gc_arch_path.empty() ? Model::default_architecture() : read_file(gc_arch_path);
        std::cout << "resolved config: gradcheck n=" << gc_n << " batch=" << gc_batch
                  << " h=" << gc_h << " tol=" << gc_tol << " samples=" << gc_samples
                  << " seed=" << gc_seed << "\n";
        Model model = Model::from_config(arch, gc_seed);
        SplitMix64 rng(mix_seed(gc_seed, {0xC0FFEE}));
        Tensor input({gc_batch, 1, gc_n, gc_n});
        for (std::size_t i = 0; i < input.size(); ++i) input[i] = rng.next_below(2);
        std::vector<int> labels;
        for (int b = 0; b < gc_batch; ++b) labels.push_back(b % 10);
        const auto report = gradient_check(model, input, labels, gc_h, gc_tol, gc_samples, gc_seed);
        std::cout << report.to_text();
        return report.passed ? kExitOk : kExitNumeric;
    }

    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const DatasetError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("truncated") != std::string::npos)
            return kExitIo;
        return kExitNumeric;
    }
}
