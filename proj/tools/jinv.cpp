// jinv - blind denoising via J-invariant self-supervision.
//
// Subcommands: simulate, calibrate, gp-demo, alphabet-demo,
//              counts {split, normalize, rank-curve, bicv}, metrics, verify-jinv.
// Images are 16-bit binary PGM (P5); curves and matrices are CSV.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jinv/calibrate.hpp"
#include "jinv/counts.hpp"
#include "jinv/csv.hpp"
#include "jinv/denoisers.hpp"
#include "jinv/errors.hpp"
#include "jinv/grid.hpp"
#include "jinv/masking.hpp"
#include "jinv/noise.hpp"
#include "jinv/parallel.hpp"
#include "jinv/pgm.hpp"
#include "jinv/rng.hpp"
#include "jinv/scene.hpp"
#include "jinv/theory.hpp"

namespace fs = std::filesystem;
using namespace jinv;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 0;
    bool quiet = false;
};

/// Tracks files written by a command so a failure leaves no partial outputs.
class OutputTracker {
public:
    explicit OutputTracker(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

    fs::path reserve(const std::string& name) {
        const fs::path p = dir_ / name;
        written_.push_back(p);
        return p;
    }

    void discard_all() {
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

void info(const GlobalOptions& opts, const std::string& line) {
    if (!opts.quiet) std::cout << line << '\n';
}

std::vector<double> parse_double_list(const std::string& csv_list) {
    std::vector<double> out;
    std::stringstream ss(csv_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("expected a comma-separated list of numbers");
    return out;
}

std::vector<int> parse_int_list(const std::string& csv_list) {
    std::vector<int> out;
    for (double v : parse_double_list(csv_list)) out.push_back(static_cast<int>(v));
    return out;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------- simulate

struct NoiseFlags {
    std::string spec_file;
    std::optional<double> gaussian;
    std::optional<double> poisson;
    std::string bernoulli; // "p,low,high"
    std::optional<double> cauchy;
    std::optional<double> gain;
    std::string clip; // "lo,hi"
};

NoiseSpec build_noise_spec(const NoiseFlags& flags) {
    if (!flags.spec_file.empty()) {
        std::ifstream in(flags.spec_file);
        if (!in) throw std::runtime_error("cannot read noise spec file " + flags.spec_file);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_noise_spec(buf.str());
    }
    // inline flags compose in a camera-like order: gain, poisson, gaussian,
    // cauchy, bernoulli; use a spec file for any other order
    NoiseSpec spec;
    if (flags.gain) spec.terms.push_back(GainFieldNoise{*flags.gain});
    if (flags.poisson) spec.terms.push_back(PoissonNoise{*flags.poisson});
    if (flags.gaussian) spec.terms.push_back(GaussianNoise{*flags.gaussian});
    if (flags.cauchy) spec.terms.push_back(CauchyNoise{*flags.cauchy});
    if (!flags.bernoulli.empty()) {
        const auto v = parse_double_list(flags.bernoulli);
        if (v.size() != 3) throw CLI::ValidationError("--bernoulli expects p,low,high");
        spec.terms.push_back(BernoulliNoise{v[0], v[1], v[2]});
    }
    if (!flags.clip.empty()) {
        const auto v = parse_double_list(flags.clip);
        if (v.size() != 2) throw CLI::ValidationError("--clip expects lo,hi");
        spec.clip = ClipRange{v[0], v[1]};
    }
    spec.validate();
    return spec;
}

std::string one_line_spec(const NoiseSpec& spec) {
    std::string text = format_noise_spec(spec);
    std::replace(text.begin(), text.end(), '\n', ';');
    while (!text.empty() && text.back() == ';') text.pop_back();
    return text;
}

int cmd_simulate(const GlobalOptions& global, const std::string& in_path, int scene_seed,
                 bool use_scene, int width, int height, double texture,
                 const NoiseFlags& noise_flags) {
    OutputTracker outputs(global.out_dir);
    ImageGrid clean;
    if (use_scene) {
        clean = make_scene(Seed{static_cast<std::uint64_t>(scene_seed)}, width, height,
                           SceneOptions{texture});
        write_pgm16(outputs.reserve("clean.pgm"), clean);
    } else {
        if (in_path.empty()) throw CLI::ValidationError("simulate needs --in or --scene");
        clean = read_pgm16(in_path);
    }
    const NoiseSpec spec = build_noise_spec(noise_flags);
    const ImageGrid noisy = apply_noise(clean, spec, Seed{global.seed});
    write_pgm16(outputs.reserve("noisy.pgm"), noisy);
    write_text(outputs.reserve("spec.txt"), format_noise_spec(spec));

    std::ostringstream meta;
    meta << "width=" << clean.width << '\n' << "height=" << clean.height << '\n';
    meta << "seed=" << global.seed << '\n';
    meta << "spec=" << one_line_spec(spec) << '\n';
    bool variance_defined = !spec.clip.has_value();
    for (const auto& t : spec.terms)
        if (std::holds_alternative<CauchyNoise>(t)) variance_defined = false;
    if (variance_defined)
        meta << "noise_variance=" << csv::format_number(noise_variance(spec, clean)) << '\n';
    else
        meta << "noise_variance=undefined\n";
    write_text(outputs.reserve("meta.txt"), meta.str());
    info(global, "wrote noisy.pgm, spec.txt, meta.txt" + std::string(use_scene ? ", clean.pgm" : ""));
    return 0;
}

// --------------------------------------------------------------- calibrate

struct PartitionFlags {
    std::string kind = "grid"; // grid | singletons | random
    int grid_w = 4;
    int grid_h = 4;
    int random_k = 25;
    std::uint64_t partition_seed = 0;
};

Partition build_partition(const PartitionFlags& flags, const ImageGrid& x) {
    if (flags.kind == "singletons") return partition_singletons(x.size());
    if (flags.kind == "grid") return partition_grid(x.width, x.height, flags.grid_w, flags.grid_h);
    if (flags.kind == "random")
        return partition_random(x.size(), flags.random_k, flags.partition_seed);
    throw CLI::ValidationError("unknown partition kind '" + flags.kind + "'");
}

struct StrategyFlags {
    std::string kind = "interpolate"; // interpolate | random
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t replacement_seed = 0;
};

ReplacementStrategy build_strategy(const StrategyFlags& flags) {
    if (flags.kind == "interpolate") return InterpolateNeighbors{};
    if (flags.kind == "random") return RandomUniform{flags.lo, flags.hi, Seed{flags.replacement_seed}};
    throw CLI::ValidationError("unknown replacement strategy '" + flags.kind + "'");
}

int cmd_calibrate(const GlobalOptions& global, const std::string& in_path,
                  const std::string& clean_path, const std::string& denoiser,
                  const std::string& radii, const std::string& thresholds, int levels,
                  const std::string& cutoffs, int patch, int window, bool full_center,
                  bool no_mask, const PartitionFlags& partition_flags,
                  const StrategyFlags& strategy_flags, bool mix, double noise_var,
                  bool report_g) {
    OutputTracker outputs(global.out_dir);
    const ImageGrid x = read_pgm16(in_path);
    std::optional<ImageGrid> clean;
    if (!clean_path.empty()) {
        clean = read_pgm16(clean_path);
        if (!clean->same_shape(x)) throw std::invalid_argument("--clean shape differs from --in");
    }

    std::vector<DenoiserParam> params;
    bool natively_invariant = false;
    if (denoiser == "median") {
        // the donut median is J-invariant for the singleton partition as-is
        natively_invariant = !full_center;
        for (int r : parse_int_list(radii)) params.push_back(MedianRadius{r, full_center});
    } else if (denoiser == "wavelet") {
        for (double t : parse_double_list(thresholds)) params.push_back(WaveletThreshold{t, levels});
    } else if (denoiser == "nlm") {
        for (double h : parse_double_list(cutoffs)) params.push_back(NlmCutoff{h, patch, window});
    } else {
        throw CLI::ValidationError("unknown denoiser '" + denoiser + "'");
    }

    const bool masked = !no_mask && !natively_invariant;
    CalibrationCurve curve;
    Partition partition;
    ReplacementStrategy strategy = build_strategy(strategy_flags);
    if (masked) {
        partition = build_partition(partition_flags, x);
        curve = sweep(params, x, partition, strategy, clean ? &*clean : nullptr);
    } else {
        curve = sweep_plain(params, x, clean ? &*clean : nullptr);
    }

    {
        std::ofstream csv_out(outputs.reserve("curve.csv"));
        write_curve_csv(csv_out, curve);
        if (!csv_out) throw std::runtime_error("failed to write curve.csv");
    }

    const DenoiserParam best = select_best(curve);
    double best_ss = 0.0;
    for (const auto& e : curve.entries)
        if (!param_less(e.param, best) && !param_less(best, e.param)) best_ss = e.ss_loss;

    // f: the J-invariant evaluation at the chosen parameter; g: the raw
    // denoiser applied directly (for the donut median, g is the full-center
    // median at the same radius)
    ImageGrid f_best;
    if (masked) {
        JInvariantDenoiser f{make_denoiser(best), partition, strategy};
        f_best = evaluate_j_invariant(f, x);
    } else {
        f_best = denoise(x, best);
    }
    DenoiserParam g_param = best;
    if (const auto* m = std::get_if<MedianRadius>(&best); m != nullptr && !m->include_center)
        g_param = MedianRadius{m->radius, true};
    const ImageGrid g_best = denoise(x, g_param);
    write_pgm16(outputs.reserve("f_best.pgm"), f_best);
    write_pgm16(outputs.reserve("g_best.pgm"), g_best);

    std::ostringstream chosen;
    chosen << "param=" << format_denoiser_param(best) << '\n';
    chosen << "ss_loss=" << csv::format_number(best_ss) << '\n';
    if (clean) {
        chosen << "f_psnr=" << csv::format_number(psnr(f_best, *clean)) << '\n';
        chosen << "g_psnr=" << csv::format_number(psnr(g_best, *clean)) << '\n';
        chosen << "reported=" << (report_g ? "g" : "f") << '\n';
    }
    if (mix) {
        if (!(noise_var > 0.0))
            throw CLI::ValidationError("--mix requires --noise-var > 0");
        const MixingResult mixed = optimal_mixing(f_best, x, noise_var, best_ss);
        write_pgm16(outputs.reserve("mixed.pgm"), mixed.mixed);
        chosen << "lambda=" << csv::format_number(mixed.lambda) << '\n';
        chosen << "predicted_gain_db=" << csv::format_number(mixed.predicted_psnr_gain_db) << '\n';
        if (clean)
            chosen << "mixed_psnr=" << csv::format_number(psnr(mixed.mixed, *clean)) << '\n';
    }
    write_text(outputs.reserve("chosen.txt"), chosen.str());
    info(global, "selected " + format_denoiser_param(best));
    std::cout << chosen.str();
    return 0;
}

// ----------------------------------------------------------------- gp-demo

int cmd_gp_demo(const GlobalOptions& global, int side, const std::string& lengthscales,
                double sigma) {
    if (side < 2 || side > 33)
        throw CLI::ValidationError("--side must be in [2, 33] (dense solves at desk scale)");
    if (!(sigma > 0.0))
        throw CLI::ValidationError("--sigma must be > 0 (the full predictor is trivial at 0)");
    OutputTracker outputs(global.out_dir);

    std::vector<GpCurvePoint> curve;
    for (double ell : parse_double_list(lengthscales)) {
        TorusGP gp{side, ell, sigma};
        GpCurvePoint point;
        point.lengthscale = ell;
        point.jinv_mse = gp_jinv_predictor_mse(gp);
        point.full_mse = gp_full_predictor_mse(gp);
        curve.push_back(point);

        const auto [y, x] = gp_sample(gp, Seed{global.seed});
        // samples are ~N(0,1); map +-3 sigma into the unit range for PGM
        auto to_unit = [](ImageGrid img) {
            for (double& v : img.values) v = v / 6.0 + 0.5;
            return img;
        };
        std::ostringstream stem;
        stem << "gp_l" << csv::format_number(ell);
        write_pgm16(outputs.reserve(stem.str() + "_clean.pgm"), to_unit(y));
        write_pgm16(outputs.reserve(stem.str() + "_noisy.pgm"), to_unit(x));
        info(global, "lengthscale " + csv::format_number(ell) +
                         ": jinv=" + csv::format_number(point.jinv_mse) +
                         " full=" + csv::format_number(point.full_mse));
    }
    std::ofstream csv_out(outputs.reserve("gp_curve.csv"));
    write_gp_curve_csv(csv_out, curve);
    if (!csv_out) throw std::runtime_error("failed to write gp_curve.csv");
    return 0;
}

// ------------------------------------------------------------ alphabet-demo

int cmd_alphabet_demo(const GlobalOptions& global, const std::string& sigmas, int trials,
                      int letters, int side, int coarse) {
    OutputTracker outputs(global.out_dir);
    Alphabet alphabet;
    alphabet.letters = make_glyph_alphabet(Seed{global.seed}, letters, side, coarse);
    alphabet.noise_sigma = 1.0;
    const auto sigma_list = parse_double_list(sigmas);
    const auto curve = alphabet_vs_gp_mse(alphabet, sigma_list, Seed{global.seed}, trials);
    std::ofstream csv_out(outputs.reserve("alphabet_curve.csv"));
    write_alphabet_curve_csv(csv_out, curve);
    if (!csv_out) throw std::runtime_error("failed to write alphabet_curve.csv");
    for (const auto& p : curve)
        info(global, "sigma " + csv::format_number(p.sigma) +
                         ": alphabet=" + csv::format_number(p.alphabet_mse) +
                         " gp=" + csv::format_number(p.gp_mse));
    return 0;
}

// ------------------------------------------------------------------ counts

CountMatrix read_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return read_count_matrix_csv(in);
}

RealMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return read_real_matrix_csv(in);
}

NormalizationSpec::Rho parse_rho(const std::string& rho) {
    if (rho == "sqrt") return NormalizationSpec::Rho::kSqrt;
    if (rho == "log1p") return NormalizationSpec::Rho::kLog1p;
    throw CLI::ValidationError("--rho must be sqrt or log1p");
}

int cmd_counts_split(const GlobalOptions& global, const std::string& in_path, double p) {
    OutputTracker outputs(global.out_dir);
    const CountMatrix counts = read_counts_file(in_path);
    const auto [first, second] = split_counts(counts, p, Seed{global.seed});
    {
        std::ofstream o1(outputs.reserve("split1.csv"));
        write_count_matrix_csv(o1, first);
        std::ofstream o2(outputs.reserve("split2.csv"));
        write_count_matrix_csv(o2, second);
        if (!o1 || !o2) throw std::runtime_error("failed to write split outputs");
    }
    info(global, "wrote split1.csv, split2.csv");
    return 0;
}

int cmd_counts_normalize(const GlobalOptions& global, const std::string& in_path, double n0,
                         const std::string& rho) {
    OutputTracker outputs(global.out_dir);
    const CountMatrix counts = read_counts_file(in_path);
    NormalizationSpec spec;
    spec.n0 = n0 > 0.0 ? n0 : median_row_sum(counts);
    spec.rho = parse_rho(rho);
    const RealMatrix z = normalize(counts, spec);
    std::ofstream out(outputs.reserve("normalized.csv"));
    write_real_matrix_csv(out, z, counts.cell_ids, counts.gene_names);
    if (!out) throw std::runtime_error("failed to write normalized.csv");
    info(global, "wrote normalized.csv (n0=" + csv::format_number(spec.n0) + ")");
    return 0;
}

int cmd_counts_rank_curve(const GlobalOptions& global, const std::string& in_path,
                          const std::string& in1, const std::string& in2, double p,
                          const std::string& rho, const std::string& ks) {
    OutputTracker outputs(global.out_dir);
    RealMatrix z1, z2;
    if (!in1.empty() || !in2.empty()) {
        if (in1.empty() || in2.empty())
            throw CLI::ValidationError("--in1 and --in2 must be given together");
        z1 = read_matrix_file(in1);
        z2 = read_matrix_file(in2);
    } else {
        const CountMatrix counts = read_counts_file(in_path);
        const auto [c1, c2] = split_counts(counts, p, Seed{global.seed});
        // shared n0: median over the row sums of both halves
        const double n0 = 0.5 * (median_row_sum(c1) + median_row_sum(c2));
        NormalizationSpec spec;
        spec.n0 = n0;
        spec.rho = parse_rho(rho);
        z1 = normalize(c1, spec);
        z2 = normalize(c2, spec);
    }
    const auto k_range = parse_int_list(ks);
    const auto curve = self_supervised_rank_curve(z1, z2, k_range);
    std::ofstream out(outputs.reserve("rank_curve.csv"));
    write_rank_curve_csv(out, curve);
    if (!out) throw std::runtime_error("failed to write rank_curve.csv");
    const auto best =
        std::min_element(curve.begin(), curve.end(),
                         [](const auto& a, const auto& b) { return a.loss < b.loss; });
    std::cout << "best_k=" << best->k << '\n';
    return 0;
}

int cmd_counts_bicv(const GlobalOptions& global, const std::string& in_path,
                    const std::string& ks, int folds) {
    OutputTracker outputs(global.out_dir);
    const RealMatrix x = read_matrix_file(in_path);

    // random balanced halves of the columns
    std::vector<std::uint32_t> cols(x.cols);
    std::iota(cols.begin(), cols.end(), 0u);
    CounterRng rng(global.seed, 0x636f6c73ULL, 0);
    for (std::size_t i = cols.size(); i > 1; --i)
        std::swap(cols[i - 1], cols[static_cast<std::size_t>(rng.next_below(i))]);
    Partition col_split;
    col_split.dims = static_cast<std::size_t>(x.cols);
    col_split.subsets.resize(2);
    for (std::size_t i = 0; i < cols.size(); ++i)
        col_split.subsets[i < cols.size() / 2 ? 0 : 1].push_back(cols[i]);
    for (auto& s : col_split.subsets) std::sort(s.begin(), s.end());

    const auto curve = bicv(x, parse_int_list(ks), folds, col_split, Seed{global.seed});
    std::ofstream out(outputs.reserve("bicv_curve.csv"));
    write_rank_curve_csv(out, curve);
    if (!out) throw std::runtime_error("failed to write bicv_curve.csv");
    const auto best =
        std::min_element(curve.begin(), curve.end(),
                         [](const auto& a, const auto& b) { return a.loss < b.loss; });
    std::cout << "best_k=" << best->k << '\n';
    return 0;
}

// ----------------------------------------------------------------- metrics

int cmd_metrics(const std::string& a_path, const std::string& b_path, bool rescale) {
    ImageGrid a = read_pgm16(a_path);
    const ImageGrid b = read_pgm16(b_path);
    if (rescale) a = rescale_to_moments(a, b).image;
    std::cout << "mse=" << csv::format_number(mse(a, b)) << '\n';
    std::cout << "psnr=" << csv::format_number(psnr(a, b)) << '\n';
    return 0;
}

// ------------------------------------------------------------- verify-jinv

int cmd_verify_jinv(const GlobalOptions& global, const std::string& in_path,
                    const std::string& param_label, bool no_mask,
                    const PartitionFlags& partition_flags, const StrategyFlags& strategy_flags,
                    int trials, double tol) {
    const ImageGrid x = read_pgm16(in_path);
    const DenoiserParam param = parse_denoiser_param(param_label);
    const Partition partition = build_partition(partition_flags, x);

    JInvarianceReport report;
    if (no_mask) {
        // probe the raw denoiser directly (the donut median passes, the
        // full-center median does not)
        report = verify_j_invariance_raw(make_denoiser(param), partition, x, trials,
                                         Seed{global.seed}, tol);
    } else {
        JInvariantDenoiser f{make_denoiser(param), partition, build_strategy(strategy_flags)};
        report = verify_j_invariance(f, x, trials, Seed{global.seed}, tol);
    }
    std::cout << "max_deviation=" << csv::format_number(report.max_deviation) << '\n';
    std::cout << "pass=" << (report.pass ? 1 : 0) << '\n';
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind denoising toolkit: J-invariant masking, self-supervised "
                 "calibration, and matching theory oracles"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Global random seed")->capture_default_str();
    app.add_option("--out", global.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker thread cap (0 = hardware)")
        ->capture_default_str();
    app.add_flag("--quiet", global.quiet, "Suppress progress messages");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Apply synthetic noise to an image");
    std::string sim_in;
    int scene_seed = 0;
    bool use_scene = false;
    int scene_w = 128, scene_h = 128;
    double scene_texture = 0.07;
    NoiseFlags noise_flags;
    simulate->add_option("--in", sim_in, "Input clean image (PGM)");
    simulate->add_flag("--scene", use_scene, "Generate a synthetic scene instead of reading --in");
    simulate->add_option("--scene-seed", scene_seed, "Scene generator seed")->capture_default_str();
    simulate->add_option("--width", scene_w, "Scene width")->capture_default_str();
    simulate->add_option("--height", scene_h, "Scene height")->capture_default_str();
    simulate->add_option("--texture", scene_texture, "Scene texture amplitude")
        ->capture_default_str();
    simulate->add_option("--spec", noise_flags.spec_file, "Noise spec file");
    simulate->add_option("--gaussian", noise_flags.gaussian, "Gaussian sigma");
    simulate->add_option("--poisson", noise_flags.poisson, "Poisson peak count");
    simulate->add_option("--bernoulli", noise_flags.bernoulli, "Bernoulli p,low,high");
    simulate->add_option("--cauchy", noise_flags.cauchy, "Cauchy scale");
    simulate->add_option("--gain", noise_flags.gain, "Gain field sigma");
    simulate->add_option("--clip", noise_flags.clip, "Clip lo,hi (applied last)");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Sweep hyperparameters by self-supervision");
    std::string cal_in, cal_clean, cal_denoiser = "median";
    std::string cal_radii = "1,2,3,4,5,6";
    std::string cal_thresholds = "0.05,0.08,0.12,0.17,0.25,0.35,0.5";
    std::string cal_cutoffs = "0.05,0.08,0.12,0.17,0.25,0.4";
    int cal_levels = 3, cal_patch = 5, cal_window = 11;
    bool cal_full_center = false, cal_no_mask = false, cal_mix = false, cal_report_g = false;
    double cal_noise_var = 0.0;
    PartitionFlags cal_partition;
    StrategyFlags cal_strategy;
    calibrate->add_option("--in", cal_in, "Noisy input image (PGM)")->required();
    calibrate->add_option("--clean", cal_clean, "Optional clean reference (PGM)");
    calibrate->add_option("--denoiser", cal_denoiser, "median | wavelet | nlm")
        ->capture_default_str();
    calibrate->add_option("--radii", cal_radii, "Median radii")->capture_default_str();
    calibrate->add_flag("--full-center", cal_full_center,
                        "Median includes its center (not J-invariant)");
    calibrate->add_option("--thresholds", cal_thresholds, "Wavelet thresholds")
        ->capture_default_str();
    calibrate->add_option("--levels", cal_levels, "Wavelet levels")->capture_default_str();
    calibrate->add_option("--cutoffs", cal_cutoffs, "NL-means cutoffs")->capture_default_str();
    calibrate->add_option("--patch", cal_patch, "NL-means patch size")->capture_default_str();
    calibrate->add_option("--window", cal_window, "NL-means window size")->capture_default_str();
    calibrate->add_flag("--no-mask", cal_no_mask, "Sweep the raw denoiser without masking");
    calibrate->add_option("--partition", cal_partition.kind, "grid | singletons | random")
        ->capture_default_str();
    calibrate->add_option("--grid-w", cal_partition.grid_w, "Partition cell width")
        ->capture_default_str();
    calibrate->add_option("--grid-h", cal_partition.grid_h, "Partition cell height")
        ->capture_default_str();
    calibrate->add_option("--random-k", cal_partition.random_k, "Random partition subset count")
        ->capture_default_str();
    calibrate->add_option("--partition-seed", cal_partition.partition_seed,
                          "Random partition seed")->capture_default_str();
    calibrate->add_option("--strategy", cal_strategy.kind, "interpolate | random")
        ->capture_default_str();
    calibrate->add_option("--replacement-lo", cal_strategy.lo, "Uniform replacement low")
        ->capture_default_str();
    calibrate->add_option("--replacement-hi", cal_strategy.hi, "Uniform replacement high")
        ->capture_default_str();
    calibrate->add_option("--replacement-seed", cal_strategy.replacement_seed,
                          "Uniform replacement seed")->capture_default_str();
    calibrate->add_flag("--mix", cal_mix, "Also write the optimal mixture with the input");
    calibrate->add_option("--noise-var", cal_noise_var, "Analytic noise variance for --mix");
    calibrate->add_flag("--report-g", cal_report_g,
                        "Report the raw denoiser g instead of the J-invariant f");

    // gp-demo
    auto* gp_demo = app.add_subcommand("gp-demo", "Toroidal Gaussian-process predictor gap");
    int gp_side = 9;
    std::string gp_lengthscales = "1,2,4,8";
    double gp_sigma = 0.5;
    gp_demo->add_option("--side", gp_side, "Grid side (<= 33)")->capture_default_str();
    gp_demo->add_option("--lengthscales", gp_lengthscales, "Comma list")->capture_default_str();
    gp_demo->add_option("--sigma", gp_sigma, "Measurement noise sigma")->capture_default_str();

    // alphabet-demo
    auto* alphabet_demo =
        app.add_subcommand("alphabet-demo", "Alphabet denoiser vs matched Gaussian process");
    std::string ab_sigmas = "0.2,0.4,0.8,1.6";
    int ab_trials = 200, ab_letters = 30, ab_side = 16, ab_coarse = 4;
    alphabet_demo->add_option("--sigmas", ab_sigmas, "Comma list")->capture_default_str();
    alphabet_demo->add_option("--trials", ab_trials, "Monte-Carlo trials per sigma")
        ->capture_default_str();
    alphabet_demo->add_option("--letters", ab_letters, "Glyph count")->capture_default_str();
    alphabet_demo->add_option("--glyph-side", ab_side, "Glyph side")->capture_default_str();
    alphabet_demo->add_option("--glyph-coarse", ab_coarse, "Glyph block grid")
        ->capture_default_str();

    // counts
    auto* counts = app.add_subcommand("counts", "Count-matrix workflows");
    counts->require_subcommand(1);
    auto* counts_split = counts->add_subcommand("split", "Binomial molecule split");
    std::string counts_in;
    double split_p = 0.5;
    counts_split->add_option("--in", counts_in, "Counts CSV")->required();
    counts_split->add_option("--p", split_p, "Thinning probability")->capture_default_str();

    auto* counts_norm = counts->add_subcommand("normalize", "Depth-normalize counts");
    std::string norm_in, norm_rho = "sqrt";
    double norm_n0 = 0.0;
    counts_norm->add_option("--in", norm_in, "Counts CSV")->required();
    counts_norm->add_option("--n0", norm_n0, "Reference total (default: median row sum)");
    counts_norm->add_option("--rho", norm_rho, "sqrt | log1p")->capture_default_str();

    auto* counts_rank = counts->add_subcommand("rank-curve", "Self-supervised rank selection");
    std::string rank_in, rank_in1, rank_in2, rank_rho = "sqrt";
    std::string rank_ks = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30";
    double rank_p = 0.5;
    counts_rank->add_option("--in", rank_in, "Counts CSV (split internally)");
    counts_rank->add_option("--in1", rank_in1, "Pre-normalized half 1 (CSV)");
    counts_rank->add_option("--in2", rank_in2, "Pre-normalized half 2 (CSV)");
    counts_rank->add_option("--p", rank_p, "Thinning probability")->capture_default_str();
    counts_rank->add_option("--rho", rank_rho, "sqrt | log1p")->capture_default_str();
    counts_rank->add_option("--ks", rank_ks, "Ranks to sweep");

    auto* counts_bicv = counts->add_subcommand("bicv", "Owen-Perry bi-cross-validation");
    std::string bicv_in, bicv_ks = "1,2,3,4,5,6,7,8,9,10";
    int bicv_folds = 2;
    counts_bicv->add_option("--in", bicv_in, "Data matrix CSV")->required();
    counts_bicv->add_option("--ks", bicv_ks, "Ranks to sweep")->capture_default_str();
    counts_bicv->add_option("--folds", bicv_folds, "Row folds")->capture_default_str();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "MSE and PSNR between two images");
    std::string met_a, met_b;
    bool met_rescale = false;
    metrics->add_option("--a", met_a, "Image (PGM)")->required();
    metrics->add_option("--b", met_b, "Reference image (PGM)")->required();
    metrics->add_flag("--rescale", met_rescale, "Match moments of --a to --b first");

    // verify-jinv
    auto* verify = app.add_subcommand("verify-jinv", "Empirical J-invariance check");
    std::string ver_in, ver_param = "median r=3 donut";
    bool ver_no_mask = false;
    int ver_trials = 100;
    double ver_tol = 0.0;
    PartitionFlags ver_partition;
    ver_partition.kind = "singletons";
    StrategyFlags ver_strategy;
    verify->add_option("--in", ver_in, "Input image (PGM)")->required();
    verify->add_option("--param", ver_param, "Denoiser parameter label")->capture_default_str();
    verify->add_flag("--no-mask", ver_no_mask, "Probe the raw denoiser without masking");
    verify->add_option("--partition", ver_partition.kind, "grid | singletons | random")
        ->capture_default_str();
    verify->add_option("--grid-w", ver_partition.grid_w, "Partition cell width")
        ->capture_default_str();
    verify->add_option("--grid-h", ver_partition.grid_h, "Partition cell height")
        ->capture_default_str();
    verify->add_option("--random-k", ver_partition.random_k, "Random partition subsets")
        ->capture_default_str();
    verify->add_option("--partition-seed", ver_partition.partition_seed, "Random partition seed")
        ->capture_default_str();
    verify->add_option("--strategy", ver_strategy.kind, "interpolate | random")
        ->capture_default_str();
    verify->add_option("--replacement-seed", ver_strategy.replacement_seed, "Replacement seed")
        ->capture_default_str();
    verify->add_option("--trials", ver_trials, "Perturbation trials")->capture_default_str();
    verify->add_option("--tol", ver_tol, "Pass tolerance")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    set_max_threads(global.threads);

    try {
        if (simulate->parsed())
            return cmd_simulate(global, sim_in, scene_seed, use_scene, scene_w, scene_h,
                                scene_texture, noise_flags);
        if (calibrate->parsed())
            return cmd_calibrate(global, cal_in, cal_clean, cal_denoiser, cal_radii,
                                 cal_thresholds, cal_levels, cal_cutoffs, cal_patch, cal_window,
                                 cal_full_center, cal_no_mask, cal_partition, cal_strategy,
                                 cal_mix, cal_noise_var, cal_report_g);
        if (gp_demo->parsed()) return cmd_gp_demo(global, gp_side, gp_lengthscales, gp_sigma);
        if (alphabet_demo->parsed())
            return cmd_alphabet_demo(global, ab_sigmas, ab_trials, ab_letters, ab_side, ab_coarse);
        if (counts->parsed()) {
            if (counts_split->parsed()) return cmd_counts_split(global, counts_in, split_p);
            if (counts_norm->parsed())
                return cmd_counts_normalize(global, norm_in, norm_n0, norm_rho);
            if (counts_rank->parsed())
                return cmd_counts_rank_curve(global, rank_in, rank_in1, rank_in2, rank_p,
                                             rank_rho, rank_ks);
            if (counts_bicv->parsed()) return cmd_counts_bicv(global, bicv_in, bicv_ks, bicv_folds);
        }
        if (metrics->parsed()) return cmd_metrics(met_a, met_b, met_rescale);
        if (verify->parsed())
            return cmd_verify_jinv(global, ver_in, ver_param, ver_no_mask, ver_partition,
                                   ver_strategy, ver_trials, ver_tol);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
