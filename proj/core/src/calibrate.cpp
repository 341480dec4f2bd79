#include "jinv/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jinv/csv.hpp"
#include "jinv/errors.hpp"

namespace jinv {

double mse(const ImageGrid& a, const ImageGrid& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a.values[j] - b.values[j];
        total += d * d;
    }
    return total / static_cast<double>(a.size());
}

double psnr(const ImageGrid& a, const ImageGrid& ref) {
    const double err = mse(a, ref);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / err);
}

namespace {

std::pair<double, double> mean_var(const ImageGrid& img) {
    double mean = 0.0;
    for (double v : img.values) mean += v;
    mean /= static_cast<double>(img.size());
    double var = 0.0;
    for (double v : img.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(img.size());
    return {mean, var};
}

} // namespace

RescaleResult rescale_to_moments(const ImageGrid& out, const ImageGrid& ref) {
    if (!out.same_shape(ref)) throw std::invalid_argument("rescale_to_moments: shape mismatch");
    const auto [ref_mean, ref_var] = mean_var(ref);
    if (ref_var == 0.0)
        throw std::invalid_argument("rescale_to_moments: reference has zero variance");
    const auto [out_mean, out_var] = mean_var(out);

    RescaleResult result;
    if (out_var == 0.0) {
        result.image = ImageGrid(out.width, out.height, ref_mean);
        result.degenerate = true;
        return result;
    }
    const double a = std::sqrt(ref_var / out_var);
    const double b = ref_mean - a * out_mean;
    result.image = out;
    for (double& v : result.image.values) v = a * v + b;
    return result;
}

double self_supervised_loss(const JInvariantDenoiser& f, const ImageGrid& x) {
    return mse(evaluate_j_invariant(f, x), x);
}

DecompositionReport check_loss_decomposition(const JInvariantDenoiser& f, const ImageGrid& y,
                                             const NoiseSpec& spec,
                                             std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw std::invalid_argument("check_loss_decomposition: need at least one seed");
    if (!is_conditionally_unbiased(spec, y))
        throw UnsupportedSpecError(
            "check_loss_decomposition: spec is not conditionally unbiased for this image");

    DecompositionReport report;
    report.seeds = static_cast<int>(seeds.size());
    std::vector<double> diffs;
    diffs.reserve(seeds.size());
    for (std::uint64_t s : seeds) {
        const ImageGrid x = apply_noise(y, spec, Seed{s});
        const ImageGrid fx = evaluate_j_invariant(f, x);
        const double lhs = mse(fx, x);
        const double rhs = mse(fx, y) + mse(x, y);
        report.self_supervised += lhs;
        report.supervised_plus_noise += rhs;
        diffs.push_back(lhs - rhs);
    }
    const double n = static_cast<double>(seeds.size());
    report.self_supervised /= n;
    report.supervised_plus_noise /= n;
    report.gap = std::fabs(report.self_supervised - report.supervised_plus_noise);
    if (seeds.size() > 1) {
        const double mean_diff = (report.self_supervised - report.supervised_plus_noise);
        double ss = 0.0;
        for (double d : diffs) ss += (d - mean_diff) * (d - mean_diff);
        report.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return report;
}

namespace {

void check_params_distinct(std::span<const DenoiserParam> params) {
    if (params.empty()) throw std::invalid_argument("sweep: parameter list is empty");
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = i + 1; j < params.size(); ++j)
            if (!param_less(params[i], params[j]) && !param_less(params[j], params[i]))
                throw std::invalid_argument("sweep: duplicate parameter " +
                                            format_denoiser_param(params[i]));
}

CurveEntry make_entry(const DenoiserParam& param, const ImageGrid& output, const ImageGrid& x,
                      const ImageGrid* clean) {
    CurveEntry entry;
    entry.param = param;
    entry.ss_loss = mse(output, x);
    if (clean != nullptr) {
        entry.gt_loss = mse(output, *clean);
        entry.psnr_db = psnr(output, *clean);
    }
    return entry;
}

} // namespace

CalibrationCurve sweep(std::span<const DenoiserParam> params, const ImageGrid& x,
                       const Partition& partition, const ReplacementStrategy& strategy,
                       const ImageGrid* clean) {
    check_params_distinct(params);
    CalibrationCurve curve;
    curve.entries.reserve(params.size());
    for (const auto& param : params) {
        JInvariantDenoiser f{make_denoiser(param), partition, strategy};
        curve.entries.push_back(make_entry(param, evaluate_j_invariant(f, x), x, clean));
    }
    return curve;
}

CalibrationCurve sweep_plain(std::span<const DenoiserParam> params, const ImageGrid& x,
                             const ImageGrid* clean) {
    check_params_distinct(params);
    CalibrationCurve curve;
    curve.entries.reserve(params.size());
    for (const auto& param : params)
        curve.entries.push_back(make_entry(param, denoise(x, param), x, clean));
    return curve;
}

DenoiserParam select_best(const CalibrationCurve& curve) {
    if (curve.entries.empty()) throw std::invalid_argument("select_best: empty curve");
    const CurveEntry* best = &curve.entries.front();
    for (const auto& entry : curve.entries) {
        if (entry.ss_loss < best->ss_loss ||
            (entry.ss_loss == best->ss_loss && param_less(entry.param, best->param))) {
            best = &entry;
        }
    }
    return best->param;
}

MixingResult optimal_mixing(const ImageGrid& fx, const ImageGrid& x, double noise_var,
                            double ss_loss) {
    if (!fx.same_shape(x)) throw std::invalid_argument("optimal_mixing: shape mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("optimal_mixing: noise_var must be > 0");
    if (noise_var > ss_loss)
        throw std::invalid_argument(
            "optimal_mixing: noise_var exceeds the self-supervised loss (negative estimator variance)");

    MixingResult result;
    result.lambda = noise_var / ss_loss;
    const double u = noise_var;
    const double v = ss_loss - noise_var;
    result.predicted_psnr_gain_db = 10.0 * std::log10(1.0 + v / u);
    result.mixed = ImageGrid(x.width, x.height);
    for (std::size_t j = 0; j < x.size(); ++j)
        result.mixed.values[j] =
            result.lambda * fx.values[j] + (1.0 - result.lambda) * x.values[j];
    return result;
}

void write_curve_csv(std::ostream& out, const CalibrationCurve& curve) {
    out << "param,ss_loss,gt_loss,psnr\n";
    for (const auto& entry : curve.entries) {
        out << format_denoiser_param(entry.param) << ',' << csv::format_number(entry.ss_loss) << ',';
        if (entry.gt_loss) out << csv::format_number(*entry.gt_loss);
        out << ',';
        if (entry.psnr_db) out << csv::format_number(*entry.psnr_db);
        out << '\n';
    }
}

CalibrationCurve read_curve_csv(std::istream& in) {
    CalibrationCurve curve;
    std::string line;
    if (!std::getline(in, line) || csv::split_line(line) !=
        std::vector<std::string>{"param", "ss_loss", "gt_loss", "psnr"})
        throw std::invalid_argument("read_curve_csv: bad or missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != 4)
            throw std::invalid_argument("read_curve_csv: expected 4 fields, got line '" + line + "'");
        CurveEntry entry;
        entry.param = parse_denoiser_param(fields[0]);
        entry.ss_loss = csv::parse_number(fields[1]);
        if (!fields[2].empty()) entry.gt_loss = csv::parse_number(fields[2]);
        if (!fields[3].empty()) entry.psnr_db = csv::parse_number(fields[3]);
        curve.entries.push_back(std::move(entry));
    }
    return curve;
}

} // namespace jinv
