#include "jinv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "jinv/errors.hpp"
#include "jinv/parallel.hpp"

namespace jinv {

namespace {

struct TermValidator {
    void operator()(const GaussianNoise& t) const {
        if (!(t.sigma >= 0.0)) throw std::invalid_argument("gaussian: sigma must be >= 0");
    }
    void operator()(const PoissonNoise& t) const {
        if (!(t.peak > 0.0)) throw std::invalid_argument("poisson: peak must be > 0");
    }
    void operator()(const BernoulliNoise& t) const {
        if (!(t.p >= 0.0 && t.p <= 1.0)) throw std::invalid_argument("bernoulli: p must be in [0,1]");
        if (!std::isfinite(t.low) || !std::isfinite(t.high))
            throw std::invalid_argument("bernoulli: levels must be finite");
    }
    void operator()(const CauchyNoise& t) const {
        if (!(t.scale >= 0.0)) throw std::invalid_argument("cauchy: scale must be >= 0");
    }
    void operator()(const GainFieldNoise& t) const {
        if (!(t.sigma >= 0.0)) throw std::invalid_argument("gain: sigma must be >= 0");
    }
};

} // namespace

void NoiseSpec::validate() const {
    for (const auto& term : terms) std::visit(TermValidator{}, term);
    if (clip && !(clip->lo < clip->hi))
        throw std::invalid_argument("clip: need lo < hi");
}

ImageGrid apply_noise(const ImageGrid& y, const NoiseSpec& spec, Seed seed) {
    spec.validate();
    if (!y.finite()) throw std::invalid_argument("apply_noise: input has non-finite values");

    ImageGrid x = y;
    const std::size_t m = x.size();
    for (std::size_t stage = 0; stage < spec.terms.size(); ++stage) {
        const NoiseTerm& term = spec.terms[stage];
        // each stage gets its own stream so composites never reuse draws
        const std::uint64_t stream = 0x6e6f697365ULL + stage;
        parallel_for(0, m, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t j = lo; j < hi; ++j) {
                CounterRng rng(seed.value, stream, j);
                double v = x.values[j];
                if (const auto* g = std::get_if<GaussianNoise>(&term)) {
                    v += g->sigma * rng.next_gaussian();
                } else if (const auto* p = std::get_if<PoissonNoise>(&term)) {
                    const double rate = std::max(v, 0.0) * p->peak;
                    v = static_cast<double>(sample_poisson(rng, rate)) / p->peak;
                } else if (const auto* b = std::get_if<BernoulliNoise>(&term)) {
                    const double u = rng.next_unit();
                    if (u < b->p * 0.5) v = b->low;
                    else if (u < b->p) v = b->high;
                } else if (const auto* c = std::get_if<CauchyNoise>(&term)) {
                    v += c->scale * rng.next_cauchy();
                } else if (const auto* gf = std::get_if<GainFieldNoise>(&term)) {
                    v *= 1.0 + gf->sigma * rng.next_gaussian();
                }
                x.values[j] = v;
            }
        });
    }
    if (spec.clip) {
        for (double& v : x.values) v = std::clamp(v, spec.clip->lo, spec.clip->hi);
    }
    return x;
}

double noise_variance(const NoiseSpec& spec, const ImageGrid& y) {
    spec.validate();
    for (const auto& term : spec.terms) {
        if (std::holds_alternative<CauchyNoise>(term))
            throw UnsupportedSpecError("noise_variance: Cauchy noise has undefined variance");
    }
    if (spec.clip)
        throw UnsupportedSpecError("noise_variance: clipping breaks the analytic composition");

    // Propagate per-pixel (mean, variance) of x conditional on y through the
    // stages, then report the mean of E[(x_j - y_j)^2].
    double total = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        double mean = y.values[j];
        double var = 0.0;
        for (const auto& term : spec.terms) {
            if (const auto* g = std::get_if<GaussianNoise>(&term)) {
                var += g->sigma * g->sigma;
            } else if (const auto* p = std::get_if<PoissonNoise>(&term)) {
                if (mean < 0.0)
                    throw std::invalid_argument("noise_variance: negative intensity under Poisson");
                var += mean / p->peak;
            } else if (const auto* b = std::get_if<BernoulliNoise>(&term)) {
                const double second = var + mean * mean;
                const double mid = 0.5 * (b->low + b->high);
                const double level_second = 0.5 * (b->low * b->low + b->high * b->high);
                const double new_mean = (1.0 - b->p) * mean + b->p * mid;
                const double new_second = (1.0 - b->p) * second + b->p * level_second;
                mean = new_mean;
                var = new_second - new_mean * new_mean;
            } else if (const auto* gf = std::get_if<GainFieldNoise>(&term)) {
                const double second = var + mean * mean;
                var = (1.0 + gf->sigma * gf->sigma) * second - mean * mean;
            }
        }
        const double bias = mean - y.values[j];
        total += var + bias * bias;
    }
    return total / static_cast<double>(y.size());
}

bool is_conditionally_unbiased(const NoiseSpec& spec, const ImageGrid& y) {
    if (spec.clip) return false;
    for (const auto& term : spec.terms) {
        if (std::holds_alternative<CauchyNoise>(term)) return false;
        if (const auto* b = std::get_if<BernoulliNoise>(&term)) {
            const double mid = 0.5 * (b->low + b->high);
            for (double v : y.values)
                if (std::fabs(v - mid) > 1e-12) return false;
        }
    }
    return true;
}

namespace {

std::string format_value(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct TermFormatter {
    std::ostringstream& out;
    void operator()(const GaussianNoise& t) const { out << "gaussian sigma=" << format_value(t.sigma); }
    void operator()(const PoissonNoise& t) const { out << "poisson peak=" << format_value(t.peak); }
    void operator()(const BernoulliNoise& t) const {
        out << "bernoulli p=" << format_value(t.p) << " low=" << format_value(t.low)
            << " high=" << format_value(t.high);
    }
    void operator()(const CauchyNoise& t) const { out << "cauchy scale=" << format_value(t.scale); }
    void operator()(const GainFieldNoise& t) const { out << "gain sigma=" << format_value(t.sigma); }
};

double parse_kv(const std::string& token, const std::string& key, int line_no) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || token.substr(0, eq) != key)
        throw std::invalid_argument("noise spec line " + std::to_string(line_no) +
                                    ": expected " + key + "=<value>, got '" + token + "'");
    try {
        return std::stod(token.substr(eq + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("noise spec line " + std::to_string(line_no) +
                                    ": bad number in '" + token + "'");
    }
}

} // namespace

std::string format_noise_spec(const NoiseSpec& spec) {
    std::ostringstream out;
    for (const auto& term : spec.terms) {
        std::visit(TermFormatter{out}, term);
        out << '\n';
    }
    if (spec.clip)
        out << "clip lo=" << format_value(spec.clip->lo) << " hi=" << format_value(spec.clip->hi)
            << '\n';
    return out.str();
}

NoiseSpec parse_noise_spec(const std::string& text) {
    NoiseSpec spec;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string kind;
        if (!(tokens >> kind)) continue;
        std::vector<std::string> args;
        for (std::string t; tokens >> t;) args.push_back(t);

        auto expect_args = [&](std::size_t n) {
            if (args.size() != n)
                throw std::invalid_argument("noise spec line " + std::to_string(line_no) +
                                            ": wrong argument count for '" + kind + "'");
        };
        if (kind == "gaussian") {
            expect_args(1);
            spec.terms.push_back(GaussianNoise{parse_kv(args[0], "sigma", line_no)});
        } else if (kind == "poisson") {
            expect_args(1);
            spec.terms.push_back(PoissonNoise{parse_kv(args[0], "peak", line_no)});
        } else if (kind == "bernoulli") {
            expect_args(3);
            spec.terms.push_back(BernoulliNoise{parse_kv(args[0], "p", line_no),
                                                parse_kv(args[1], "low", line_no),
                                                parse_kv(args[2], "high", line_no)});
        } else if (kind == "cauchy") {
            expect_args(1);
            spec.terms.push_back(CauchyNoise{parse_kv(args[0], "scale", line_no)});
        } else if (kind == "gain") {
            expect_args(1);
            spec.terms.push_back(GainFieldNoise{parse_kv(args[0], "sigma", line_no)});
        } else if (kind == "clip") {
            expect_args(2);
            if (spec.clip)
                throw std::invalid_argument("noise spec line " + std::to_string(line_no) +
                                            ": duplicate clip");
            spec.clip = ClipRange{parse_kv(args[0], "lo", line_no), parse_kv(args[1], "hi", line_no)};
        } else {
            throw std::invalid_argument("noise spec line " + std::to_string(line_no) +
                                        ": unknown term '" + kind + "'");
        }
    }
    spec.validate();
    return spec;
}

} // namespace jinv
