#include "jinv/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "jinv/csv.hpp"
#include "jinv/errors.hpp"

namespace jinv {

namespace {

Eigen::MatrixXd to_eigen(const RealMatrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out(r, c) = m.at(r, c);
    return out;
}

void validate_gp(const TorusGP& gp) {
    if (gp.side < 2) throw std::invalid_argument("TorusGP: side must be >= 2");
    if (!(gp.lengthscale > 0.0)) throw std::invalid_argument("TorusGP: lengthscale must be > 0");
    if (!(gp.noise_sigma >= 0.0)) throw std::invalid_argument("TorusGP: noise_sigma must be >= 0");
}

// 1-D periodized squared-exponential profile on Z_side, unit at d=0.
std::vector<double> axis_profile(int side, double ell) {
    const int wraps = std::min(4096, std::max(1, static_cast<int>(std::ceil(9.2 * ell / side))));
    std::vector<double> profile(side, 0.0);
    for (int d = 0; d < side; ++d) {
        double sum = 0.0;
        for (int w = -wraps; w <= wraps; ++w) {
            const double dist = d + static_cast<double>(w) * side;
            sum += std::exp(-dist * dist / (2.0 * ell * ell));
        }
        profile[d] = sum;
    }
    const double norm = 1.0 / profile[0];
    for (double& v : profile) v *= norm;
    return profile;
}

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(Eigen::MatrixXd a, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    double jitter = 1e-12;
    while (llt.info() != Eigen::Success && jitter <= 1e-6) {
        llt.compute(a + jitter * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
        jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": factorization failed after maximum jitter");
    return llt;
}

// Var(y_j | x_{-j}) by direct deletion of row/column j.
double jinv_variance_at(const Eigen::MatrixXd& kernel, double sigma, int j) {
    const int m = static_cast<int>(kernel.rows());
    Eigen::MatrixXd sub(m - 1, m - 1);
    Eigen::VectorXd cross(m - 1);
    for (int r = 0, rr = 0; r < m; ++r) {
        if (r == j) continue;
        cross(rr) = kernel(r, j);
        for (int c = 0, cc = 0; c < m; ++c) {
            if (c == j) continue;
            sub(rr, cc) = kernel(r, c);
            ++cc;
        }
        ++rr;
    }
    sub.diagonal().array() += sigma * sigma;
    const auto llt = cholesky_with_jitter(std::move(sub), "gp_jinv_predictor_mse");
    return kernel(j, j) - cross.dot(llt.solve(cross));
}

} // namespace

RealMatrix gp_kernel(const TorusGP& gp) {
    validate_gp(gp);
    const auto profile = axis_profile(gp.side, gp.lengthscale);
    const int side = gp.side;
    const int m = side * side;
    RealMatrix k(m, m);
    for (int p = 0; p < m; ++p) {
        const int pr = p / side, pc = p % side;
        for (int q = p; q < m; ++q) {
            const int qr = q / side, qc = q % side;
            const double v = profile[std::abs(pr - qr) % side] * profile[std::abs(pc - qc) % side];
            k.at(p, q) = v;
            k.at(q, p) = v;
        }
    }
    return k;
}

std::pair<ImageGrid, ImageGrid> gp_sample(const TorusGP& gp, Seed seed) {
    validate_gp(gp);
    const Eigen::MatrixXd k = to_eigen(gp_kernel(gp));
    const auto llt = cholesky_with_jitter(k, "gp_sample");
    const int m = gp.side * gp.side;

    Eigen::VectorXd z(m);
    for (int j = 0; j < m; ++j) {
        CounterRng rng(seed.value, 0x67705f79ULL, static_cast<std::uint64_t>(j));
        z(j) = rng.next_gaussian();
    }
    const Eigen::VectorXd y = llt.matrixL() * z;

    ImageGrid clean(gp.side, gp.side), noisy(gp.side, gp.side);
    for (int j = 0; j < m; ++j) {
        clean.values[j] = y(j);
        CounterRng rng(seed.value, 0x67705f78ULL, static_cast<std::uint64_t>(j));
        noisy.values[j] = y(j) + gp.noise_sigma * rng.next_gaussian();
    }
    return {std::move(clean), std::move(noisy)};
}

double gp_full_predictor_mse(const TorusGP& gp) {
    validate_gp(gp);
    if (!(gp.noise_sigma > 0.0))
        throw std::invalid_argument("gp_full_predictor_mse: noise_sigma must be > 0");
    const Eigen::MatrixXd k = to_eigen(gp_kernel(gp));
    const int m = static_cast<int>(k.rows());
    Eigen::MatrixXd a = k;
    a.diagonal().array() += gp.noise_sigma * gp.noise_sigma;
    const auto llt = cholesky_with_jitter(std::move(a), "gp_full_predictor_mse");
    const Eigen::MatrixXd solved = llt.solve(k);
    return (k - k * solved).trace() / static_cast<double>(m);
}

double gp_jinv_predictor_mse(const TorusGP& gp) {
    validate_gp(gp);
    if (!(gp.noise_sigma > 0.0))
        throw std::invalid_argument("gp_jinv_predictor_mse: noise_sigma must be > 0");
    const Eigen::MatrixXd k = to_eigen(gp_kernel(gp));
    const int m = static_cast<int>(k.rows());

    // Torus symmetry makes Var(y_j | x_{-j}) identical for every j; compute a
    // representative pixel and guard the assumption on five random others.
    const double reference = jinv_variance_at(k, gp.noise_sigma, 0);
    double total = reference;
    int checked = 1;
    CounterRng rng(0x6a696e76ULL, static_cast<std::uint64_t>(gp.side),
                   static_cast<std::uint64_t>(std::min(gp.lengthscale, 1e6) * 4096.0));
    for (int i = 0; i < 5 && checked < m; ++i) {
        const int j = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m - 1)));
        const double v = jinv_variance_at(k, gp.noise_sigma, j);
        if (std::fabs(v - reference) > 1e-6 * std::max(1.0, std::fabs(reference)))
            throw NumericError("gp_jinv_predictor_mse: torus symmetry check failed");
        total += v;
        ++checked;
    }
    return total / checked;
}

std::vector<double> alphabet_denoise(std::span<const double> x, const Alphabet& alphabet,
                                     std::span<const std::uint32_t> j_subset) {
    const int letters = alphabet.letters.rows;
    const int m = alphabet.letters.cols;
    if (letters < 1) throw std::invalid_argument("alphabet_denoise: need at least one letter");
    if (static_cast<int>(x.size()) != m)
        throw std::invalid_argument("alphabet_denoise: input length does not match letters");
    if (!(alphabet.noise_sigma > 0.0))
        throw std::invalid_argument("alphabet_denoise: noise_sigma must be > 0");

    std::vector<char> masked(m, 0);
    for (std::uint32_t j : j_subset) {
        if (j >= static_cast<std::uint32_t>(m))
            throw std::invalid_argument("alphabet_denoise: subset index out of range");
        masked[j] = 1;
    }

    const double inv_two_sigma2 = 1.0 / (2.0 * alphabet.noise_sigma * alphabet.noise_sigma);
    std::vector<double> log_weight(letters);
    for (int i = 0; i < letters; ++i) {
        double dist2 = 0.0;
        for (int j = 0; j < m; ++j) {
            if (masked[j]) continue;
            const double d = alphabet.letters.at(i, j) - x[j];
            dist2 += d * d;
        }
        log_weight[i] = -dist2 * inv_two_sigma2;
    }
    const double peak = *std::max_element(log_weight.begin(), log_weight.end());

    std::vector<double> out(m, 0.0);
    double weight_sum = 0.0;
    for (int i = 0; i < letters; ++i) {
        const double w = std::exp(log_weight[i] - peak);
        weight_sum += w;
        for (int j = 0; j < m; ++j) out[j] += w * alphabet.letters.at(i, j);
    }
    for (double& v : out) v /= weight_sum;
    return out;
}

namespace {

// Mean over j of Var(y_j | x_{-j}) for y ~ N(mu, C), x = y + N(0, s^2 I),
// through the leave-one-out identity Var(x_j | x_{-j}) = 1 / [(C+s^2 I)^{-1}]_jj.
double gaussian_jinv_mse(const Eigen::MatrixXd& cov, double sigma) {
    const int m = static_cast<int>(cov.rows());
    Eigen::MatrixXd a = cov;
    a.diagonal().array() += sigma * sigma;
    const auto llt = cholesky_with_jitter(std::move(a), "gaussian_jinv_mse");
    const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(m, m));
    double total = 0.0;
    for (int j = 0; j < m; ++j) total += 1.0 / inverse(j, j) - sigma * sigma;
    return total / m;
}

} // namespace

std::vector<AlphabetCurvePoint> alphabet_vs_gp_mse(const Alphabet& alphabet,
                                                   std::span<const double> sigmas, Seed seed,
                                                   int trials) {
    if (trials < 1) throw std::invalid_argument("alphabet_vs_gp_mse: trials must be >= 1");
    const int letters = alphabet.letters.rows;
    const int m = alphabet.letters.cols;
    if (letters < 1) throw std::invalid_argument("alphabet_vs_gp_mse: empty alphabet");

    // covariance of the letters about their mean, uniform letter distribution
    const Eigen::MatrixXd a = to_eigen(alphabet.letters);
    const Eigen::RowVectorXd mean = a.colwise().mean();
    const Eigen::MatrixXd centered = a.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(letters);

    std::vector<AlphabetCurvePoint> curve;
    curve.reserve(sigmas.size());
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        if (!(sigma > 0.0)) throw std::invalid_argument("alphabet_vs_gp_mse: sigma must be > 0");
        const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

        double sum = 0.0, sum_sq = 0.0;
        std::vector<double> x(m), dist2_full(letters);
        std::vector<std::vector<double>> sq(letters, std::vector<double>(m));
        for (int t = 0; t < trials; ++t) {
            CounterRng rng(seed.value, 0x616c7068ULL + si, static_cast<std::uint64_t>(t));
            const int pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(letters)));
            for (int j = 0; j < m; ++j)
                x[j] = alphabet.letters.at(pick, j) + sigma * rng.next_gaussian();

            for (int i = 0; i < letters; ++i) {
                double total = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double d = alphabet.letters.at(i, j) - x[j];
                    sq[i][j] = d * d;
                    total += sq[i][j];
                }
                dist2_full[i] = total;
            }
            // singleton J-invariant prediction at every coordinate: weights
            // use the full distance minus the held-out coordinate's term
            double trial_err = 0.0;
            for (int j = 0; j < m; ++j) {
                double peak = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < letters; ++i)
                    peak = std::max(peak, -(dist2_full[i] - sq[i][j]) * inv_two_sigma2);
                double num = 0.0, den = 0.0;
                for (int i = 0; i < letters; ++i) {
                    const double w =
                        std::exp(-(dist2_full[i] - sq[i][j]) * inv_two_sigma2 - peak);
                    num += w * alphabet.letters.at(i, j);
                    den += w;
                }
                const double err = num / den - alphabet.letters.at(pick, j);
                trial_err += err * err;
            }
            trial_err /= m;
            sum += trial_err;
            sum_sq += trial_err * trial_err;
        }
        AlphabetCurvePoint point;
        point.sigma = sigma;
        point.alphabet_mse = sum / trials;
        if (trials > 1) {
            const double var =
                (sum_sq - sum * sum / trials) / (static_cast<double>(trials) - 1.0);
            point.alphabet_se = std::sqrt(std::max(var, 0.0) / trials);
        }
        point.gp_mse = gaussian_jinv_mse(cov, sigma);
        curve.push_back(point);
    }
    return curve;
}

bool check_psd_block_lemma(const CovariancePair& cov) {
    const Eigen::MatrixXd s11 = to_eigen(cov.sigma_xx);
    const Eigen::MatrixXd s22 = to_eigen(cov.sigma_yy);
    const Eigen::MatrixXd s12 = to_eigen(cov.sigma_xy);
    if (s11.rows() != s11.cols() || s22.rows() != s22.cols())
        throw std::invalid_argument("check_psd_block_lemma: diagonal blocks must be square");
    if (s12.rows() != s11.rows() || s12.cols() != s22.cols())
        throw std::invalid_argument("check_psd_block_lemma: off-diagonal block shape mismatch");
    const double scale = std::max({s11.cwiseAbs().maxCoeff(), s22.cwiseAbs().maxCoeff(),
                                   s12.cwiseAbs().maxCoeff(), 1e-300});
    if ((s11 - s11.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale ||
        (s22 - s22.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("check_psd_block_lemma: blocks are not symmetric");

    const auto llt = cholesky_with_jitter(s22, "check_psd_block_lemma");
    const Eigen::MatrixXd schur = s11 - s12 * llt.solve(s12.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(
        0.5 * (schur + schur.transpose()));
    if (eigensolver.info() != Eigen::Success)
        throw NumericError("check_psd_block_lemma: eigen decomposition failed");
    const double joint_norm =
        std::max({s11.cwiseAbs().maxCoeff(), s22.cwiseAbs().maxCoeff(), s12.cwiseAbs().maxCoeff()});
    return eigensolver.eigenvalues().minCoeff() >= -1e-9 * std::max(joint_norm, 1.0);
}

RealMatrix make_glyph_alphabet(Seed seed, int count, int side, int coarse) {
    if (count < 1 || side < 2 || coarse < 1 || side % coarse != 0)
        throw std::invalid_argument("make_glyph_alphabet: side must be a positive multiple of coarse");
    const int scale = side / coarse;
    const int cells = coarse * coarse;

    CounterRng rng(seed.value, 0x676c797068ULL, 0);
    std::vector<std::vector<char>> patterns;
    RealMatrix letters(count, side * side, 0.0);
    int made = 0;
    while (made < count) {
        std::vector<char> pattern(cells);
        for (int i = 0; i < cells; ++i) pattern[i] = rng.next_unit() < 0.45 ? 1 : 0;
        bool distinct = true;
        for (const auto& previous : patterns) {
            int hamming = 0;
            for (int i = 0; i < cells; ++i) hamming += (pattern[i] != previous[i]);
            if (hamming < 3) {
                distinct = false;
                break;
            }
        }
        if (!distinct) continue;
        patterns.push_back(pattern);
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c)
                letters.at(made, r * side + c) =
                    static_cast<double>(pattern[(r / scale) * coarse + (c / scale)]);
        ++made;
    }
    return letters;
}

void write_gp_curve_csv(std::ostream& out, std::span<const GpCurvePoint> curve) {
    out << "lengthscale,jinv_mse,full_mse\n";
    for (const auto& p : curve)
        out << csv::format_number(p.lengthscale) << ',' << csv::format_number(p.jinv_mse) << ','
            << csv::format_number(p.full_mse) << '\n';
}

std::vector<GpCurvePoint> read_gp_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        csv::split_line(line) != std::vector<std::string>{"lengthscale", "jinv_mse", "full_mse"})
        throw std::invalid_argument("read_gp_curve_csv: bad header");
    std::vector<GpCurvePoint> curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != 3) throw std::invalid_argument("read_gp_curve_csv: bad row");
        curve.push_back({csv::parse_number(fields[0]), csv::parse_number(fields[1]),
                         csv::parse_number(fields[2])});
    }
    return curve;
}

void write_alphabet_curve_csv(std::ostream& out, std::span<const AlphabetCurvePoint> curve) {
    out << "sigma,alphabet_mse,gp_mse\n";
    for (const auto& p : curve)
        out << csv::format_number(p.sigma) << ',' << csv::format_number(p.alphabet_mse) << ','
            << csv::format_number(p.gp_mse) << '\n';
}

std::vector<AlphabetCurvePoint> read_alphabet_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        csv::split_line(line) != std::vector<std::string>{"sigma", "alphabet_mse", "gp_mse"})
        throw std::invalid_argument("read_alphabet_curve_csv: bad header");
    std::vector<AlphabetCurvePoint> curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != 3) throw std::invalid_argument("read_alphabet_curve_csv: bad row");
        AlphabetCurvePoint p;
        p.sigma = csv::parse_number(fields[0]);
        p.alphabet_mse = csv::parse_number(fields[1]);
        p.gp_mse = csv::parse_number(fields[2]);
        curve.push_back(p);
    }
    return curve;
}

} // namespace jinv
