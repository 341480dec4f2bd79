#include "jinv/counts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "jinv/csv.hpp"
#include "jinv/errors.hpp"

namespace jinv {

CountMatrix::CountMatrix(int r, int c, std::int64_t fill) : rows(r), cols(c) {
    if (r < 1 || c < 1) throw std::invalid_argument("CountMatrix: rows and cols must be positive");
    counts.assign(static_cast<std::size_t>(r) * c, fill);
}

double median_row_sum(const CountMatrix& c) {
    std::vector<double> sums(c.rows, 0.0);
    for (int r = 0; r < c.rows; ++r)
        for (int g = 0; g < c.cols; ++g) sums[r] += static_cast<double>(c.at(r, g));
    const std::size_t mid = sums.size() / 2;
    std::nth_element(sums.begin(), sums.begin() + mid, sums.end());
    const double upper = sums[mid];
    if (sums.size() % 2 == 1) return upper;
    const double lower = *std::max_element(sums.begin(), sums.begin() + mid);
    return 0.5 * (lower + upper);
}

std::pair<CountMatrix, CountMatrix> split_counts(const CountMatrix& c, double p, Seed seed) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("split_counts: need 0 < p < 1");
    CountMatrix first = c, second = c;
    const std::size_t n = c.counts.size();
    for (std::size_t e = 0; e < n; ++e) {
        const std::int64_t total = c.counts[e];
        if (total < 0) throw std::invalid_argument("split_counts: negative count");
        CounterRng rng(seed.value, 0x73706c6974ULL, e);
        const std::int64_t kept = sample_binomial(rng, total, p);
        first.counts[e] = kept;
        second.counts[e] = total - kept;
    }
    return {std::move(first), std::move(second)};
}

RealMatrix normalize(const CountMatrix& c, const NormalizationSpec& spec) {
    if (!(spec.n0 > 0.0)) throw std::invalid_argument("normalize: n0 must be > 0");
    std::vector<double> sums(c.rows, 0.0);
    std::vector<int> degenerate;
    for (int r = 0; r < c.rows; ++r) {
        for (int g = 0; g < c.cols; ++g) sums[r] += static_cast<double>(c.at(r, g));
        if (sums[r] <= 0.0) degenerate.push_back(r);
    }
    if (!degenerate.empty()) {
        std::ostringstream msg;
        msg << "normalize: zero-count rows:";
        for (std::size_t i = 0; i < degenerate.size() && i < 20; ++i) msg << ' ' << degenerate[i];
        if (degenerate.size() > 20) msg << " ... (" << degenerate.size() << " total)";
        throw DegenerateRowError(msg.str());
    }

    RealMatrix z(c.rows, c.cols);
    for (int r = 0; r < c.rows; ++r) {
        const double scale = spec.n0 / sums[r];
        for (int g = 0; g < c.cols; ++g) {
            const double v = scale * static_cast<double>(c.at(r, g));
            z.at(r, g) = spec.rho == NormalizationSpec::Rho::kSqrt ? std::sqrt(v) : std::log1p(v);
        }
    }
    return z;
}

namespace {

using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;

EMatrix to_eigen(const RealMatrix& m) {
    EMatrix out(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out(r, c) = m.at(r, c);
    return out;
}

RealMatrix from_eigen(const EMatrix& m) {
    RealMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) out.at(r, c) = m(r, c);
    return out;
}

} // namespace

PcrModel pcr_fit(const RealMatrix& source, const RealMatrix& target, int k) {
    if (source.rows != target.rows)
        throw std::invalid_argument("pcr_fit: source and target row counts differ");
    if (k < 1 || k > std::min(source.rows, source.cols))
        throw std::invalid_argument("pcr_fit: need 1 <= k <= min(rows, source cols)");

    EMatrix xs = to_eigen(source);
    EMatrix xt = to_eigen(target);
    const Eigen::RowVectorXd mean_s = xs.colwise().mean();
    const Eigen::RowVectorXd mean_t = xt.colwise().mean();
    xs.rowwise() -= mean_s;
    xt.rowwise() -= mean_t;

    Eigen::BDCSVD<EMatrix> svd(xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    EMatrix components = svd.matrixV().leftCols(k);
    const EVector singular = svd.singularValues().head(k);

    // sign convention: first nonzero loading of each component positive
    for (int i = 0; i < k; ++i) {
        const double peak = components.col(i).cwiseAbs().maxCoeff();
        for (int r = 0; r < components.rows(); ++r) {
            if (std::fabs(components(r, i)) > 1e-12 * peak) {
                if (components(r, i) < 0.0) components.col(i) = -components.col(i);
                break;
            }
        }
    }

    const EMatrix scores = xs * components;
    EMatrix coefficients = EMatrix::Zero(k, xt.cols());
    const double sv_max = svd.singularValues()(0);
    for (int i = 0; i < k; ++i) {
        // scores columns are orthogonal; zero-variance directions get zero rows
        if (singular(i) <= 1e-12 * sv_max) continue;
        const double denom = scores.col(i).squaredNorm();
        coefficients.row(i) = scores.col(i).transpose() * xt / denom;
    }

    PcrModel model;
    model.k = k;
    model.source_mean.assign(mean_s.data(), mean_s.data() + mean_s.size());
    model.target_mean.assign(mean_t.data(), mean_t.data() + mean_t.size());
    model.components = from_eigen(components);
    model.coefficients = from_eigen(coefficients);
    return model;
}

RealMatrix pcr_predict(const PcrModel& model, const RealMatrix& source) {
    if (source.cols != model.components.rows)
        throw std::invalid_argument("pcr_predict: source column count does not match the model");
    EMatrix xs = to_eigen(source);
    const Eigen::RowVectorXd mean_s =
        Eigen::Map<const Eigen::RowVectorXd>(model.source_mean.data(), model.source_mean.size());
    xs.rowwise() -= mean_s;
    const EMatrix pred =
        (xs * to_eigen(model.components)) * to_eigen(model.coefficients);
    EMatrix out = pred;
    out.rowwise() +=
        Eigen::Map<const Eigen::RowVectorXd>(model.target_mean.data(), model.target_mean.size());
    return from_eigen(out);
}

std::vector<RankCurvePoint> self_supervised_rank_curve(const RealMatrix& x1, const RealMatrix& x2,
                                                       std::span<const int> k_range) {
    if (x1.rows != x2.rows || x1.cols != x2.cols)
        throw std::invalid_argument("self_supervised_rank_curve: halves must share a shape");
    if (k_range.empty()) throw std::invalid_argument("self_supervised_rank_curve: empty k range");

    const double entries = 2.0 * static_cast<double>(x1.rows) * x1.cols;
    std::vector<RankCurvePoint> curve;
    curve.reserve(k_range.size());
    for (int k : k_range) {
        double sse = 0.0;
        const RealMatrix* pairs[2][2] = {{&x1, &x2}, {&x2, &x1}};
        for (auto& [from, to] : pairs) {
            const PcrModel model = pcr_fit(*from, *from, k);
            const RealMatrix pred = pcr_predict(model, *from);
            for (std::size_t e = 0; e < pred.values.size(); ++e) {
                const double d = pred.values[e] - to->values[e];
                sse += d * d;
            }
        }
        curve.push_back({k, sse / entries});
    }
    return curve;
}

namespace {

RealMatrix take_block(const RealMatrix& x, std::span<const int> row_ids,
                      std::span<const std::uint32_t> col_ids) {
    RealMatrix out(static_cast<int>(row_ids.size()), static_cast<int>(col_ids.size()));
    for (std::size_t r = 0; r < row_ids.size(); ++r)
        for (std::size_t c = 0; c < col_ids.size(); ++c)
            out.at(static_cast<int>(r), static_cast<int>(c)) = x.at(row_ids[r], col_ids[c]);
    return out;
}

} // namespace

std::vector<RankCurvePoint> bicv(const RealMatrix& x, std::span<const int> k_range, int row_folds,
                                 const Partition& col_split, Seed seed) {
    if (row_folds < 2) throw std::invalid_argument("bicv: row_folds must be >= 2");
    if (row_folds > x.rows) throw std::invalid_argument("bicv: more folds than rows");
    if (k_range.empty()) throw std::invalid_argument("bicv: empty k range");
    col_split.validate();
    if (col_split.dims != static_cast<std::size_t>(x.cols) || col_split.size() != 2)
        throw std::invalid_argument("bicv: col_split must partition the columns into two blocks");

    // balanced random fold assignment
    std::vector<int> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed.value, 0x62696376ULL, 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.next_below(i))]);
    std::vector<std::vector<int>> folds(row_folds);
    for (std::size_t i = 0; i < order.size(); ++i)
        folds[i % row_folds].push_back(order[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());

    const auto& j1 = col_split.subsets[0];
    const auto& j2 = col_split.subsets[1];

    std::vector<RankCurvePoint> curve;
    curve.reserve(k_range.size());
    for (int k : k_range) {
        double sse = 0.0;
        double predicted = 0.0;
        for (int f = 0; f < row_folds; ++f) {
            std::vector<int> rest;
            for (int g = 0; g < row_folds; ++g)
                if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
            std::sort(rest.begin(), rest.end());

            const std::pair<std::span<const int>, std::span<const int>> splits[2] = {
                {rest, folds[f]}, {folds[f], rest}};
            for (const auto& [fit_rows, eval_rows] : splits) {
                if (static_cast<int>(fit_rows.size()) < k)
                    throw std::invalid_argument("bicv: a fold has fewer rows than k");
                const std::pair<std::span<const std::uint32_t>, std::span<const std::uint32_t>>
                    directions[2] = {{j1, j2}, {j2, j1}};
                for (const auto& [src_cols, dst_cols] : directions) {
                    const PcrModel model = pcr_fit(take_block(x, fit_rows, src_cols),
                                                   take_block(x, fit_rows, dst_cols), k);
                    const RealMatrix pred =
                        pcr_predict(model, take_block(x, eval_rows, src_cols));
                    const RealMatrix truth = take_block(x, eval_rows, dst_cols);
                    for (std::size_t e = 0; e < pred.values.size(); ++e) {
                        const double d = pred.values[e] - truth.values[e];
                        sse += d * d;
                    }
                    predicted += static_cast<double>(pred.values.size());
                }
            }
        }
        curve.push_back({k, sse / predicted});
    }
    return curve;
}

namespace {

std::string row_name(const std::vector<std::string>& names, const char* prefix, int index) {
    if (!names.empty()) return names[index];
    return std::string(prefix) + std::to_string(index);
}

} // namespace

void write_count_matrix_csv(std::ostream& out, const CountMatrix& c) {
    out << "cell";
    for (int g = 0; g < c.cols; ++g) out << ',' << row_name(c.gene_names, "gene_", g);
    out << '\n';
    for (int r = 0; r < c.rows; ++r) {
        out << row_name(c.cell_ids, "cell_", r);
        for (int g = 0; g < c.cols; ++g) out << ',' << c.at(r, g);
        out << '\n';
    }
}

CountMatrix read_count_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("count csv: empty input");
    const auto header = csv::split_line(line);
    if (header.size() < 2) throw std::invalid_argument("count csv: header needs at least one gene");

    std::vector<std::string> genes(header.begin() + 1, header.end());
    std::vector<std::string> cells;
    std::vector<std::int64_t> counts;
    int row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_no;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size())
            throw std::invalid_argument("count csv: row " + std::to_string(row_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header.size()));
        cells.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            std::int64_t v = 0;
            try {
                std::size_t pos = 0;
                v = std::stoll(fields[c], &pos);
                if (pos != fields[c].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw std::invalid_argument("count csv: bad integer at row " +
                                            std::to_string(row_no) + ", column " +
                                            std::to_string(c) + " ('" + fields[c] + "')");
            }
            if (v < 0)
                throw std::invalid_argument("count csv: negative count at row " +
                                            std::to_string(row_no) + ", column " + std::to_string(c));
            counts.push_back(v);
        }
    }
    if (cells.empty()) throw std::invalid_argument("count csv: no data rows");

    CountMatrix c(static_cast<int>(cells.size()), static_cast<int>(genes.size()));
    c.counts = std::move(counts);
    c.cell_ids = std::move(cells);
    c.gene_names = std::move(genes);
    return c;
}

void write_real_matrix_csv(std::ostream& out, const RealMatrix& m,
                           const std::vector<std::string>& row_ids,
                           const std::vector<std::string>& col_names) {
    out << "cell";
    for (int g = 0; g < m.cols; ++g) out << ',' << row_name(col_names, "gene_", g);
    out << '\n';
    for (int r = 0; r < m.rows; ++r) {
        out << row_name(row_ids, "cell_", r);
        for (int g = 0; g < m.cols; ++g) out << ',' << csv::format_number(m.at(r, g));
        out << '\n';
    }
}

RealMatrix read_real_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("matrix csv: empty input");
    const auto header = csv::split_line(line);
    if (header.size() < 2) throw std::invalid_argument("matrix csv: header needs at least one column");
    std::vector<double> values;
    int rows = 0, row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_no;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size())
            throw std::invalid_argument("matrix csv: row " + std::to_string(row_no) +
                                        " has the wrong field count");
        for (std::size_t c = 1; c < fields.size(); ++c) {
            try {
                values.push_back(csv::parse_number(fields[c]));
            } catch (const std::exception&) {
                throw std::invalid_argument("matrix csv: bad number at row " +
                                            std::to_string(row_no) + ", column " + std::to_string(c));
            }
        }
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("matrix csv: no data rows");
    RealMatrix m(rows, static_cast<int>(header.size()) - 1);
    m.values = std::move(values);
    return m;
}

void write_rank_curve_csv(std::ostream& out, std::span<const RankCurvePoint> curve) {
    out << "k,loss\n";
    for (const auto& p : curve) out << p.k << ',' << csv::format_number(p.loss) << '\n';
}

std::vector<RankCurvePoint> read_rank_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || csv::split_line(line) != std::vector<std::string>{"k", "loss"})
        throw std::invalid_argument("rank curve csv: bad header");
    std::vector<RankCurvePoint> curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != 2) throw std::invalid_argument("rank curve csv: bad row");
        curve.push_back({static_cast<int>(csv::parse_number(fields[0])), csv::parse_number(fields[1])});
    }
    return curve;
}

} // namespace jinv
