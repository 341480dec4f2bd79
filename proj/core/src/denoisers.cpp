#include "jinv/denoisers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "jinv/parallel.hpp"

namespace jinv {

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius, bool include_center) {
    std::vector<std::pair<int, int>> offsets;
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
            if (dr * dr + dc * dc > radius * radius) continue;
            if (!include_center && dr == 0 && dc == 0) continue;
            offsets.emplace_back(dr, dc);
        }
    return offsets;
}

double median_of(std::vector<double>& buf) {
    const std::size_t n = buf.size();
    const std::size_t mid = n / 2;
    std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
    const double upper = buf[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(buf.begin(), buf.begin() + mid);
    return 0.5 * (lower + upper);
}

} // namespace

ImageGrid median_filter(const ImageGrid& x, int radius, bool include_center) {
    if (radius < 1) throw std::invalid_argument("median_filter: radius must be >= 1");
    const auto offsets = disk_offsets(radius, include_center);
    ImageGrid out(x.width, x.height);
    const int w = x.width, h = x.height;
    parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> buf(offsets.size());
        for (std::size_t r = lo; r < hi; ++r) {
            for (int c = 0; c < w; ++c) {
                for (std::size_t i = 0; i < offsets.size(); ++i) {
                    const int rr = mirror_index(static_cast<int>(r) + offsets[i].first, h);
                    const int cc = mirror_index(c + offsets[i].second, w);
                    buf[i] = x.at(rr, cc);
                }
                out.at(static_cast<int>(r), c) = median_of(buf);
            }
        }
    });
    return out;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void haar_rows(std::vector<double>& a, int h, int w, int stride) {
    std::vector<double> tmp(w);
    for (int r = 0; r < h; ++r) {
        double* row = a.data() + static_cast<std::size_t>(r) * stride;
        const int half = w / 2;
        for (int i = 0; i < half; ++i) {
            tmp[i] = (row[2 * i] + row[2 * i + 1]) * kInvSqrt2;
            tmp[half + i] = (row[2 * i] - row[2 * i + 1]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + w, row);
    }
}

void haar_rows_inv(std::vector<double>& a, int h, int w, int stride) {
    std::vector<double> tmp(w);
    for (int r = 0; r < h; ++r) {
        double* row = a.data() + static_cast<std::size_t>(r) * stride;
        const int half = w / 2;
        for (int i = 0; i < half; ++i) {
            tmp[2 * i] = (row[i] + row[half + i]) * kInvSqrt2;
            tmp[2 * i + 1] = (row[i] - row[half + i]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + w, row);
    }
}

void haar_cols(std::vector<double>& a, int h, int w, int stride, bool inverse) {
    std::vector<double> col(h), tmp(h);
    const int half = h / 2;
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) col[r] = a[static_cast<std::size_t>(r) * stride + c];
        if (!inverse) {
            for (int i = 0; i < half; ++i) {
                tmp[i] = (col[2 * i] + col[2 * i + 1]) * kInvSqrt2;
                tmp[half + i] = (col[2 * i] - col[2 * i + 1]) * kInvSqrt2;
            }
        } else {
            for (int i = 0; i < half; ++i) {
                tmp[2 * i] = (col[i] + col[half + i]) * kInvSqrt2;
                tmp[2 * i + 1] = (col[i] - col[half + i]) * kInvSqrt2;
            }
        }
        for (int r = 0; r < h; ++r) a[static_cast<std::size_t>(r) * stride + c] = tmp[r];
    }
}

} // namespace

ImageGrid haar_wavelet_denoise(const ImageGrid& x, double threshold, int levels) {
    if (levels < 1) throw std::invalid_argument("haar_wavelet_denoise: levels must be >= 1");
    if (!(threshold >= 0.0)) throw std::invalid_argument("haar_wavelet_denoise: threshold must be >= 0");

    const int block = 1 << levels;
    const int ph = (x.height + block - 1) / block * block;
    const int pw = (x.width + block - 1) / block * block;

    std::vector<double> a(static_cast<std::size_t>(ph) * pw);
    for (int r = 0; r < ph; ++r)
        for (int c = 0; c < pw; ++c)
            a[static_cast<std::size_t>(r) * pw + c] =
                x.at(mirror_index(r, x.height), mirror_index(c, x.width));

    for (int level = 0; level < levels; ++level) {
        const int hh = ph >> level, ww = pw >> level;
        haar_rows(a, hh, ww, pw);
        haar_cols(a, hh, ww, pw, false);
    }

    // soft-threshold everything but the final approximation block
    const int ah = ph >> levels, aw = pw >> levels;
    for (int r = 0; r < ph; ++r)
        for (int c = 0; c < pw; ++c) {
            if (r < ah && c < aw) continue;
            double& v = a[static_cast<std::size_t>(r) * pw + c];
            const double mag = std::fabs(v) - threshold;
            v = mag > 0.0 ? std::copysign(mag, v) : 0.0;
        }

    for (int level = levels - 1; level >= 0; --level) {
        const int hh = ph >> level, ww = pw >> level;
        haar_cols(a, hh, ww, pw, true);
        haar_rows_inv(a, hh, ww, pw);
    }

    ImageGrid out(x.width, x.height);
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c)
            out.at(r, c) = a[static_cast<std::size_t>(r) * pw + c];
    return out;
}

namespace {

// Mirror-extended lookup.
inline double pix(const ImageGrid& x, int r, int c) {
    return x.at(mirror_index(r, x.height), mirror_index(c, x.width));
}

} // namespace

ImageGrid nl_means(const ImageGrid& x, double cutoff, int patch, int window) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("nl_means: cutoff must be > 0");
    if (patch < 1 || patch % 2 == 0 || window < 1 || window % 2 == 0)
        throw std::invalid_argument("nl_means: patch and window must be odd positive");
    if (patch > window) throw std::invalid_argument("nl_means: patch must be <= window");

    const int h = x.height, w = x.width;
    const int q = patch / 2, win = window / 2;
    const double inv_h2 = 1.0 / (cutoff * cutoff);
    const double inv_patch2 = 1.0 / (patch * patch);

    ImageGrid acc(w, h, 0.0), wsum(w, h, 0.0);

    // padded squared-difference buffer for one displacement
    const int eh = h + 2 * q, ew = w + 2 * q;
    std::vector<double> diff2(static_cast<std::size_t>(eh) * ew);
    std::vector<double> vert(static_cast<std::size_t>(h) * ew);

    // Displacements run in a fixed order and pixels accumulate in that order,
    // so the result does not depend on how rows are split across threads.
    for (int dr = -win; dr <= win; ++dr) {
        for (int dc = -win; dc <= win; ++dc) {
            parallel_for(0, static_cast<std::size_t>(eh), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t er = lo; er < hi; ++er) {
                    const int r = static_cast<int>(er) - q;
                    for (int ec = 0; ec < ew; ++ec) {
                        const int c = ec - q;
                        const double d = pix(x, r, c) - pix(x, r + dr, c + dc);
                        diff2[er * ew + ec] = d * d;
                    }
                }
            });
            // vertical patch sums at output rows (direct short sums keep the
            // values identical no matter how the range is chunked)
            parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r) {
                    for (int ec = 0; ec < ew; ++ec) {
                        double s = 0.0;
                        for (int p = 0; p < patch; ++p) s += diff2[(r + p) * ew + ec];
                        vert[r * ew + ec] = s;
                    }
                }
            });
            parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r) {
                    for (int c = 0; c < w; ++c) {
                        double s = 0.0;
                        for (int p = 0; p < patch; ++p) s += vert[r * ew + c + p];
                        const double weight = std::exp(-s * inv_patch2 * inv_h2);
                        acc.at(static_cast<int>(r), c) +=
                            weight * pix(x, static_cast<int>(r) + dr, c + dc);
                        wsum.at(static_cast<int>(r), c) += weight;
                    }
                }
            });
        }
    }

    ImageGrid out(w, h);
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = acc.values[j] / wsum.values[j];
    return out;
}

ImageGrid denoise(const ImageGrid& x, const DenoiserParam& param) {
    if (const auto* m = std::get_if<MedianRadius>(&param))
        return median_filter(x, m->radius, m->include_center);
    if (const auto* wv = std::get_if<WaveletThreshold>(&param))
        return haar_wavelet_denoise(x, wv->threshold, wv->levels);
    const auto& n = std::get<NlmCutoff>(param);
    return nl_means(x, n.cutoff, n.patch, n.window);
}

Denoiser make_denoiser(const DenoiserParam& param) {
    return [param](const ImageGrid& x) { return denoise(x, param); };
}

std::string format_denoiser_param(const DenoiserParam& param) {
    std::ostringstream out;
    out.precision(12);
    if (const auto* m = std::get_if<MedianRadius>(&param)) {
        out << "median r=" << m->radius << ' ' << (m->include_center ? "full" : "donut");
    } else if (const auto* wv = std::get_if<WaveletThreshold>(&param)) {
        out << "wavelet t=" << wv->threshold << " levels=" << wv->levels;
    } else {
        const auto& n = std::get<NlmCutoff>(param);
        out << "nlm h=" << n.cutoff << " patch=" << n.patch << " window=" << n.window;
    }
    return out.str();
}

DenoiserParam parse_denoiser_param(const std::string& label) {
    std::istringstream in(label);
    std::string kind;
    in >> kind;
    auto take = [&](const std::string& key) {
        std::string token;
        if (!(in >> token) || token.rfind(key + "=", 0) != 0)
            throw std::invalid_argument("parse_denoiser_param: expected " + key + "= in '" + label + "'");
        return std::stod(token.substr(key.size() + 1));
    };
    if (kind == "median") {
        const int r = static_cast<int>(take("r"));
        std::string mode;
        in >> mode;
        if (mode != "full" && mode != "donut")
            throw std::invalid_argument("parse_denoiser_param: median needs 'full' or 'donut'");
        return MedianRadius{r, mode == "full"};
    }
    if (kind == "wavelet") {
        const double t = take("t");
        const int levels = static_cast<int>(take("levels"));
        return WaveletThreshold{t, levels};
    }
    if (kind == "nlm") {
        const double hval = take("h");
        const int patch = static_cast<int>(take("patch"));
        const int window = static_cast<int>(take("window"));
        return NlmCutoff{hval, patch, window};
    }
    throw std::invalid_argument("parse_denoiser_param: unknown kind '" + kind + "'");
}

bool param_less(const DenoiserParam& a, const DenoiserParam& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (const auto* m = std::get_if<MedianRadius>(&a)) {
        const auto& o = std::get<MedianRadius>(b);
        if (m->radius != o.radius) return m->radius < o.radius;
        return m->include_center < o.include_center;
    }
    if (const auto* wv = std::get_if<WaveletThreshold>(&a)) {
        const auto& o = std::get<WaveletThreshold>(b);
        if (wv->threshold != o.threshold) return wv->threshold < o.threshold;
        return wv->levels < o.levels;
    }
    const auto& n = std::get<NlmCutoff>(a);
    const auto& o = std::get<NlmCutoff>(b);
    if (n.cutoff != o.cutoff) return n.cutoff < o.cutoff;
    if (n.patch != o.patch) return n.patch < o.patch;
    return n.window < o.window;
}

} // namespace jinv
