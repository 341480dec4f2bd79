#include "jinv/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace jinv {

namespace {

int next_header_int(std::istream& in, const std::filesystem::path& path) {
    // PNM headers: tokens separated by whitespace, '#' comments to end of line
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw std::runtime_error("pgm: truncated header in " + path.string());
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        int value;
        if (!(in >> value)) throw std::runtime_error("pgm: bad header token in " + path.string());
        return value;
    }
}

} // namespace

void write_pgm16(const std::filesystem::path& path, const ImageGrid& img) {
    if (img.width < 1 || img.height < 1) throw std::invalid_argument("write_pgm16: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n65535\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 2);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double clamped = std::clamp(img.at(r, c), 0.0, 1.0);
            const auto v = static_cast<std::uint16_t>(std::lround(clamped * 65535.0));
            row[2 * c] = static_cast<unsigned char>(v >> 8);
            row[2 * c + 1] = static_cast<unsigned char>(v & 0xFF);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("pgm: write failed for " + path.string());
}

ImageGrid read_pgm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pgm: cannot open " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("pgm: " + path.string() + " is not a binary PGM (P5)");
    const int width = next_header_int(in, path);
    const int height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
        throw std::runtime_error("pgm: bad dimensions/maxval in " + path.string());
    in.get(); // single whitespace byte after maxval

    ImageGrid img(width, height);
    const bool wide = maxval > 255;
    const std::size_t bytes_per_sample = wide ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * bytes_per_sample);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw std::runtime_error("pgm: truncated pixel data in " + path.string());
    const double scale = 1.0 / maxval;
    for (std::size_t j = 0; j < img.size(); ++j) {
        const unsigned v = wide ? (raw[2 * j] << 8 | raw[2 * j + 1]) : raw[j];
        img.values[j] = v * scale;
    }
    return img;
}

} // namespace jinv
