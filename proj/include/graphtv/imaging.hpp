#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "tv_model.hpp"

namespace graphtv {

/// Grayscale raster, row-major, real-valued intensities on the 0..255 scale.
class Image {
public:
    Image(std::size_t width, std::size_t height, std::vector<double> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels))
    {
        if (width_ == 0 || height_ == 0) throw std::invalid_argument("Image: empty image");
        detail::check_size(pixels_.size(), width_ * height_, "Image pixels");
        for (double p : pixels_) {
            if (!std::isfinite(p)) throw std::invalid_argument("Image: non-finite pixel");
        }
    }

    Image(std::size_t width, std::size_t height, double fill = 0.0)
        : Image(width, height, std::vector<double>(width * height, fill))
    {}

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }
    double operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
    double& operator()(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
    const std::vector<double>& pixels() const { return pixels_; }
    std::vector<double>& pixels() { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> pixels_;
};

/// 4-neighbor grid graph. Vertex id = row * width + col; horizontal edges
/// (left -> right) come first in row-major order, then vertical edges
/// (top -> bottom) in row-major order.
inline Graph grid_graph(std::size_t width, std::size_t height)
{
    if (width == 0 || height == 0) throw std::invalid_argument("grid_graph: empty grid");
    std::vector<Edge> edges;
    edges.reserve(height * (width - 1) + width * (height - 1));
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c + 1 < width; ++c) {
            const auto v = static_cast<index_t>(r * width + c);
            edges.push_back({v, v + 1});
        }
    }
    for (std::size_t r = 0; r + 1 < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const auto v = static_cast<index_t>(r * width + c);
            edges.push_back({v, static_cast<index_t>(v + width)});
        }
    }
    return Graph(width * height, std::move(edges));
}

/// Proper 4-coloring of grid_graph: horizontal edges split by even/odd
/// column, vertical edges by even/odd row.
inline EdgeColoring grid_edge_coloring(std::size_t width, std::size_t height)
{
    EdgeColoring coloring;
    coloring.classes.resize(4);
    index_t k = 0;
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c + 1 < width; ++c) coloring.classes[c % 2].push_back(k++);
    }
    for (std::size_t r = 0; r + 1 < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) coloring.classes[2 + r % 2].push_back(k++);
    }
    std::erase_if(coloring.classes, [](const auto& cls) { return cls.empty(); });
    return coloring;
}

inline RofProblem image_to_problem(const Image& img, double t)
{
    return RofProblem(grid_graph(img.width(), img.height()), VertexField(img.pixels()), t);
}

inline Image field_to_image(const VertexField& u, std::size_t width, std::size_t height)
{
    return Image(width, height, u.vector());
}

/// Graph parameter s = n * t for a continuous-domain parameter t on an
/// n x n discretization.
inline double scale_parameter(double t_continuous, std::size_t n)
{
    if (n < 1) throw std::invalid_argument("scale_parameter: n must be at least 1");
    return static_cast<double>(n) * t_continuous;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform in (0, 1) from the top 53 bits; never returns 0.
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter)
{
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(counter * 2 + 1));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

/// Standard normal sample i of the stream identified by seed (Box-Muller
/// on the counter pair (2*(i/2), 2*(i/2)+1)).
inline double gaussian_sample(std::uint64_t seed, std::uint64_t i)
{
    const std::uint64_t pair = i / 2;
    const double u1 = detail::counter_uniform(seed, 2 * pair);
    const double u2 = detail::counter_uniform(seed, 2 * pair + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (i % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

/// img + sigma * eta with eta i.i.d. standard normal, clamped to [0, 255].
inline Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) throw std::invalid_argument("add_gaussian_noise: sigma must be non-negative");
    Image out = img;
    if (sigma == 0.0) return out;
    auto& px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = std::clamp(px[i] + sigma * gaussian_sample(seed, i), 0.0, 255.0);
    }
    return out;
}

inline double mean_squared_error(const Image& a, const Image& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("mean_squared_error: image dimensions differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels()[i] - b.pixels()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

/// 10 log10(255^2 / MSE) in dB; +infinity for identical images.
inline double psnr(const Image& reference, const Image& test)
{
    const double mse = mean_squared_error(reference, test);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Rounds to the nearest integer and clamps to [0, 255].
inline Image quantize(const Image& img)
{
    Image out = img;
    for (auto& p : out.pixels()) p = std::clamp(std::round(p), 0.0, 255.0);
    return out;
}

// PGM I/O. Binary (P5) and plain (P2) are read; P5 is written.

namespace detail {

inline void skip_pnm_space(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline long long read_pnm_int(std::istream& in, const char* what)
{
    skip_pnm_space(in);
    long long value = 0;
    bool any = false;
    while (std::isdigit(in.peek())) {
        value = value * 10 + (in.get() - '0');
        any = true;
        if (value > (1LL << 40)) break;
    }
    if (!any) throw std::runtime_error(std::string("read_pgm: bad ") + what);
    return value;
}

} // namespace detail

inline Image read_pgm(std::istream& in)
{
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
        throw std::runtime_error("read_pgm: not a P5/P2 PGM file");
    }
    const auto width = detail::read_pnm_int(in, "width");
    const auto height = detail::read_pnm_int(in, "height");
    const auto maxval = detail::read_pnm_int(in, "maxval");
    if (width <= 0 || height <= 0 || width * height > (1LL << 32)) {
        throw std::runtime_error("read_pgm: invalid dimensions");
    }
    if (maxval <= 0 || maxval > 65535) throw std::runtime_error("read_pgm: invalid maxval");
    const auto n = static_cast<std::size_t>(width * height);
    std::vector<double> pixels(n);
    const double to_8bit = 255.0 / static_cast<double>(maxval);

    if (magic[1] == '5') {
        // Exactly one whitespace byte separates maxval from the raster.
        if (!std::isspace(in.get())) throw std::runtime_error("read_pgm: missing raster separator");
        const std::size_t bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(n * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
            throw std::runtime_error("read_pgm: truncated raster");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned value = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
            if (value > maxval) throw std::runtime_error("read_pgm: sample exceeds maxval");
            pixels[i] = maxval == 255 ? static_cast<double>(value) : value * to_8bit;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto value = detail::read_pnm_int(in, "sample");
            if (value > maxval) throw std::runtime_error("read_pgm: sample exceeds maxval");
            pixels[i] = maxval == 255 ? static_cast<double>(value) : value * to_8bit;
        }
    }
    return Image(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(pixels));
}

inline Image read_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    return read_pgm(in);
}

/// Binary P5, maxval 255; pixels are rounded and clamped on the way out.
inline void write_pgm(std::ostream& out, const Image& img)
{
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = static_cast<unsigned char>(std::clamp(std::round(img.pixels()[i]), 0.0, 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

inline void write_pgm(const std::string& path, const Image& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    write_pgm(out, img);
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

} // namespace graphtv
