#include "tpat/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "tpat/errors.hpp"

namespace tpat {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

int read_pnm_int(std::istream& is) {
    // Skips whitespace and '#' comments.
    int c = is.get();
    while (c == '#' || std::isspace(c)) {
        if (c == '#')
            while (c != '\n' && c != EOF) c = is.get();
        c = is.get();
    }
    int v = 0;
    bool any = false;
    while (std::isdigit(c)) {
        v = v * 10 + (c - '0');
        any = true;
        c = is.get();
    }
    if (!any) throw ParseError("malformed PNM header");
    return v;
}

}  // namespace

Image::Image(Tensor tensor) : t(std::move(tensor)) {
    if (t.ndim() != 3 || t.extent(0) != 3)
        throw DimensionError("image needs a 3xHxW tensor, got " + shape_str(t.shape()));
}

Image read_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char p, kind;
    is.get(p);
    is.get(kind);
    if (p != 'P' || (kind != '6' && kind != '5')) throw ParseError(path + ": not a P5/P6 file");
    const int w = read_pnm_int(is);
    const int h = read_pnm_int(is);
    const int maxval = read_pnm_int(is);
    if (maxval != 255) throw ParseError(path + ": only maxval 255 supported");
    const int ch = kind == '6' ? 3 : 1;
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * ch);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!is) throw IoError(path + ": truncated pixel data");
    Image img(h, w);
    float* data = img.t.data();
    const long npx = static_cast<long>(w) * h;
    for (long p_i = 0; p_i < npx; ++p_i)
        for (int c = 0; c < 3; ++c)
            data[c * npx + p_i] = raw[p_i * ch + (ch == 3 ? c : 0)] / 255.f;
    return img;
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    const int h = img.height(), w = img.width();
    os << "P6\n" << w << " " << h << "\n255\n";
    const long npx = static_cast<long>(w) * h;
    std::vector<unsigned char> raw(static_cast<size_t>(npx) * 3);
    const float* data = img.t.data();
    for (long p = 0; p < npx; ++p)
        for (int c = 0; c < 3; ++c) {
            const float v = std::clamp(data[c * npx + p], 0.f, 1.f);
            raw[p * 3 + c] = static_cast<unsigned char>(std::lround(v * 255.f));
        }
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!os) throw IoError("write failed for " + path);
}

Image read_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "TIM1") throw ParseError(path + ": not a raw image");
    const int c = static_cast<int>(read_u32(is));
    const int h = static_cast<int>(read_u32(is));
    const int w = static_cast<int>(read_u32(is));
    if (c != 3) throw ParseError(path + ": expected 3 channels, got " + std::to_string(c));
    Image img(h, w);
    is.read(reinterpret_cast<char*>(img.t.data()),
            static_cast<std::streamsize>(img.t.numel() * 4));
    if (!is) throw IoError(path + ": truncated pixel data");
    return img;
}

void write_raw(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os.write("TIM1", 4);
    write_u32(os, 3);
    write_u32(os, static_cast<std::uint32_t>(img.height()));
    write_u32(os, static_cast<std::uint32_t>(img.width()));
    os.write(reinterpret_cast<const char*>(img.t.data()),
             static_cast<std::streamsize>(img.t.numel() * 4));
    if (!os) throw IoError("write failed for " + path);
}

Image read_image(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".raw") return read_raw(path);
    return read_ppm(path);
}

Image crop_resize(const Image& img, float cx, float cy, float side, int out_size) {
    if (side <= 0.f) throw ExtractionError("crop side must be positive");
    const float x0 = cx - side / 2.f, y0 = cy - side / 2.f;
    if (x0 + side <= 0.f || y0 + side <= 0.f || x0 >= static_cast<float>(img.width()) ||
        y0 >= static_cast<float>(img.height()))
        throw ExtractionError("crop window lies outside the frame");

    const int h = img.height(), w = img.width();
    const long npx_in = static_cast<long>(h) * w;
    const float scale = side / static_cast<float>(out_size);
    Image out(out_size, out_size);
    const long npx_out = static_cast<long>(out_size) * out_size;
    const float* src = img.t.data();
    float* dst = out.t.data();
#pragma omp parallel for schedule(static) if (out_size > 16)
    for (int oy = 0; oy < out_size; ++oy) {
        const float sy = y0 + (oy + 0.5f) * scale - 0.5f;
        const int yi = static_cast<int>(std::floor(sy));
        const float fy = sy - yi;
        const int y_a = std::clamp(yi, 0, h - 1), y_b = std::clamp(yi + 1, 0, h - 1);
        for (int ox = 0; ox < out_size; ++ox) {
            const float sx = x0 + (ox + 0.5f) * scale - 0.5f;
            const int xi = static_cast<int>(std::floor(sx));
            const float fx = sx - xi;
            const int x_a = std::clamp(xi, 0, w - 1), x_b = std::clamp(xi + 1, 0, w - 1);
            for (int c = 0; c < 3; ++c) {
                const float* plane = src + c * npx_in;
                const float top = plane[y_a * w + x_a] * (1 - fx) + plane[y_a * w + x_b] * fx;
                const float bot = plane[y_b * w + x_a] * (1 - fx) + plane[y_b * w + x_b] * fx;
                dst[c * npx_out + oy * out_size + ox] = top * (1 - fy) + bot * fy;
            }
        }
    }
    return out;
}

}  // namespace tpat
