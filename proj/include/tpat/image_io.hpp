#ifndef TPAT_IMAGE_IO_HPP_
#define TPAT_IMAGE_IO_HPP_

#include <string>

#include "tpat/tensor.hpp"

namespace tpat {

// Planar RGB image, values in [0, 1], tensor shape 3 x H x W.
struct Image {
    Tensor t;

    Image() = default;
    explicit Image(Tensor tensor);
    Image(int h, int w) : Image(Tensor({3, h, w})) {}

    int height() const { return t.extent(1); }
    int width() const { return t.extent(2); }
};

// Binary PPM (P6, maxval 255). PGM (P5) loads as gray replicated to RGB.
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

// Raw planar float container: magic "TIM1", then C, H, W as little-endian
// u32, then C*H*W little-endian f32.
Image read_raw(const std::string& path);
void write_raw(const Image& img, const std::string& path);

// Dispatch on extension: .ppm/.pgm vs .raw.
Image read_image(const std::string& path);

// Bilinear crop-and-resize of the square window of side `side` centered at
// (cx, cy). Sampling coordinates are clamped to the frame, which replicates
// edges for windows extending past the border. Throws ExtractionError when
// the window misses the frame entirely.
Image crop_resize(const Image& img, float cx, float cy, float side, int out_size);

}  // namespace tpat

#endif  // TPAT_IMAGE_IO_HPP_
