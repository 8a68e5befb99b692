#pragma once

#include <string>

#include "core/preprocess.hpp"

namespace lrcset {

/// Decodes a PNG, binary PGM (P5) or uncompressed BMP file, dispatching on
/// the magic bytes. Produces a 1- or 3-channel raster on the 0..255 scale.
Raster load_image(const std::string& path);

/// Writes a single-channel raster as an 8-bit binary PGM; values are rounded
/// and clamped to 0..255.
void save_pgm(const Raster& img, const std::string& path);

/// True when the file starts with a supported image signature.
bool sniff_image(const std::string& path);

}  // namespace lrcset
