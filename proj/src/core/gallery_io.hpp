#pragma once

#include <string>

#include "core/classifier.hpp"

namespace lrcset {

/// Binary gallery container, little-endian throughout. Round-trips are
/// bit-exact; see docs/gallery_format.md for the field layout.
void save_gallery(const Gallery& g, const std::string& path);
Gallery load_gallery(const std::string& path);

}  // namespace lrcset
