#pragma once

#include <string>

#include "hkt/form_field.hpp"

namespace hkt {

/// Binary field snapshot. Layout: magic "HKTF", u32 version, u32 n, u32
/// active-axis bitmask, u32 N, u32 degree, u32 p, u32 q (both 0xFFFFFFFF for
/// mixed bidegree), u32 stored-component count; then per component a u32
/// basis rank followed by (re, im) little-endian f64 pairs, C-contiguous over
/// the active axes. Write -> read -> write is byte-identical.
void write_snapshot(const std::string& path, const FormField& field);
FormField read_snapshot(const std::string& path);

}  // namespace hkt
