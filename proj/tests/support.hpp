#pragma once

#include <string>
#include <vector>

#include "tsvfarm/stack_model.hpp"

namespace tsvfarm::testing {

inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;

/// Square footprint with `layers` silicon dies of the given thickness.
inline Stack square_stack(double side, double cell, int layers, double thickness = 50 * um,
                          double package_resistance = 1.0) {
  Stack s;
  s.tech.width = side;
  s.tech.height = side;
  s.tech.grid_cell = cell;
  s.tech.package_resistance = package_resistance;
  for (int l = 0; l < layers; ++l) s.layers.push_back({l, thickness, "silicon", 149.0});
  return s;
}

inline Block block(std::string name, int layer, Rect r, double power = 0.0, double leak = 0.0) {
  Block b;
  b.name = std::move(name);
  b.layer = layer;
  b.rect = r;
  b.power = power;
  b.leakage_ref = leak;
  return b;
}

inline TsvFarm farm(std::string name, Rect r, int start, int end, double k_farm = 2.75,
                    double k_metal = 173.0) {
  TsvFarm f;
  f.name = std::move(name);
  f.rect = r;
  f.start_layer = start;
  f.end_layer = end;
  f.k_farm = k_farm;
  f.k_metal = k_metal;
  f.area = r.w * r.h;
  return f;
}

}  // namespace tsvfarm::testing
