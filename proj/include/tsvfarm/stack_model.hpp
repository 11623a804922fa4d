#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsvfarm/geometry.hpp"

namespace tsvfarm {

struct Material {
  std::string name;
  double k = 0.0;  // W/(m K)

  bool operator==(const Material&) const = default;
};

/// Named thermal conductivities. Names are unique.
class MaterialTable {
 public:
  /// Common 3-D IC materials: copper, tungsten, silicon, polysilicon,
  /// thermal interface material, SiO2 liner, bonding adhesive.
  static MaterialTable defaults();

  /// Inserts or replaces.
  void set(const std::string& name, double k);
  std::optional<double> find(std::string_view name) const;
  const std::vector<Material>& entries() const { return entries_; }

  bool operator==(const MaterialTable&) const = default;

 private:
  std::vector<Material> entries_;
};

enum class CompositeMode { series, parallel };

struct TechnologyParams {
  double width = 0.0;  // footprint, m
  double height = 0.0;
  double grid_cell = 0.0;  // m
  double k_farm_min = 0.5;  // W/(m K)
  double k_farm_max = 5.0;
  double tsv_pitch = 4e-6;  // m
  double tsv_size = 2e-6;
  double ambient = 298.15;  // K
  double package_resistance = 0.0;  // K/W, bottom layer to ambient
  std::vector<double> aspect_candidates{0.25, 0.5, 1.0, 2.0, 4.0};
  double leakage_lambda = 0.0;  // 1/K
  double leakage_tref = 298.15;  // K
  double bond_thickness = 0.0;  // m; 0 omits the interface term
  std::string bond_material = "adhesive";
  CompositeMode composite = CompositeMode::series;
  int core_layer = 0;
  double adjacency_window = 0.0;  // m; 0 means one grid cell

  bool operator==(const TechnologyParams&) const = default;
};

/// Package resistance from a TIM slab over the footprint plus a lumped sink.
double derive_package_resistance(double tim_thickness, double k_tim, double footprint_area,
                                 double sink_resistance);

struct Layer {
  int index = 0;  // 0 is closest to the package
  double thickness = 0.0;  // m
  std::string material = "silicon";
  double k = 149.0;  // resolved substrate conductivity

  bool operator==(const Layer&) const = default;
};

enum class BlockKind { macro, peripheral };

struct Block {
  std::string name;
  int layer = 0;
  Rect rect;
  double power = 0.0;  // W, dynamic
  double leakage_ref = 0.0;  // W at the leakage reference temperature
  BlockKind kind = BlockKind::macro;

  bool operator==(const Block&) const = default;
};

/// A soft, layer-spanning via region. Identical rectangle on every layer in
/// [start_layer, end_layer].
struct TsvFarm {
  std::string name;
  Rect rect;
  int start_layer = 0;
  int end_layer = 0;
  double k_farm = 2.75;  // lateral, W/(m K)
  double k_metal = 173.0;  // vertical
  double area = 0.0;  // conserved under reshape

  double aspect_ratio() const { return rect.w / rect.h; }
  bool spans(int layer) const { return layer >= start_layer && layer <= end_layer; }
  bool spans_any(int first, int last) const { return first <= end_layer && last >= start_layer; }

  bool operator==(const TsvFarm&) const = default;
};

struct Net {
  std::string farm;
  std::vector<std::string> clients;

  bool operator==(const Net&) const = default;
};

/// Placement state: the S / S' / S_best of the annealer. A value type;
/// mutation primitives return new snapshots.
struct Floorplan {
  std::vector<Block> blocks;
  std::vector<TsvFarm> farms;

  const Block* find_block(std::string_view name) const;
  const TsvFarm* find_farm(std::string_view name) const;
  std::optional<std::size_t> farm_index(std::string_view name) const;

  bool operator==(const Floorplan&) const = default;
};

struct Stack {
  TechnologyParams tech;
  MaterialTable materials = MaterialTable::defaults();
  std::vector<Layer> layers;

  Rect footprint() const { return {0.0, 0.0, tech.width, tech.height}; }
  int layer_count() const { return static_cast<int>(layers.size()); }

  bool operator==(const Stack&) const = default;
};

struct Design {
  Stack stack;
  Floorplan floorplan;
  std::vector<Net> nets;

  bool operator==(const Design&) const = default;
};

inline constexpr double kMinLayerThickness = 10e-6;
inline constexpr double kMaxLayerThickness = 800e-6;

struct Violation {
  std::string entity;
  std::string rule;
  std::string message;
};

/// Empty iff every model invariant holds. Never throws for bad data.
std::vector<Violation> validate(const Stack& stack, const Floorplan& floorplan,
                                const std::vector<Net>& nets);
std::vector<Violation> validate(const Design& design);

bool is_candidate_ratio(const TechnologyParams& tech, double ratio);

struct FarmShape {
  double width = 0.0;
  double height = 0.0;
};

/// width = sqrt(area * ratio), height = sqrt(area / ratio).
FarmShape reshaped_dimensions(double area, double ratio);

enum class MoveStatus { ok, bad_ratio, out_of_footprint, overlap };

const char* to_string(MoveStatus status);

struct MoveOutcome {
  MoveStatus status = MoveStatus::ok;
  Floorplan floorplan;  // meaningful only when status == ok

  explicit operator bool() const { return status == MoveStatus::ok; }
};

/// Legality of putting farm `farm` at `r`, ignoring its current rectangle.
MoveStatus check_farm_placement(const Stack& stack, const Floorplan& floorplan, std::size_t farm,
                                const Rect& r);

/// Reshape keeping the lower-left corner fixed and the area conserved.
MoveOutcome reshape_farm(const Stack& stack, const Floorplan& floorplan, std::size_t farm,
                         double ratio);

/// Translate the farm prism on all spanned layers.
MoveOutcome move_farm(const Stack& stack, const Floorplan& floorplan, std::size_t farm,
                      Point origin);

/// Bounding box of every block and farm on every layer.
Rect placement_bounding_box(const Floorplan& floorplan);

double total_farm_area(const Floorplan& floorplan);

}  // namespace tsvfarm
