#include "tsvfarm/stack_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::ostringstream os;
  for (std::size_t i = 0; i < diagnostics.size(); ++i) {
    if (i) os << '\n';
    if (diagnostics[i].line > 0) os << "line " << diagnostics[i].line << ": ";
    os << diagnostics[i].message;
  }
  return os.str();
}

std::string fmt_rect(const Rect& r) {
  std::ostringstream os;
  os << '(' << r.x << ',' << r.y << ',' << r.w << ',' << r.h << ')';
  return os.str();
}

}  // namespace

DataError::DataError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

DataError::DataError(const std::string& message)
    : std::runtime_error(message), diagnostics_{{0, message}} {}

MaterialTable MaterialTable::defaults() {
  MaterialTable t;
  t.set("copper", 401.0);
  t.set("tungsten", 173.0);
  t.set("silicon", 149.0);
  t.set("polysilicon", 23.1);
  t.set("tim", 5.0);
  t.set("sio2", 1.38);
  t.set("adhesive", 0.29);
  return t;
}

void MaterialTable::set(const std::string& name, double k) {
  for (auto& m : entries_) {
    if (m.name == name) {
      m.k = k;
      return;
    }
  }
  entries_.push_back({name, k});
}

std::optional<double> MaterialTable::find(std::string_view name) const {
  for (const auto& m : entries_)
    if (m.name == name) return m.k;
  return std::nullopt;
}

double derive_package_resistance(double tim_thickness, double k_tim, double footprint_area,
                                 double sink_resistance) {
  if (k_tim <= 0.0 || footprint_area <= 0.0)
    throw DomainError("package resistance needs positive TIM conductivity and footprint");
  return tim_thickness / (k_tim * footprint_area) + sink_resistance;
}

const Block* Floorplan::find_block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return &b;
  return nullptr;
}

const TsvFarm* Floorplan::find_farm(std::string_view name) const {
  for (const auto& f : farms)
    if (f.name == name) return &f;
  return nullptr;
}

std::optional<std::size_t> Floorplan::farm_index(std::string_view name) const {
  for (std::size_t i = 0; i < farms.size(); ++i)
    if (farms[i].name == name) return i;
  return std::nullopt;
}

bool is_candidate_ratio(const TechnologyParams& tech, double ratio) {
  return std::any_of(tech.aspect_candidates.begin(), tech.aspect_candidates.end(),
                     [&](double c) { return std::abs(c - ratio) <= 1e-9 * c; });
}

std::vector<Violation> validate(const Stack& stack, const Floorplan& fp,
                                const std::vector<Net>& nets) {
  std::vector<Violation> out;
  auto add = [&](std::string entity, std::string rule, std::string msg) {
    out.push_back({std::move(entity), std::move(rule), std::move(msg)});
  };

  const auto& tech = stack.tech;
  if (!(tech.width > 0.0) || !(tech.height > 0.0))
    add("tech", "positive-length", "footprint width and height must be > 0");
  if (!(tech.grid_cell > 0.0)) add("tech", "positive-length", "grid_cell must be > 0");
  if (!(tech.tsv_pitch > 0.0) || !(tech.tsv_size > 0.0))
    add("tech", "positive-length", "tsv_pitch and tsv_size must be > 0");
  if (!(tech.k_farm_min <= tech.k_farm_max)) add("tech", "k-farm-range", "k_farm min exceeds max");
  if (!(tech.ambient > 0.0)) add("tech", "ambient", "ambient temperature must be > 0 K");
  if (!(tech.package_resistance > 0.0))
    add("tech", "package-resistance", "package_resistance must be > 0");
  if (tech.aspect_candidates.empty())
    add("tech", "aspect-candidates", "candidate aspect-ratio set is empty");
  for (double c : tech.aspect_candidates)
    if (!(c > 0.0)) add("tech", "aspect-candidates", "aspect ratio candidates must be > 0");
  if (tech.leakage_lambda < 0.0) add("tech", "leakage", "leakage_lambda must be >= 0");
  if (tech.adjacency_window < 0.0) add("tech", "adjacency-window", "adjacency_window must be >= 0");

  {
    std::set<std::string> names;
    for (const auto& m : stack.materials.entries()) {
      if (!names.insert(m.name).second) add(m.name, "material-unique", "duplicate material name");
      if (!(m.k > 0.0)) add(m.name, "material-k", "conductivity must be > 0");
    }
  }

  const int nl = stack.layer_count();
  if (nl == 0) add("stack", "layers", "stack has no layers");
  for (int i = 0; i < nl; ++i) {
    const auto& l = stack.layers[i];
    const std::string id = "layer " + std::to_string(i);
    if (l.index != i) add(id, "layer-index", "layers must be indexed 0..L-1 bottom-up");
    if (l.thickness < kMinLayerThickness * (1 - 1e-9) ||
        l.thickness > kMaxLayerThickness * (1 + 1e-9))
      add(id, "layer-thickness", "thickness outside [10 um, 800 um]");
    if (!(l.k > 0.0)) add(id, "material-k", "substrate conductivity must be > 0");
  }
  if (tech.core_layer < 0 || (nl > 0 && tech.core_layer >= nl))
    add("tech", "core-layer", "core_layer out of range");

  const Rect footprint = stack.footprint();
  std::set<std::string> names;
  for (const auto& b : fp.blocks) {
    if (!names.insert(b.name).second) add(b.name, "name-unique", "duplicate entity name");
    if (b.layer < 0 || b.layer >= nl) add(b.name, "layer-range", "block layer out of range");
    if (!(b.rect.w > 0.0) || !(b.rect.h > 0.0))
      add(b.name, "positive-size", "block width/height must be > 0");
    if (!contains(footprint, b.rect))
      add(b.name, "inside-footprint", "block " + fmt_rect(b.rect) + " exits the footprint");
    if (b.power < 0.0 || b.leakage_ref < 0.0) add(b.name, "power", "power must be >= 0");
  }
  for (const auto& f : fp.farms) {
    if (!names.insert(f.name).second) add(f.name, "name-unique", "duplicate entity name");
    if (f.start_layer > f.end_layer) add(f.name, "layer-span", "start_layer > end_layer");
    if (f.start_layer < 0 || f.end_layer >= nl) add(f.name, "layer-range", "farm span out of range");
    if (!(f.rect.w > 0.0) || !(f.rect.h > 0.0)) {
      add(f.name, "positive-size", "farm width/height must be > 0");
      continue;
    }
    if (!contains(footprint, f.rect))
      add(f.name, "inside-footprint", "farm " + fmt_rect(f.rect) + " exits the footprint");
    if (!(f.area > 0.0) || std::abs(f.rect.w * f.rect.h - f.area) > 1e-9 * f.area)
      add(f.name, "area-conservation", "width*height differs from the declared farm area");
    if (!is_candidate_ratio(tech, f.aspect_ratio()))
      add(f.name, "aspect-candidate", "aspect ratio is not in the candidate set");
    if (!(f.k_farm > 0.0) || !(f.k_metal > 0.0))
      add(f.name, "material-k", "farm conductivities must be > 0");
  }

  for (std::size_t i = 0; i < fp.blocks.size(); ++i)
    for (std::size_t j = i + 1; j < fp.blocks.size(); ++j) {
      const auto& a = fp.blocks[i];
      const auto& b = fp.blocks[j];
      if (a.layer == b.layer && overlaps(a.rect, b.rect))
        add(a.name, "overlap", a.name + " overlaps " + b.name + " on layer " + std::to_string(a.layer));
    }
  for (const auto& f : fp.farms)
    for (const auto& b : fp.blocks)
      if (f.spans(b.layer) && overlaps(f.rect, b.rect))
        add(f.name, "overlap", f.name + " overlaps " + b.name + " on layer " + std::to_string(b.layer));
  for (std::size_t i = 0; i < fp.farms.size(); ++i)
    for (std::size_t j = i + 1; j < fp.farms.size(); ++j) {
      const auto& a = fp.farms[i];
      const auto& b = fp.farms[j];
      if (a.spans_any(b.start_layer, b.end_layer) && overlaps(a.rect, b.rect))
        add(a.name, "overlap", a.name + " overlaps " + b.name);
    }

  for (const auto& n : nets) {
    if (!fp.find_farm(n.farm)) add(n.farm, "net-reference", "net names unknown farm '" + n.farm + "'");
    if (n.clients.empty()) add(n.farm, "net-clients", "net has no client blocks");
    for (const auto& c : n.clients)
      if (!fp.find_block(c)) add(n.farm, "net-reference", "net names unknown block '" + c + "'");
  }
  return out;
}

std::vector<Violation> validate(const Design& design) {
  return validate(design.stack, design.floorplan, design.nets);
}

FarmShape reshaped_dimensions(double area, double ratio) {
  if (!(area > 0.0) || !(ratio > 0.0)) throw DomainError("reshape needs positive area and ratio");
  return {std::sqrt(area * ratio), std::sqrt(area / ratio)};
}

const char* to_string(MoveStatus status) {
  switch (status) {
    case MoveStatus::ok: return "ok";
    case MoveStatus::bad_ratio: return "bad-ratio";
    case MoveStatus::out_of_footprint: return "out-of-footprint";
    case MoveStatus::overlap: return "overlap";
  }
  return "?";
}

MoveStatus check_farm_placement(const Stack& stack, const Floorplan& fp, std::size_t farm,
                                const Rect& r) {
  if (!contains(stack.footprint(), r)) return MoveStatus::out_of_footprint;
  const auto& f = fp.farms[farm];
  for (const auto& b : fp.blocks)
    if (f.spans(b.layer) && overlaps(r, b.rect)) return MoveStatus::overlap;
  for (std::size_t j = 0; j < fp.farms.size(); ++j) {
    if (j == farm) continue;
    const auto& o = fp.farms[j];
    if (f.spans_any(o.start_layer, o.end_layer) && overlaps(r, o.rect)) return MoveStatus::overlap;
  }
  return MoveStatus::ok;
}

MoveOutcome reshape_farm(const Stack& stack, const Floorplan& fp, std::size_t farm, double ratio) {
  if (!is_candidate_ratio(stack.tech, ratio)) return {MoveStatus::bad_ratio, {}};
  const auto& f = fp.farms.at(farm);
  const FarmShape shape = reshaped_dimensions(f.area, ratio);
  const Rect r{f.rect.x, f.rect.y, shape.width, shape.height};
  if (auto st = check_farm_placement(stack, fp, farm, r); st != MoveStatus::ok) return {st, {}};
  MoveOutcome out{MoveStatus::ok, fp};
  out.floorplan.farms[farm].rect = r;
  return out;
}

MoveOutcome move_farm(const Stack& stack, const Floorplan& fp, std::size_t farm, Point origin) {
  const auto& f = fp.farms.at(farm);
  const Rect r{origin.x, origin.y, f.rect.w, f.rect.h};
  if (auto st = check_farm_placement(stack, fp, farm, r); st != MoveStatus::ok) return {st, {}};
  MoveOutcome out{MoveStatus::ok, fp};
  out.floorplan.farms[farm].rect = r;
  return out;
}

Rect placement_bounding_box(const Floorplan& fp) {
  bool first = true;
  Rect box;
  auto take = [&](const Rect& r) {
    box = first ? r : merge(box, r);
    first = false;
  };
  for (const auto& b : fp.blocks) take(b.rect);
  for (const auto& f : fp.farms) take(f.rect);
  return box;
}

double total_farm_area(const Floorplan& fp) {
  double a = 0.0;
  for (const auto& f : fp.farms) a += f.area;
  return a;
}

}  // namespace tsvfarm
