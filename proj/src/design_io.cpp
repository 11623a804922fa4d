#include "tsvfarm/design_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

namespace {

struct UnitScale {
  std::string_view suffix;
  double divisor;
};

constexpr UnitScale kLengthUnits[] = {{"um", 1e6}, {"mm", 1e3}, {"m", 1.0}};
constexpr UnitScale kAreaUnits[] = {{"um2", 1e12}, {"mm2", 1e6}, {"m2", 1.0}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Splits "12.5um" / "12.5 um" into number and suffix.
std::pair<std::string_view, std::string_view> split_unit(std::string_view text) {
  text = trim(text);
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                             text[i] == '-' || text[i] == '+' ||
                             ((text[i] == 'e' || text[i] == 'E') && i > 0 && i + 1 < text.size() &&
                              (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                               text[i + 1] == '-' || text[i + 1] == '+'))))
    ++i;
  return {text.substr(0, i), trim(text.substr(i))};
}

template <std::size_t N>
double parse_scaled(std::string_view text, const UnitScale (&units)[N], const char* what) {
  auto [num, unit] = split_unit(text);
  auto v = to_double(num);
  if (!v) throw DataError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  if (unit.empty())
    throw DataError(std::string(what) + " '" + std::string(text) + "' needs a unit suffix");
  for (const auto& u : units)
    if (unit == u.suffix) return *v / u.divisor;
  throw DataError("unknown " + std::string(what) + " unit '" + std::string(unit) + "'");
}

double parse_area(std::string_view text) { return parse_scaled(text, kAreaUnits, "area"); }

double parse_number(std::string_view text) {
  auto v = to_double(trim(text));
  if (!v) throw DataError("malformed number '" + std::string(text) + "'");
  return *v;
}

int parse_int(std::string_view text) {
  int v = 0;
  text = trim(text);
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("malformed integer '" + std::string(text) + "'");
  return v;
}

double parse_power(std::string_view text) {
  auto [num, unit] = split_unit(text);
  auto v = to_double(num);
  if (!v) throw DataError("malformed power '" + std::string(text) + "'");
  if (unit.empty() || unit == "W") return *v;
  if (unit == "mW") return *v / 1e3;
  throw DataError("unknown power unit '" + std::string(unit) + "'");
}

bool is_unit_token(std::string_view t) {
  static const std::set<std::string_view> units{"um", "mm", "m", "um2", "mm2", "m2", "K", "C", "W", "mW"};
  return units.count(t) > 0;
}

// Whitespace tokens, with a standalone unit glued to the number before it.
std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) {
    if (!out.empty() && is_unit_token(tok) && to_double(out.back()))
      out.back() += tok;
    else
      out.push_back(tok);
  }
  return out;
}

// Shortest fixed-point value/scale-units text that reads back exactly.
std::string format_scaled(double value, double divisor, std::string_view unit,
                          std::string_view fallback_unit) {
  if (value == 0.0) return "0" + std::string(unit);
  char buf[64];
  for (int prec = 0; prec <= 12; ++prec) {
    auto res = std::to_chars(buf, buf + sizeof buf, value * divisor, std::chars_format::fixed, prec);
    if (res.ec != std::errc()) break;
    auto back = to_double(std::string_view(buf, res.ptr - buf));
    if (back && *back / divisor == value) return std::string(buf, res.ptr) + std::string(unit);
  }
  return format_exact(value) + std::string(fallback_unit);
}

std::string fmt_length(double v) { return format_scaled(v, 1e6, "um", "m"); }
std::string fmt_area(double v) { return format_scaled(v, 1e12, "um2", "m2"); }

std::string fmt_temperature(double v) { return format_exact(v) + "K"; }

struct Parser {
  std::vector<Diagnostic> diags;
  Design d;
  std::map<std::string, int> entity_line;
  int tech_line = 0;
  int tech_sections = 0;
  std::optional<double> tim_thickness, sink_resistance, package_resistance;
  std::set<std::string> tech_seen;
  std::map<std::string, int> power_seen;
  std::vector<std::pair<int, std::vector<std::string>>> net_rows, power_rows;

  void error(int line, std::string msg) { diags.push_back({line, std::move(msg)}); }

  double conductivity(std::string_view tok) {
    if (auto v = to_double(tok)) return *v;
    if (auto k = d.stack.materials.find(tok)) return *k;
    throw DataError("unknown material '" + std::string(tok) + "'");
  }

  void tech(int line, std::string_view key, std::string_view value) {
    auto& t = d.stack.tech;
    if (!tech_seen.insert(std::string(key)).second)
      throw DataError("duplicate tech key '" + std::string(key) + "'");
    if (key == "width") t.width = parse_length(value);
    else if (key == "height") t.height = parse_length(value);
    else if (key == "grid_cell") t.grid_cell = parse_length(value);
    else if (key == "tsv_pitch") t.tsv_pitch = parse_length(value);
    else if (key == "tsv_size") t.tsv_size = parse_length(value);
    else if (key == "ambient") t.ambient = parse_temperature(value);
    else if (key == "package_resistance") package_resistance = parse_number(value);
    else if (key == "tim_thickness") tim_thickness = parse_length(value);
    else if (key == "sink_resistance") sink_resistance = parse_number(value);
    else if (key == "k_farm_range") {
      auto toks = tokenize(value);
      if (toks.size() != 2) throw DataError("k_farm_range needs two values");
      t.k_farm_min = conductivity(toks[0]);
      t.k_farm_max = conductivity(toks[1]);
    } else if (key == "aspect_candidates") {
      t.aspect_candidates.clear();
      for (const auto& tok : tokenize(value)) t.aspect_candidates.push_back(parse_number(tok));
    } else if (key == "leakage_lambda") t.leakage_lambda = parse_number(value);
    else if (key == "leakage_tref") t.leakage_tref = parse_temperature(value);
    else if (key == "bond_thickness") t.bond_thickness = parse_length(value);
    else if (key == "bond_material") t.bond_material = std::string(trim(value));
    else if (key == "composite") {
      if (value == "series") t.composite = CompositeMode::series;
      else if (value == "parallel") t.composite = CompositeMode::parallel;
      else throw DataError("composite must be series or parallel");
    } else if (key == "core_layer") t.core_layer = parse_int(value);
    else if (key == "adjacency_window") t.adjacency_window = parse_length(value);
    else throw DataError("unknown tech key '" + std::string(key) + "'");
    (void)line;
  }

  void row(int line, const std::string& section, const std::vector<std::string>& tok) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (tok.size() < lo || tok.size() > hi)
        throw DataError("[" + section + "] row has " + std::to_string(tok.size()) + " fields, expected " +
                        (lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi)));
    };
    if (section == "materials") {
      need(2, 2);
      d.stack.materials.set(tok[0], parse_number(tok[1]));
      entity_line[tok[0]] = line;
    } else if (section == "layers") {
      need(3, 3);
      Layer l;
      l.index = parse_int(tok[0]);
      l.thickness = parse_length(tok[1]);
      l.material = tok[2];
      auto k = d.stack.materials.find(l.material);
      if (!k) throw DataError("unknown material '" + l.material + "'");
      l.k = *k;
      entity_line["layer " + std::to_string(l.index)] = line;
      d.stack.layers.push_back(l);
    } else if (section == "blocks") {
      need(6, 7);
      Block b;
      b.name = tok[0];
      b.layer = parse_int(tok[1]);
      b.rect = {parse_length(tok[2]), parse_length(tok[3]), parse_length(tok[4]), parse_length(tok[5])};
      if (tok.size() == 7) {
        if (tok[6] == "macro") b.kind = BlockKind::macro;
        else if (tok[6] == "peripheral") b.kind = BlockKind::peripheral;
        else throw DataError("block kind must be macro or peripheral");
      }
      entity_line[b.name] = line;
      d.floorplan.blocks.push_back(b);
    } else if (section == "farms") {
      need(9, 10);
      TsvFarm f;
      f.name = tok[0];
      f.rect = {parse_length(tok[1]), parse_length(tok[2]), parse_length(tok[3]), parse_length(tok[4])};
      f.start_layer = parse_int(tok[5]);
      f.end_layer = parse_int(tok[6]);
      f.k_farm = conductivity(tok[7]);
      f.k_metal = conductivity(tok[8]);
      f.area = tok.size() == 10 ? parse_area(tok[9]) : f.rect.w * f.rect.h;
      entity_line[f.name] = line;
      d.floorplan.farms.push_back(f);
    } else if (section == "nets") {
      need(1, static_cast<std::size_t>(-1));
      net_rows.push_back({line, tok});
    } else if (section == "power") {
      need(2, 3);
      power_rows.push_back({line, tok});
    }
  }

  void finish() {
    for (const auto& [line, tok] : power_rows) {
      try {
        auto it = std::find_if(d.floorplan.blocks.begin(), d.floorplan.blocks.end(),
                               [&](const Block& b) { return b.name == tok[0]; });
        if (it == d.floorplan.blocks.end()) throw DataError("power row names unknown block '" + tok[0] + "'");
        if (!power_seen.emplace(tok[0], line).second)
          throw DataError("duplicate power row for block '" + tok[0] + "'");
        it->power = parse_power(tok[1]);
        it->leakage_ref = tok.size() == 3 ? parse_power(tok[2]) : 0.0;
      } catch (const DataError& e) {
        error(line, e.what());
      }
    }
    for (const auto& [line, tok] : net_rows) {
      Net n;
      n.farm = tok[0];
      n.clients.assign(tok.begin() + 1, tok.end());
      entity_line.emplace("net " + n.farm, line);
      d.nets.push_back(std::move(n));
    }

    auto& t = d.stack.tech;
    if (tech_sections == 0) error(0, "missing [tech] section");
    for (const char* key : {"width", "height", "grid_cell"})
      if (tech_sections && !tech_seen.count(key)) error(tech_line, std::string("missing tech key '") + key + "'");
    if (package_resistance && (tim_thickness || sink_resistance))
      error(tech_line, "give package_resistance or tim_thickness/sink_resistance, not both");
    if (package_resistance) {
      t.package_resistance = *package_resistance;
    } else if (tim_thickness || sink_resistance) {
      auto k_tim = d.stack.materials.find("tim");
      if (!k_tim) error(tech_line, "tim_thickness needs a 'tim' material");
      else if (t.width > 0.0 && t.height > 0.0)
        t.package_resistance = derive_package_resistance(tim_thickness.value_or(0.0), *k_tim,
                                                         t.width * t.height, sink_resistance.value_or(0.0));
    } else if (tech_sections) {
      error(tech_line, "missing tech key 'package_resistance'");
    }
    if (!d.stack.materials.find(t.bond_material))
      error(tech_line, "unknown bond material '" + t.bond_material + "'");

    std::stable_sort(d.stack.layers.begin(), d.stack.layers.end(),
                     [](const Layer& a, const Layer& b) { return a.index < b.index; });

    if (!diags.empty()) return;
    for (const auto& v : validate(d)) {
      int line = 0;
      const bool net_rule = v.rule.rfind("net-", 0) == 0;
      if (v.entity == "tech") line = tech_line;
      else if (auto nt = entity_line.find("net " + v.entity); net_rule && nt != entity_line.end()) line = nt->second;
      else if (auto it = entity_line.find(v.entity); it != entity_line.end()) line = it->second;
      error(line, v.entity + ": " + v.message);
    }
  }
};

const std::set<std::string> kSections{"materials", "tech", "layers", "blocks", "farms", "nets", "power"};

}  // namespace

std::string format_exact(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_length(std::string_view text) { return parse_scaled(text, kLengthUnits, "length"); }

double parse_temperature(std::string_view text) {
  auto [num, unit] = split_unit(text);
  auto v = to_double(num);
  if (!v) throw DataError("malformed temperature '" + std::string(text) + "'");
  if (unit == "K") return *v;
  if (unit == "C") return *v + 273.15;
  if (unit.empty()) throw DataError("temperature '" + std::string(text) + "' needs a K or C suffix");
  throw DataError("unknown temperature unit '" + std::string(unit) + "'");
}

Design parse_design_text(std::string_view text) {
  Parser p;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw DataError("malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!kSections.count(section)) {
          const std::string bad = section;
          section.clear();
          throw DataError("unknown section [" + bad + "]");
        }
        if (section == "tech") {
          if (++p.tech_sections > 1) throw DataError("more than one [tech] section");
          p.tech_line = line_no;
        }
        continue;
      }
      if (section.empty()) throw DataError("content outside any section");
      if (section == "tech") {
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw DataError("expected key = value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw DataError("expected key = value");
        p.tech(line_no, key, value);
      } else {
        p.row(line_no, section, tokenize(line));
      }
    } catch (const DataError& e) {
      p.error(line_no, e.what());
    } catch (const DomainError& e) {
      p.error(line_no, e.what());
    }
    if (end == text.size()) break;
  }
  try {
    p.finish();
  } catch (const DomainError& e) {
    p.error(p.tech_line, e.what());
  }
  if (!p.diags.empty()) throw DataError(std::move(p.diags));
  return std::move(p.d);
}

Design parse_design(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read design file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_design_text(ss.str());
  } catch (const DataError& e) {
    auto diags = e.diagnostics();
    for (auto& dg : diags) dg.message = path + ": " + dg.message;
    throw DataError(std::move(diags));
  }
}

std::string emit_design(const Design& design) {
  const auto& s = design.stack;
  const auto& t = s.tech;
  std::ostringstream os;
  os << "[materials]\n";
  for (const auto& m : s.materials.entries()) os << m.name << ' ' << format_exact(m.k) << '\n';

  os << "\n[tech]\n";
  os << "width = " << fmt_length(t.width) << '\n';
  os << "height = " << fmt_length(t.height) << '\n';
  os << "grid_cell = " << fmt_length(t.grid_cell) << '\n';
  os << "tsv_pitch = " << fmt_length(t.tsv_pitch) << '\n';
  os << "tsv_size = " << fmt_length(t.tsv_size) << '\n';
  os << "ambient = " << fmt_temperature(t.ambient) << '\n';
  os << "package_resistance = " << format_exact(t.package_resistance) << '\n';
  os << "k_farm_range = " << format_exact(t.k_farm_min) << ' ' << format_exact(t.k_farm_max) << '\n';
  os << "aspect_candidates =";
  for (double c : t.aspect_candidates) os << ' ' << format_exact(c);
  os << '\n';
  os << "leakage_lambda = " << format_exact(t.leakage_lambda) << '\n';
  os << "leakage_tref = " << fmt_temperature(t.leakage_tref) << '\n';
  os << "bond_thickness = " << fmt_length(t.bond_thickness) << '\n';
  os << "bond_material = " << t.bond_material << '\n';
  os << "composite = " << (t.composite == CompositeMode::series ? "series" : "parallel") << '\n';
  os << "core_layer = " << t.core_layer << '\n';
  os << "adjacency_window = " << fmt_length(t.adjacency_window) << '\n';

  os << "\n[layers]\n# index thickness material\n";
  for (const auto& l : s.layers) os << l.index << ' ' << fmt_length(l.thickness) << ' ' << l.material << '\n';

  os << "\n[blocks]\n# name layer x y w h kind\n";
  for (const auto& b : design.floorplan.blocks)
    os << b.name << ' ' << b.layer << ' ' << fmt_length(b.rect.x) << ' ' << fmt_length(b.rect.y) << ' '
       << fmt_length(b.rect.w) << ' ' << fmt_length(b.rect.h) << ' '
       << (b.kind == BlockKind::macro ? "macro" : "peripheral") << '\n';

  os << "\n[power]\n# block dynamic leakage_ref (W)\n";
  for (const auto& b : design.floorplan.blocks)
    os << b.name << ' ' << format_exact(b.power) << ' ' << format_exact(b.leakage_ref) << '\n';

  os << "\n[farms]\n# name x y w h start end k_farm k_metal area\n";
  for (const auto& f : design.floorplan.farms)
    os << f.name << ' ' << fmt_length(f.rect.x) << ' ' << fmt_length(f.rect.y) << ' ' << fmt_length(f.rect.w)
       << ' ' << fmt_length(f.rect.h) << ' ' << f.start_layer << ' ' << f.end_layer << ' '
       << format_exact(f.k_farm) << ' ' << format_exact(f.k_metal) << ' ' << fmt_area(f.area) << '\n';

  os << "\n[nets]\n# farm clients...\n";
  for (const auto& n : design.nets) {
    os << n.farm;
    for (const auto& c : n.clients) os << ' ' << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace tsvfarm
