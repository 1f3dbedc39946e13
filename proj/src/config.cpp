#include "steerlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "steerlab/error.hpp"
#include "toml.hpp"

namespace steerlab {
namespace {

// Walks one TOML table, remembering which keys were consumed so that
// unknown (typically misspelt) keys can be reported.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string path, const std::string& source)
      : table_(table), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& key, const std::string& what) const {
    std::ostringstream os;
    os << source_;
    const toml::node* where = node ? node : &table_;
    if (where->source().begin.line > 0)
      os << ":" << where->source().begin.line << ":" << where->source().begin.column;
    os << ": " << qualified(key) << ": " << what;
    throw ConfigError(os.str());
  }

  const toml::node* node(const std::string& key) {
    used_.insert(key);
    return table_.get(key);
  }

  bool has(const std::string& key) const { return table_.contains(key); }

  double number(const std::string& key, double fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    return as_number(n, key);
  }

  double required_number(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) fail(nullptr, key, "missing required value");
    return as_number(n, key);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    const auto v = n->value_exact<std::int64_t>();
    if (!v) fail(n, key, "expected an integer");
    if (*v < 0) fail(n, key, "must be non-negative");
    return static_cast<std::size_t>(*v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    const auto v = n->value_exact<bool>();
    if (!v) fail(n, key, "expected true or false");
    return *v;
  }

  std::optional<std::string> string(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const auto v = n->value_exact<std::string>();
    if (!v) fail(n, key, "expected a string");
    return *v;
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    return as_vec3(n, key);
  }

  Vec3 required_vec3(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) fail(nullptr, key, "missing required value");
    return as_vec3(n, key);
  }

  std::vector<std::pair<double, double>> pairs(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) fail(nullptr, key, "missing required value");
    const toml::array* arr = n->as_array();
    if (!arr || arr->empty()) fail(n, key, "expected a non-empty array of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& item : *arr) {
      const toml::array* p = item.as_array();
      if (!p || p->size() != 2) fail(&item, key, "each interval must be a [lo, hi] pair");
      out.emplace_back(as_number(p->get(0), key), as_number(p->get(1), key));
    }
    return out;
  }

  std::optional<TableReader> subtable(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::table* t = n->as_table();
    if (!t) fail(n, key, "expected a table");
    return TableReader(*t, qualified(key), source_);
  }

  void reject_unknown() const {
    for (const auto& [k, v] : table_) {
      const std::string key(k.str());
      if (!used_.count(key)) fail(&v, key, "unknown key");
    }
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& source() const { return source_; }

 private:
  double as_number(const toml::node* n, const std::string& key) const {
    const auto v = n->value<double>();
    if (!v || !(n->is_integer() || n->is_floating_point())) fail(n, key, "expected a number");
    if (!std::isfinite(*v)) fail(n, key, "must be finite");
    return *v;
  }

  Vec3 as_vec3(const toml::node* n, const std::string& key) const {
    const toml::array* arr = n->as_array();
    if (!arr || arr->size() != 3) fail(n, key, "expected an array of 3 numbers");
    return Vec3(as_number(arr->get(0), key), as_number(arr->get(1), key), as_number(arr->get(2), key));
  }

  const toml::table& table_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

Region parse_region(TableReader r, const Vec3& default_center) {
  const auto kind = r.string("kind");
  if (!kind) r.fail(nullptr, "kind", "missing region kind (\"sector\" or \"rectangle\")");
  Region out;
  if (*kind == "sector") {
    SectorRegion s;
    s.center = r.vec3("center", default_center);
    for (const auto& [lo, hi] : r.pairs("intervals")) s.intervals.push_back({lo, hi});
    s.r_min = r.required_number("r_min");
    s.r_max = r.required_number("r_max");
    out = s;
  } else if (*kind == "rectangle") {
    out = RectangleRegion{r.required_vec3("corner_a"), r.required_vec3("corner_b")};
  } else {
    r.fail(r.node("kind"), "kind", "unknown region kind '" + *kind + "'");
  }
  r.reject_unknown();
  try {
    validate_region(out);
  } catch (const InvalidInput& e) {
    r.fail(nullptr, "kind", e.what());
  }
  return out;
}

std::string default_label(const BeamformerSpec& b) {
  return std::string(to_string(b.kind)) + (b.adapted ? "_adapted" : "");
}

}  // namespace

std::vector<BeamformerSpec> default_beamformers() {
  std::vector<BeamformerSpec> out;
  for (bool adapted : {false, true})
    for (auto k : {BeamformerKind::kDS, BeamformerKind::kMVDR, BeamformerKind::kMUSIC}) {
      BeamformerSpec b;
      b.kind = k;
      b.adapted = adapted;
      b.label = default_label(b);
      out.push_back(b);
    }
  return out;
}

ArrayGeometry ScenarioConfig::geometry() const {
  if (num_elements < 2) throw ConfigError("array.elements: need at least 2 elements");
  if (!(spacing > 0.0)) throw ConfigError("array.spacing: must be positive");
  return ArrayGeometry::uniform_linear(num_elements, spacing, wavelength(), array_origin);
}

double ScenarioConfig::wavelength() const {
  if (channel == ChannelKind::kRfFreeSpace) return rf.propagation_speed / rf.frequency_hz;
  const double f = static_cast<double>(acoustic.stft.bin) * acoustic.fs / static_cast<double>(acoustic.stft.window);
  if (!(f > 0.0)) throw ConfigError("acoustic: analysis bin frequency must be positive");
  return acoustic.room.speed_of_sound / f;
}

ChannelModel ScenarioConfig::channel_model() const {
  if (channel == ChannelKind::kRfFreeSpace) return NarrowbandModel{rf.snapshots, rf.amplitude};
  return acoustic;
}

double ScenarioConfig::interferer_power() const { return std::pow(10.0, -sir_db / 10.0); }

bool ScenarioConfig::uses_variant(MapVariant v) const {
  for (const auto& b : beamformers)
    if (b.adapted && b.variant == v) return true;
  return false;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source_name << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
  TableReader r(root, "", source_name);
  ScenarioConfig cfg;

  const toml::node* schema = r.node("schema");
  if (!schema) r.fail(nullptr, "schema", "missing (expected schema = 1)");
  if (schema->value_exact<std::int64_t>() != std::int64_t{1}) r.fail(schema, "schema", "unsupported schema version");

  cfg.name = r.string("name").value_or("");
  const std::string channel = r.string("channel").value_or("rf-freespace");
  if (channel == "rf-freespace") {
    cfg.channel = ChannelKind::kRfFreeSpace;
  } else if (channel == "acoustic-image-method") {
    cfg.channel = ChannelKind::kAcousticImageMethod;
  } else {
    r.fail(r.node("channel"), "channel", "expected \"rf-freespace\" or \"acoustic-image-method\"");
  }
  const bool acoustic = cfg.channel == ChannelKind::kAcousticImageMethod;

  cfg.seed = r.count("seed", 1);
  cfg.snr_db = r.number("snr_db", cfg.snr_db);
  cfg.sir_db = r.number("sir_db", cfg.sir_db);
  cfg.eps = r.number("eps", cfg.eps);
  cfg.n_s = r.count("n_s", cfg.n_s);
  cfg.n_a = r.count("n_a", cfg.n_a);
  cfg.trials = r.count("trials", cfg.trials);
  cfg.interferer_draws = r.count("interferer_draws", cfg.interferer_draws);
  const std::string mode = r.string("interferer_mode").value_or("fixed");
  if (mode == "fixed") {
    cfg.interferer_mode = InterfererMode::kFixed;
  } else if (mode == "per-transmission") {
    cfg.interferer_mode = InterfererMode::kPerTransmission;
  } else {
    r.fail(r.node("interferer_mode"), "interferer_mode", "expected \"fixed\" or \"per-transmission\"");
  }
  cfg.interferers_adaptation = r.count("interferers_adaptation", cfg.interferers_adaptation);
  cfg.interferers_operational = r.count("interferers_operational", cfg.interferers_operational);
  cfg.desired_in_adaptation = r.boolean("desired_in_adaptation", cfg.desired_in_adaptation);

  if (auto a = r.subtable("array")) {
    cfg.num_elements = a->count("elements", cfg.num_elements);
    cfg.spacing = a->number("spacing", acoustic ? 0.12 : cfg.spacing);
    cfg.array_origin = a->vec3("origin", acoustic ? Vec3(2.0, 0.5, 1.5) : Vec3::Zero());
    a->reject_unknown();
  } else if (acoustic) {
    cfg.spacing = 0.12;
    cfg.array_origin = Vec3(2.0, 0.5, 1.5);
  }

  if (auto f = r.subtable("rf")) {
    cfg.rf.frequency_hz = f->number("frequency_hz", cfg.rf.frequency_hz);
    cfg.rf.propagation_speed = f->number("propagation_speed", cfg.rf.propagation_speed);
    cfg.rf.snapshots = f->count("snapshots", cfg.rf.snapshots);
    cfg.rf.amplitude = f->number("amplitude", cfg.rf.amplitude);
    f->reject_unknown();
  }
  cfg.acoustic.room.dimensions = Vec3(5.2, 6.2, 3.5);
  cfg.acoustic.room.reverberation_time = 0.2;
  if (auto ac = r.subtable("acoustic")) {
    auto& room = cfg.acoustic.room;
    room.dimensions = ac->vec3("room", room.dimensions);
    room.reverberation_time = ac->number("reverberation_time", room.reverberation_time);
    room.speed_of_sound = ac->number("speed_of_sound", room.speed_of_sound);
    room.air_length = ac->count("air_length", room.air_length);
    cfg.acoustic.fs = ac->number("fs", cfg.acoustic.fs);
    cfg.acoustic.signal_length = ac->count("signal_length", cfg.acoustic.signal_length);
    cfg.acoustic.stft.window = ac->count("window", cfg.acoustic.stft.window);
    cfg.acoustic.stft.hop = ac->count("hop", cfg.acoustic.stft.hop);
    cfg.acoustic.stft.bin = ac->count("bin", cfg.acoustic.stft.bin);
    ac->reject_unknown();
  }

  // Sector centres default to the array centroid.
  Vec3 centroid = cfg.array_origin + Vec3(0.5 * cfg.spacing * static_cast<double>(cfg.num_elements - 1), 0.0, 0.0);
  if (cfg.num_elements < 1) centroid = cfg.array_origin;
  if (auto t = r.subtable("roi")) {
    cfg.roi = parse_region(*t, centroid);
  } else if (acoustic) {
    cfg.roi = RectangleRegion{Vec3(0.5, 3.5, 1.5), Vec3(4.5, 5.5, 1.5)};
  } else {
    cfg.roi = SectorRegion{centroid, {{30.0, 150.0}}, 100.0, 250.0};
  }
  if (auto t = r.subtable("reference_region")) cfg.reference_region = parse_region(*t, centroid);
  if (auto t = r.subtable("interference_region")) cfg.interference_region = parse_region(*t, centroid);

  if (auto g = r.subtable("grid")) {
    cfg.grid.start_deg = g->number("start", cfg.grid.start_deg);
    cfg.grid.end_deg = g->number("end", cfg.grid.end_deg);
    cfg.grid.step_deg = g->number("step", cfg.grid.step_deg);
    cfg.refine = g->boolean("refine", cfg.refine);
    g->reject_unknown();
  }

  if (const toml::node* bn = r.node("beamformers")) {
    const toml::array* arr = bn->as_array();
    if (!arr || arr->empty()) r.fail(bn, "beamformers", "expected a non-empty array of tables");
    std::size_t idx = 0;
    for (const auto& item : *arr) {
      const toml::table* t = item.as_table();
      const std::string path = "beamformers[" + std::to_string(idx++) + "]";
      if (!t) r.fail(&item, path, "expected a table");
      TableReader br(*t, path, source_name);
      BeamformerSpec b;
      const auto kind = br.string("kind");
      if (!kind) br.fail(nullptr, "kind", "missing (ds, mvdr or music)");
      try {
        b.kind = parse_beamformer_kind(*kind);
      } catch (const InvalidInput& e) {
        br.fail(br.node("kind"), "kind", e.what());
      }
      b.adapted = br.boolean("adapted", false);
      if (auto variant = br.string("map")) {
        try {
          b.variant = parse_map_variant(*variant);
        } catch (const InvalidInput& e) {
          br.fail(br.node("map"), "map", e.what());
        }
      }
      if (br.has("signal_dim")) b.signal_dim = br.count("signal_dim", 1);
      b.label = br.string("label").value_or(default_label(b));
      br.reject_unknown();
      cfg.beamformers.push_back(b);
    }
  } else {
    cfg.beamformers = default_beamformers();
  }
  r.reject_unknown();

  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.n_s < 1) throw ConfigError("n_s: must be >= 1");
  if (cfg.n_a < 1) throw ConfigError("n_a: must be >= 1");
  if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
  if (cfg.interferer_draws < 1) throw ConfigError("interferer_draws: must be >= 1");
  if (!std::isfinite(cfg.snr_db) || !std::isfinite(cfg.sir_db)) throw ConfigError("snr_db/sir_db: must be finite");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps: must be positive");
  if (cfg.interferer_mode == InterfererMode::kFixed && cfg.interferers_adaptation != cfg.interferers_operational)
    throw ConfigError("interferers_adaptation: fixed interferers are shared by both phases, counts must match");
  if (cfg.beamformers.empty()) throw ConfigError("beamformers: at least one is required");

  try {
    validate_region(cfg.roi);
    if (cfg.reference_region) validate_region(*cfg.reference_region);
    if (cfg.interference_region) validate_region(*cfg.interference_region);
    validate_grid(cfg.grid);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (cfg.grid.start_deg < 0.0 || cfg.grid.end_deg > 180.0) throw ConfigError("grid: must lie inside [0, 180]");

  const bool acoustic = cfg.channel == ChannelKind::kAcousticImageMethod;
  auto check_kind = [&](const Region& r, const char* name) {
    const bool rect = std::holds_alternative<RectangleRegion>(r);
    if (acoustic && !rect) throw ConfigError(std::string(name) + ": acoustic scenes use rectangle regions");
    if (!acoustic && rect) throw ConfigError(std::string(name) + ": rf scenes use sector regions");
  };
  check_kind(cfg.roi, "roi");
  if (cfg.reference_region) check_kind(*cfg.reference_region, "reference_region");
  if (cfg.interference_region) check_kind(*cfg.interference_region, "interference_region");

  const ArrayGeometry geom = cfg.geometry();
  std::size_t snapshots = 0;
  if (acoustic) {
    try {
      validate_room(cfg.acoustic.room);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("acoustic: ") + e.what());
    }
    if (!(cfg.acoustic.fs > 0.0)) throw ConfigError("acoustic.fs: must be positive");
    if (cfg.acoustic.stft.hop < 1) throw ConfigError("acoustic.hop: must be >= 1");
    if (cfg.acoustic.stft.bin >= cfg.acoustic.stft.window) throw ConfigError("acoustic.bin: must be below the window length");
    if (cfg.acoustic.stft.window > cfg.acoustic.signal_length)
      throw ConfigError("acoustic.window: longer than the signal");
    snapshots = stft_frame_count(cfg.acoustic.signal_length, cfg.acoustic.stft.window, cfg.acoustic.stft.hop);
    auto inside = [&](const Vec3& p) {
      for (int a = 0; a < 3; ++a)
        if (p(a) < 0.0 || p(a) > cfg.acoustic.room.dimensions(a)) return false;
      return true;
    };
    for (const auto& p : geom.elements())
      if (!inside(p)) throw ConfigError("array: microphones must lie inside the room");
    for (const Region* r : {&cfg.roi, cfg.reference_region ? &*cfg.reference_region : nullptr,
                            cfg.interference_region ? &*cfg.interference_region : nullptr}) {
      if (!r) continue;
      const auto& rect = std::get<RectangleRegion>(*r);
      if (!inside(rect.corner_a) || !inside(rect.corner_b))
        throw ConfigError("region: rectangle corners must lie inside the room");
    }
  } else {
    if (!(cfg.rf.frequency_hz > 0.0) || !(cfg.rf.propagation_speed > 0.0))
      throw ConfigError("rf: frequency and propagation speed must be positive");
    if (cfg.rf.snapshots < 1) throw ConfigError("rf.snapshots: must be >= 1");
    snapshots = cfg.rf.snapshots;
  }

  std::set<std::string> labels;
  for (const auto& b : cfg.beamformers) {
    if (!labels.insert(b.label).second) throw ConfigError("beamformers: duplicate label '" + b.label + "'");
    if (b.adapted && b.variant == MapVariant::kInverseDomainCoral && b.kind != BeamformerKind::kMVDR)
      throw ConfigError("beamformers." + b.label + ": the inverse-domain map applies to MVDR only");
    if (b.kind == BeamformerKind::kMUSIC) {
      if (b.signal_dim && (*b.signal_dim < 1 || *b.signal_dim >= cfg.num_elements))
        throw ConfigError("beamformers." + b.label + ".signal_dim: must satisfy 1 <= k < M");
      if (!b.adapted && snapshots < cfg.num_elements)
        throw ConfigError("beamformers." + b.label + ": baseline MUSIC needs at least M snapshots");
    }
  }
}

}  // namespace steerlab
