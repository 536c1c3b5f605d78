#include "pfc/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include <fmt/format.h>

#include "pfc/fields.hpp"
#include "pfc/spectral.hpp"

namespace pfc::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T> std::optional<T> parse_number(const std::string &s) {
  T value{};
  const char *first = s.data();
  const char *last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::vector<std::string> split_ws(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream &in, const std::string &source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_no, line));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw Error(fmt::format("{}:{}: empty key", source, line_no));
    if (value.empty()) throw Error(fmt::format("{}:{}: {}: empty value", source, line_no, key));
    if (cfg.entries_.count(key))
      throw Error(fmt::format("{}:{}: {}: duplicate key (first set on line {})", source, line_no,
                              key, cfg.entries_[key].line));
    cfg.entries_[key] = Entry{value, line_no};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  return parse(in, path.string());
}

bool KeyValueConfig::has(const std::string &key) const { return entries_.count(key) > 0; }

void KeyValueConfig::fail(const std::string &key, const std::string &message) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.line == 0)
    throw Error(fmt::format("{}: {}: {}", source_, key, message));
  throw Error(fmt::format("{}:{}: {}: {}", source_, it->second.line, key, message));
}

std::string KeyValueConfig::get_string(const std::string &key,
                                       const std::optional<std::string> &def) const {
  used_[key] = true;
  const auto it = entries_.find(key);
  if (it != entries_.end()) return it->second.value;
  if (def) return *def;
  fail(key, "missing required key");
}

double KeyValueConfig::get_double(const std::string &key, const std::optional<double> &def) const {
  if (!has(key) && def) {
    used_[key] = true;
    return *def;
  }
  const std::string s = get_string(key);
  const auto v = parse_number<double>(s);
  if (!v || !std::isfinite(*v)) fail(key, "expected a finite number, got '" + s + "'");
  return *v;
}

long KeyValueConfig::get_long(const std::string &key, const std::optional<long> &def) const {
  if (!has(key) && def) {
    used_[key] = true;
    return *def;
  }
  const std::string s = get_string(key);
  const auto v = parse_number<long>(s);
  if (!v) fail(key, "expected an integer, got '" + s + "'");
  return *v;
}

bool KeyValueConfig::get_bool(const std::string &key, const std::optional<bool> &def) const {
  if (!has(key) && def) {
    used_[key] = true;
    return *def;
  }
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(key, "expected true or false, got '" + s + "'");
}

void KeyValueConfig::set(const std::string &key, const std::string &value) {
  entries_[key] = Entry{value, 0};
}

void KeyValueConfig::reject_unknown() const {
  for (const auto &[key, entry] : entries_)
    if (!used_.count(key)) fail(key, "unknown key");
}

RunConfig parse_run_config(const KeyValueConfig &cfg) {
  RunConfig rc;
  rc.dim = static_cast<int>(cfg.get_long("dim", 2));
  if (rc.dim != 2 && rc.dim != 3) cfg.fail("dim", "must be 2 or 3");
  rc.n = static_cast<int>(cfg.get_long("N", 64));
  if (rc.n < 4) cfg.fail("N", "must be >= 4");
  rc.length = cfg.get_double("L", 32.0);
  if (!(rc.length > 0.0)) cfg.fail("L", "must be positive");

  auto &p = rc.params;
  p.epsilon = cfg.get_double("epsilon", 0.25);
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) cfg.fail("epsilon", "must lie in (0, 1)");
  p.tau = cfg.get_double("tau", 0.01);
  if (!(p.tau > 0.0)) cfg.fail("tau", "must be positive");
  rc.n_steps = cfg.get_long("n_steps", 100);
  if (rc.n_steps < 0) cfg.fail("n_steps", "must be >= 0");
  rc.final_time = cfg.get_double("final_time", 1.0);
  if (!(rc.final_time > 0.0)) cfg.fail("final_time", "must be positive");

  try {
    p.policy = parse_kappa_policy(cfg.get_string("kappa_policy", std::string("lemma_adaptive")));
  } catch (const Error &e) {
    cfg.fail("kappa_policy", e.what());
  }
  p.kappa = cfg.get_double("kappa", 1.0);
  if (!(p.kappa >= 0.0)) cfg.fail("kappa", "must be >= 0");
  if (cfg.has("C2")) {
    p.C2 = cfg.get_double("C2");
    if (!(*p.C2 > 0.0)) cfg.fail("C2", "must be positive");
  }
  if (cfg.has("C3")) {
    p.C3 = cfg.get_double("C3");
    if (!(*p.C3 > 0.0)) cfg.fail("C3", "must be positive");
  }
  if (p.policy == KappaPolicy::theory && (!p.C2 || !p.C3))
    cfg.fail("kappa_policy", "theory requires C2 and C3");
  p.strict = cfg.get_bool("strict", false);
  try {
    p.nonlinear = parse_nonlinear_mode(cfg.get_string("nonlinear", std::string("full")));
  } catch (const Error &e) {
    cfg.fail("nonlinear", e.what());
  }

  const std::string ic = cfg.get_string("ic", std::string("constant_noise"));
  if (ic == "constant_noise")
    rc.ic = InitialKind::constant_noise;
  else if (ic == "single_mode")
    rc.ic = InitialKind::single_mode;
  else if (ic == "file")
    rc.ic = InitialKind::file;
  else
    cfg.fail("ic", "expected constant_noise, single_mode or file, got '" + ic + "'");
  rc.beta0 = cfg.get_double("beta0", 0.07);
  rc.delta = cfg.get_double("delta", 0.01);
  if (!(rc.delta >= 0.0)) cfg.fail("delta", "must be >= 0");
  const long seed = cfg.get_long("seed", 1);
  if (seed < 0) cfg.fail("seed", "must be >= 0");
  rc.seed = static_cast<std::uint64_t>(seed);
  if (cfg.has("mode")) {
    std::string m = cfg.get_string("mode");
    for (char &c : m)
      if (c == ',') c = ' ';
    const auto toks = split_ws(m);
    if (toks.empty() || static_cast<int>(toks.size()) > rc.dim)
      cfg.fail("mode", "expected up to dim integers");
    rc.mode = {0, 0, 0};
    for (std::size_t a = 0; a < toks.size(); ++a) {
      const auto v = parse_number<int>(toks[a]);
      if (!v) cfg.fail("mode", "expected integers, got '" + toks[a] + "'");
      rc.mode[a] = *v;
    }
  }
  rc.amplitude = cfg.get_double("amplitude", 0.1);
  rc.ic_path = cfg.get_string("ic_path", std::string());
  if (rc.ic == InitialKind::file && rc.ic_path.empty()) cfg.fail("ic_path", "required by ic = file");
  rc.ic_lowpass = static_cast<int>(cfg.get_long("ic_lowpass", -1));
  if (rc.ic_lowpass > rc.n / 2) cfg.fail("ic_lowpass", "must be <= N/2");

  rc.out_dir = cfg.get_string("out_dir", std::string("out"));
  rc.snapshot_every = cfg.get_long("snapshot_every", 0);
  if (rc.snapshot_every < 0) cfg.fail("snapshot_every", "must be >= 0");
  rc.checkpoint_every = cfg.get_long("checkpoint_every", 0);
  if (rc.checkpoint_every < 0) cfg.fail("checkpoint_every", "must be >= 0");

  cfg.reject_unknown();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  RunConfig rc = parse_run_config(KeyValueConfig::load(path));
  if (!rc.ic_path.empty() && std::filesystem::path(rc.ic_path).is_relative())
    rc.ic_path = (path.parent_path() / rc.ic_path).string();
  return rc;
}

RealField initial_field(const RunConfig &cfg) {
  const GridSpec spec = cfg.grid();
  RealField u;
  switch (cfg.ic) {
  case InitialKind::constant_noise:
    u = constant_plus_noise(spec, cfg.beta0, cfg.delta, cfg.seed);
    break;
  case InitialKind::single_mode:
    u = single_mode(spec, cfg.mode, cfg.amplitude);
    break;
  case InitialKind::file: {
    Snapshot s = read_snapshot(cfg.ic_path);
    if (!(s.field.spec() == spec))
      throw Error("initial field " + cfg.ic_path + " does not match the configured grid");
    u = std::move(s.field);
    break;
  }
  }
  if (cfg.ic_lowpass >= 0) u = lowpass(u, cfg.ic_lowpass);
  return u;
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

constexpr const char *kMagic = "PFCSNAP1";

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) return bits;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

} // namespace

void write_snapshot(const std::filesystem::path &path, const RealField &u, double epsilon,
                    double tau, long step) {
  const GridSpec &s = u.spec();
  std::string buf = std::string(kMagic) + "\n";
  buf += fmt::format("{} {} {} {} {} {} {} {}\n", s.dim, s.n, format_double(s.length),
                     format_double(epsilon), format_double(tau), step,
                     format_double(static_cast<double>(step) * tau), format_double(mean(u)));
  const std::size_t header = buf.size();
  buf.resize(header + 8 * u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(u[i]));
    std::memcpy(buf.data() + header + 8 * i, &bits, 8);
  }
  write_file_atomic(path, buf);
}

Snapshot read_snapshot(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot " + path.string());
  const std::string where = "snapshot " + path.string();
  std::string magic, header;
  if (!std::getline(in, magic) || magic != kMagic) throw Error(where + ": bad magic");
  if (!std::getline(in, header)) throw Error(where + ": missing header line");
  const auto toks = split_ws(header);
  if (toks.size() != 8) throw Error(where + ": header needs 8 fields");

  Snapshot snap;
  auto &h = snap.header;
  const auto dim = parse_number<int>(toks[0]);
  const auto n = parse_number<int>(toks[1]);
  const auto length = parse_number<double>(toks[2]);
  const auto eps = parse_number<double>(toks[3]);
  const auto tau = parse_number<double>(toks[4]);
  const auto step = parse_number<long>(toks[5]);
  const auto time = parse_number<double>(toks[6]);
  const auto mn = parse_number<double>(toks[7]);
  if (!dim || !n || !length || !eps || !tau || !step || !time || !mn)
    throw Error(where + ": malformed header '" + header + "'");
  h = SnapshotHeader{*dim, *n, *length, *eps, *tau, *step, *time, *mn};
  const GridSpec spec = GridSpec::make(h.dim, h.n, h.length);

  std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() != 8 * spec.size())
    throw Error(fmt::format("{}: payload has {} bytes, header implies {}", where, payload.size(),
                            8 * spec.size()));
  std::vector<double> values(spec.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, payload.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(bits));
  }
  snap.field = RealField(spec, std::move(values));
  return snap;
}

std::string csv_row(const TraceRecord &r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", r.step, format_double(r.time),
                     format_double(r.energy.total), format_double(r.energy.quartic),
                     format_double(r.energy.quadratic), format_double(r.energy.gradient),
                     format_double(r.energy.biharmonic), format_double(r.mass),
                     format_double(r.linf), format_double(r.lap_norm), format_double(r.kappa));
}

} // namespace pfc::io
