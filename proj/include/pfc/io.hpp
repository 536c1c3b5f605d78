#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfc/grid.hpp"
#include "pfc/scheme.hpp"

namespace pfc::io {

// Flat `key = value` file, `#` starts a comment. Lookups remember which keys
// were used so unknown keys can be reported.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream &in, const std::string &source);
  static KeyValueConfig load(const std::filesystem::path &path);

  bool has(const std::string &key) const;
  std::string get_string(const std::string &key, const std::optional<std::string> &def = {}) const;
  double get_double(const std::string &key, const std::optional<double> &def = {}) const;
  long get_long(const std::string &key, const std::optional<long> &def = {}) const;
  bool get_bool(const std::string &key, const std::optional<bool> &def = {}) const;

  void set(const std::string &key, const std::string &value);
  // throws on the first key never looked up
  void reject_unknown() const;

  // "source:line: key: message"
  [[noreturn]] void fail(const std::string &key, const std::string &message) const;

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, bool> used_;
};

enum class InitialKind { constant_noise, single_mode, file };

struct RunConfig {
  int dim = 2;
  int n = 64;
  double length = 32.0;
  SchemeParams params;
  long n_steps = 100;
  double final_time = 1.0; // order study only

  InitialKind ic = InitialKind::constant_noise;
  double beta0 = 0.07;
  double delta = 0.01;
  std::uint64_t seed = 1;
  std::array<int, 3> mode{1, 0, 0};
  double amplitude = 0.1;
  std::string ic_path;
  int ic_lowpass = -1; // >= 0: lowpass the initial field at this cutoff

  std::filesystem::path out_dir = "out";
  long snapshot_every = 0;
  long checkpoint_every = 0;

  GridSpec grid() const { return GridSpec::make(dim, n, length); }
};

RunConfig parse_run_config(const KeyValueConfig &cfg);
RunConfig load_run_config(const std::filesystem::path &path);

RealField initial_field(const RunConfig &cfg);

// Snapshot file: "PFCSNAP1\n", one header line
// "dim N L epsilon tau step time mean\n" (decimal, 17 significant digits),
// then N^dim float64 little-endian values in RealField order.
struct SnapshotHeader {
  int dim = 2;
  int n = 0;
  double length = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  long step = 0;
  double time = 0.0;
  double mean = 0.0;
};

struct Snapshot {
  SnapshotHeader header;
  RealField field;
};

void write_snapshot(const std::filesystem::path &path, const RealField &u, double epsilon,
                    double tau, long step);
Snapshot read_snapshot(const std::filesystem::path &path);

inline constexpr const char *kCsvHeader =
    "step,time,energy,quartic,quadratic,gradient,biharmonic,mass,linf,h2norm,kappa";

std::string csv_row(const TraceRecord &r);

// %.17g
std::string format_double(double x);

// Writes path via a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

} // namespace pfc::io
