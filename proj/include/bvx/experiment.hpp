#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bvx/grid.hpp"

namespace bvx::experiment {

enum class InputClass { haar, random_smooth, spike, lacunary, random, zero };

/// Names as used on the command line: haar, random-smooth, spike, lacunary,
/// random, zero. Throws ConfigError for anything else.
[[nodiscard]] InputClass parse_input_class(std::string_view name);
[[nodiscard]] std::string_view name(InputClass c);

/// Deterministic per (class, n, depth, seed, k):
///   haar           eight Haar functions on random cubes with N(0,1) weights
///   random-smooth  four random low frequencies plus up to three jumps, sampled
///                  at cell centers, so the data do not depend on depth
///   spike          one random cell of height 2^{nJ/2}, zero elsewhere
///   lacunary       the k-generation lacunary sum (n = 1, k < depth)
///   random         iid N(0,1) with the mean removed
///   zero           g = 0
[[nodiscard]] GridFunction generate_input(InputClass c, int n, int depth, std::uint64_t seed, int k = 3);

/// Field names match the key = value config format and the CLI flags.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    int n = 1;
    int depth = 8;
    int skip = 4;
    double p = 2.0;
    double eps = 0.5;
    int iterations = 10;        // K, Thm-1 iteration count
    double threshold = 2.0;     // principal-cube threshold A
    double eta = 0.0;           // 0 selects (eps / 10)^{1/holder}
    double aperture = 1.0;
    double aperture_alt = 2.0;  // second aperture of the functionals ratios
    std::string backend = "poisson";
    InputClass input = InputClass::random;
    int k = 3;
    int k_min = 2;
    int k_max = 8;
    int trials = 1;
    double density = 0.1;       // random stopping families
    bool iterate = false;
    std::string output = "bvextend_out";

    /// Throws ConfigError naming the field.
    void validate() const;
    /// One "key = value" line per field, in declaration order.
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

/// Applies "key = value" lines onto `base`; '#' starts a comment. Unknown keys
/// and malformed values throw ConfigError naming the key and line.
[[nodiscard]] ExperimentConfig read_config(std::istream& in, ExperimentConfig base = {});
/// Sets a single field from its textual value.
void set_field(ExperimentConfig& cfg, std::string_view key, std::string_view value);

[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes);

/// Worker count: hardware concurrency capped by BVEXTEND_THREADS when set.
[[nodiscard]] unsigned worker_count();

/// Runs job(0..count-1) on up to `workers` threads. Results are stored by
/// trial id, so the output does not depend on scheduling. The first
/// exception thrown by a job is rethrown after all workers stop.
template <class R>
[[nodiscard]] std::vector<R> run_trials(std::size_t count, unsigned workers, const std::function<R(std::size_t)>& job);

struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_number(double v);

/// Writes the table with a leading config_hash column.
void write_csv(std::ostream& out, const CsvTable& table, std::string_view config_hash);

struct RunOutput {
    std::string json;  // schema-versioned summary
    std::vector<CsvTable> tables;
    bool contracts_ok = true;
};

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] RunOutput run_extend(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_trace(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_square(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_counterexample(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_elliptic(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_functionals(const ExperimentConfig& cfg);
[[nodiscard]] RunOutput run_verify(const ExperimentConfig& cfg);

/// Dispatch by subcommand name; throws ConfigError for an unknown one.
[[nodiscard]] RunOutput run(std::string_view subcommand, const ExperimentConfig& cfg);

/// Writes <output>/<subcommand>.json and <output>/<subcommand>_<table>.csv.
void write_artifacts(const RunOutput& out, std::string_view subcommand, const ExperimentConfig& cfg);

}  // namespace bvx::experiment

#include "bvx/experiment_impl.hpp"
