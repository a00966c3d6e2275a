#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tnet/linalg.hpp"
#include "tnet/mps.hpp"

namespace tnet {

enum class RunMode { standard, augmented, both };

std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

// Full description of one benchmark experiment. Empty max_bond_dims or
// tau_grid mean the defaults derived from n_sites and t_final.
struct ExperimentConfig {
    int n_sites = 6;
    double coupling = 1.0;  // in-plane exchange J; the z coupling is J * delta
    double delta = 1.2;
    std::uint64_t seed = 1;
    Eigen::Index init_bond_dim = 2;
    std::vector<Eigen::Index> max_bond_dims;
    double gamma_site_factor = 1e-3;
    double t_final = 0.125;
    std::vector<double> tau_grid;
    RunMode mode = RunMode::both;
    std::filesystem::path output_dir = "bench-out";
    int workers = 1;
    bool save_states = false;
    // Local-solve settings for every evolution in the experiment.
    KrylovParams krylov{40, 1e-13, true};
    // Row cap for the dense reference; bounds n_sites.
    Eigen::Index dense_cap = 729;
};

// Bond profile (1, 9, 81, ...) growing by the per-site operator-space factor
// 9 and capped at 81, mirrored around the center.
std::vector<Eigen::Index> default_max_bond_dims(int n_sites);

// t_final * {1/4, 1/8, 1/16, 1/32, 1/64}.
std::vector<double> default_tau_grid(double t_final);

// Copy with empty list fields replaced by their defaults.
ExperimentConfig finalize_config(const ExperimentConfig& cfg);

// Rejects invalid configurations with std::invalid_argument before any
// compute: bad sizes, non-dividing tau values, insufficient padding capacity
// for the conserved-operator train, dense cap overflow.
void validate_config(const ExperimentConfig& cfg);

// One (tau, mode) evolution compared against the dense reference.
struct RunRecord {
    double tau = 0.0;
    std::string mode;
    double rel_energy_error = 0.0;
    double trace_distance_to_exact = 0.0;
    double norm_drift = 0.0;
    double superop_energy_drift = 0.0;
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;   // integrator failure; error fields are then meaningless
    std::string error;
};

struct SummaryReport {
    std::vector<double> taus;  // descending
    // standard / augmented per tau; empty unless both modes are present
    std::vector<double> trace_distance_ratios;
    std::vector<double> energy_error_ratios;
    // log-log slope of trace distance vs tau; NaN when a mode lacks enough
    // usable records
    double slope_standard = 0.0;
    double slope_augmented = 0.0;
    double max_norm_drift = 0.0;
    double max_superop_energy_drift = 0.0;
    std::vector<std::string> failures;
};

struct ExperimentOutput {
    std::vector<RunRecord> records;
    SummaryReport summary;
    std::filesystem::path results_csv;
    std::filesystem::path schmidt_csv;
    std::filesystem::path manifest_file;
    std::filesystem::path summary_file;
    std::filesystem::path summary_csv;
};

// Runs the full experiment: builds the model operators and the random initial
// purified operator (bond dimension init_bond_dim, zero-padded to
// max_bond_dims, left-normalized), computes the dense exact reference at
// t_final once (cached on disk under output_dir, keyed by the generating
// parameters), evolves for every (tau, mode) pair up to `workers` at a time,
// and writes results.csv, schmidt.csv, a manifest usable as a --config file,
// and the summary. Integrator failures are recorded per run and do not stop
// the remaining runs.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Least-squares slope of log(trace_distance) vs log(tau) over the usable
// records, which must belong to one mode, span at least a factor 4 in tau,
// and number at least 3.
double fit_convergence_order(const std::vector<RunRecord>& records);

// Ratios, slopes, drift maxima and failure list for a finished record set.
SummaryReport summarize(const std::vector<RunRecord>& records);

std::string summary_text(const SummaryReport& report);

// results.csv schema, in this exact column order:
// tau,mode,rel_energy_error,trace_distance,norm_drift,superop_energy_drift,
// wall_time_seconds,seed with floats at 17 significant digits. Failed runs
// are excluded (they appear in the summary and the manifest instead).
void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records);

// schmidt.csv: time_label,index,coefficient rows for the t = 0 and t = t_final
// exact spectra, then one entropy row per time with index 0.
void write_schmidt_csv(std::ostream& os, const SchmidtSpectrum& t0, double entropy_t0,
                       const SchmidtSpectrum& t_final, double entropy_t_final);

// Key-value manifest matching the CLI flag names, so the file can be fed back
// through --config to reproduce the experiment.
void write_manifest(std::ostream& os, const ExperimentConfig& cfg,
                    const std::vector<RunRecord>& records);

void write_summary_csv(std::ostream& os, const SummaryReport& report);

}  // namespace tnet
