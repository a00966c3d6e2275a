#include "tnet/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tnet/ed.hpp"
#include "tnet/errors.hpp"
#include "tnet/mpo.hpp"
#include "tnet/tdvp.hpp"

namespace tnet {

namespace {

constexpr int kPurifiedDim = 9;        // 3 x 3 operator entries per site
constexpr Eigen::Index kGuestBond = 5; // interior bond of the conserved train

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string join_indices(const std::vector<Eigen::Index>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(static_cast<long long>(v[i]));
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += g17(v[i]);
    }
    return out;
}

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        const unsigned char* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    template <typename T>
    void value(T v) {
        bytes(&v, sizeof(v));
    }
};

// Identifies the dense reference: everything that determines O(0) and the
// exact propagation, nothing that only affects the approximate runs.
std::uint64_t reference_key(const ExperimentConfig& cfg) {
    Fnv1a f;
    const char* tag = "xxz-heisenberg-reference-v1";
    f.bytes(tag, std::strlen(tag));
    f.value(cfg.n_sites);
    f.value(cfg.coupling);
    f.value(cfg.delta);
    f.value(cfg.seed);
    f.value(static_cast<std::int64_t>(cfg.init_bond_dim));
    for (Eigen::Index d : cfg.max_bond_dims) f.value(static_cast<std::int64_t>(d));
    f.value(cfg.t_final);
    f.value(static_cast<std::int64_t>(cfg.dense_cap));
    return f.h;
}

std::filesystem::path reference_path(const ExperimentConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(reference_key(cfg)));
    return cfg.output_dir / (std::string("reference-") + buf + ".bin");
}

bool load_reference(const std::filesystem::path& path, Eigen::Index dim,
                    ComplexMatrix& out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "TNETREF1", 8) != 0) return false;
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    if (!is || rows != static_cast<std::uint64_t>(dim) || cols != rows) return false;
    out.resize(dim, dim);
    is.read(reinterpret_cast<char*>(out.data()),
            static_cast<std::streamsize>(sizeof(Complex) * dim * dim));
    if (!is) return false;
    is.peek();
    return is.eof();
}

void store_reference(const std::filesystem::path& path, const ComplexMatrix& m) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("run_experiment: cannot write " + path.string());
    os.write("TNETREF1", 8);
    std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    os.write(reinterpret_cast<const char*>(&rows), 8);
    os.write(reinterpret_cast<const char*>(&cols), 8);
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(Complex) * m.size()));
    if (!os) throw std::runtime_error("run_experiment: write failed for " + path.string());
}

int steps_for(double t_final, double tau) {
    return static_cast<int>(std::llround(t_final / tau));
}

double drift_from(const std::vector<double>& values, double floor_scale) {
    if (values.size() < 2) return 0.0;
    double base = values.front();
    double denom = std::max(std::abs(base), floor_scale);
    double worst = 0.0;
    for (double v : values) worst = std::max(worst, std::abs(v - base));
    return worst / denom;
}

}  // namespace

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::standard: return "standard";
        case RunMode::augmented: return "augmented";
        case RunMode::both: return "both";
    }
    throw std::invalid_argument("to_string: bad RunMode");
}

RunMode parse_run_mode(const std::string& s) {
    if (s == "standard") return RunMode::standard;
    if (s == "augmented") return RunMode::augmented;
    if (s == "both") return RunMode::both;
    throw std::invalid_argument("parse_run_mode: expected standard, augmented or both, got '" + s + "'");
}

std::vector<Eigen::Index> default_max_bond_dims(int n_sites) {
    if (n_sites < 2) throw std::invalid_argument("default_max_bond_dims: n_sites must be >= 2");
    std::vector<Eigen::Index> dims(static_cast<std::size_t>(n_sites) + 1);
    for (int k = 0; k <= n_sites; ++k) {
        int depth = std::min(k, n_sites - k);
        Eigen::Index d = 1;
        for (int i = 0; i < depth && d < 81; ++i) d = std::min<Eigen::Index>(d * kPurifiedDim, 81);
        dims[static_cast<std::size_t>(k)] = d;
    }
    return dims;
}

std::vector<double> default_tau_grid(double t_final) {
    return {t_final / 4.0, t_final / 8.0, t_final / 16.0, t_final / 32.0, t_final / 64.0};
}

ExperimentConfig finalize_config(const ExperimentConfig& cfg) {
    ExperimentConfig out = cfg;
    if (out.max_bond_dims.empty()) out.max_bond_dims = default_max_bond_dims(out.n_sites);
    if (out.tau_grid.empty()) out.tau_grid = default_tau_grid(out.t_final);
    return out;
}

void validate_config(const ExperimentConfig& cfg_in) {
    const ExperimentConfig cfg = finalize_config(cfg_in);
    if (cfg.n_sites < 2) throw std::invalid_argument("config: n_sites must be >= 2");
    if (!std::isfinite(cfg.coupling) || !std::isfinite(cfg.delta))
        throw std::invalid_argument("config: couplings must be finite");
    if (!std::isfinite(cfg.t_final) || cfg.t_final <= 0.0)
        throw std::invalid_argument("config: t_final must be positive and finite");
    if (cfg.init_bond_dim < 1) throw std::invalid_argument("config: init_bond_dim must be >= 1");
    if (!std::isfinite(cfg.gamma_site_factor) || cfg.gamma_site_factor < 0.0)
        throw std::invalid_argument("config: gamma_site_factor must be >= 0 and finite");
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (cfg.output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
    if (cfg.krylov.max_dim < 2 || !(cfg.krylov.tol > 0.0))
        throw std::invalid_argument("config: krylov settings must have max_dim >= 2 and tol > 0");

    if (cfg.dense_cap < 1) throw std::invalid_argument("config: dense_cap must be >= 1");
    Eigen::Index rows = 1;
    for (int i = 0; i < cfg.n_sites; ++i) {
        rows *= 3;
        if (rows > cfg.dense_cap)
            throw std::invalid_argument("config: 3^n_sites exceeds the dense reference cap; "
                                        "the exact comparison needs n_sites <= " +
                                        std::to_string(static_cast<long long>(cfg.dense_cap)) +
                                        " rows");
    }

    const auto& dims = cfg.max_bond_dims;
    if (dims.size() != static_cast<std::size_t>(cfg.n_sites) + 1)
        throw std::invalid_argument("config: max_bond_dims needs n_sites + 1 entries");
    if (dims.front() != 1 || dims.back() != 1)
        throw std::invalid_argument("config: max_bond_dims must start and end at 1");
    Eigen::Index min_interior = std::numeric_limits<Eigen::Index>::max();
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (dims[k] < 1) throw std::invalid_argument("config: max_bond_dims entries must be >= 1");
        if (k > 0) {
            // Both canonical sweeps must be able to hold the profile.
            if (dims[k] > kPurifiedDim * dims[k - 1] || dims[k - 1] > kPurifiedDim * dims[k])
                throw std::invalid_argument("config: max_bond_dims grows faster than the local "
                                            "dimension allows between bonds " +
                                            std::to_string(k - 1) + " and " + std::to_string(k));
        }
        if (k > 0 && k < dims.size() - 1) min_interior = std::min(min_interior, dims[k]);
    }
    if (cfg.init_bond_dim + kGuestBond > min_interior)
        throw std::invalid_argument("config: init_bond_dim + " +
                                    std::to_string(static_cast<long long>(kGuestBond)) +
                                    " must fit in every interior max bond so the conserved "
                                    "train can ride in the padding");

    if (cfg.tau_grid.empty()) throw std::invalid_argument("config: tau_grid must not be empty");
    for (double tau : cfg.tau_grid) {
        if (!std::isfinite(tau) || tau <= 0.0)
            throw std::invalid_argument("config: every tau must be positive and finite");
        int steps = steps_for(cfg.t_final, tau);
        if (steps < 1 || std::abs(steps * tau - cfg.t_final) > 1e-12)
            throw std::invalid_argument("config: tau " + g17(tau) +
                                        " does not divide t_final to 1e-12");
    }
}

double fit_convergence_order(const std::vector<RunRecord>& records) {
    std::vector<const RunRecord*> usable;
    for (const auto& r : records)
        if (!r.failed) usable.push_back(&r);
    if (usable.size() < 3)
        throw std::invalid_argument("fit_convergence_order: need at least 3 usable records");
    for (const auto* r : usable) {
        if (r->mode != usable.front()->mode)
            throw std::invalid_argument("fit_convergence_order: records must share one mode");
        if (!(r->trace_distance_to_exact > 0.0) || !(r->tau > 0.0))
            throw std::invalid_argument("fit_convergence_order: tau and trace distance must be positive");
    }
    double tau_min = usable.front()->tau, tau_max = tau_min;
    for (const auto* r : usable) {
        tau_min = std::min(tau_min, r->tau);
        tau_max = std::max(tau_max, r->tau);
    }
    if (tau_max < 4.0 * tau_min * (1.0 - 1e-12))
        throw std::invalid_argument("fit_convergence_order: tau values must span a factor >= 4");
    double sx = 0, sy = 0;
    for (const auto* r : usable) {
        sx += std::log(r->tau);
        sy += std::log(r->trace_distance_to_exact);
    }
    double mx = sx / static_cast<double>(usable.size());
    double my = sy / static_cast<double>(usable.size());
    double num = 0, den = 0;
    for (const auto* r : usable) {
        double dx = std::log(r->tau) - mx;
        num += dx * (std::log(r->trace_distance_to_exact) - my);
        den += dx * dx;
    }
    return num / den;
}

SummaryReport summarize(const std::vector<RunRecord>& records) {
    SummaryReport rep;
    rep.slope_standard = nan_value();
    rep.slope_augmented = nan_value();

    std::vector<RunRecord> standard, augmented;
    for (const auto& r : records) {
        if (r.failed) {
            rep.failures.push_back("tau=" + g6(r.tau) + " mode=" + r.mode + ": " + r.error);
            continue;
        }
        if (r.mode == "standard") standard.push_back(r);
        else if (r.mode == "augmented") augmented.push_back(r);
        rep.max_norm_drift = std::max(rep.max_norm_drift, r.norm_drift);
        rep.max_superop_energy_drift =
            std::max(rep.max_superop_energy_drift, r.superop_energy_drift);
        if (std::find(rep.taus.begin(), rep.taus.end(), r.tau) == rep.taus.end())
            rep.taus.push_back(r.tau);
    }
    std::sort(rep.taus.begin(), rep.taus.end(), std::greater<double>());

    try {
        rep.slope_standard = fit_convergence_order(standard);
    } catch (const std::invalid_argument&) {
    }
    try {
        rep.slope_augmented = fit_convergence_order(augmented);
    } catch (const std::invalid_argument&) {
    }

    if (!standard.empty() && !augmented.empty()) {
        for (double tau : rep.taus) {
            auto find = [tau](const std::vector<RunRecord>& v) -> const RunRecord* {
                for (const auto& r : v)
                    if (r.tau == tau) return &r;
                return nullptr;
            };
            const RunRecord* s = find(standard);
            const RunRecord* a = find(augmented);
            if (s && a && a->trace_distance_to_exact > 0.0)
                rep.trace_distance_ratios.push_back(s->trace_distance_to_exact /
                                                    a->trace_distance_to_exact);
            else
                rep.trace_distance_ratios.push_back(nan_value());
            if (s && a && a->rel_energy_error > 0.0)
                rep.energy_error_ratios.push_back(s->rel_energy_error / a->rel_energy_error);
            else
                rep.energy_error_ratios.push_back(nan_value());
        }
    }
    return rep;
}

std::string summary_text(const SummaryReport& rep) {
    std::ostringstream os;
    os << "benchmark summary\n";
    os << "  fitted order (trace distance vs tau): standard " << g6(rep.slope_standard)
       << ", augmented " << g6(rep.slope_augmented) << "\n";
    if (!rep.trace_distance_ratios.empty()) {
        os << "  standard/augmented ratios per tau:\n";
        for (std::size_t i = 0; i < rep.taus.size(); ++i) {
            os << "    tau=" << g6(rep.taus[i]) << "  trace_distance "
               << g6(rep.trace_distance_ratios[i]) << "  rel_energy_error "
               << g6(rep.energy_error_ratios[i]) << "\n";
        }
    }
    os << "  max norm drift: " << g6(rep.max_norm_drift) << "\n";
    os << "  max superoperator energy drift: " << g6(rep.max_superop_energy_drift) << "\n";
    if (rep.failures.empty()) {
        os << "  failures: none\n";
    } else {
        os << "  failures:\n";
        for (const auto& f : rep.failures) os << "    " << f << "\n";
    }
    return os.str();
}

void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << "tau,mode,rel_energy_error,trace_distance,norm_drift,"
          "superop_energy_drift,wall_time_seconds,seed\n";
    for (const auto& r : records) {
        if (r.failed) continue;
        os << g17(r.tau) << ',' << r.mode << ',' << g17(r.rel_energy_error) << ','
           << g17(r.trace_distance_to_exact) << ',' << g17(r.norm_drift) << ','
           << g17(r.superop_energy_drift) << ',' << g17(r.wall_time_seconds) << ','
           << static_cast<unsigned long long>(r.seed) << '\n';
    }
}

void write_schmidt_csv(std::ostream& os, const SchmidtSpectrum& t0, double entropy_t0,
                       const SchmidtSpectrum& t_final, double entropy_t_final) {
    os << "time_label,index,coefficient\n";
    for (Eigen::Index i = 0; i < t0.coefficients.size(); ++i)
        os << "t0," << (i + 1) << ',' << g17(t0.coefficients[i]) << '\n';
    for (Eigen::Index i = 0; i < t_final.coefficients.size(); ++i)
        os << "t_final," << (i + 1) << ',' << g17(t_final.coefficients[i]) << '\n';
    os << "t0_entropy,0," << g17(entropy_t0) << '\n';
    os << "t_final_entropy,0," << g17(entropy_t_final) << '\n';
}

void write_manifest(std::ostream& os, const ExperimentConfig& cfg_in,
                    const std::vector<RunRecord>& records) {
    const ExperimentConfig cfg = finalize_config(cfg_in);
    os << "# tnet-xxz-bench manifest; feed back through --config to reproduce\n";
    os << "sites=" << cfg.n_sites << '\n';
    os << "coupling=" << g17(cfg.coupling) << '\n';
    os << "delta=" << g17(cfg.delta) << '\n';
    os << "seed=" << static_cast<unsigned long long>(cfg.seed) << '\n';
    os << "init-bond-dim=" << static_cast<long long>(cfg.init_bond_dim) << '\n';
    // comma lists are quoted so config parsers keep them as single values
    os << "max-bond-dims=\"" << join_indices(cfg.max_bond_dims) << "\"\n";
    os << "gamma-site-factor=" << g17(cfg.gamma_site_factor) << '\n';
    os << "t-final=" << g17(cfg.t_final) << '\n';
    os << "tau-grid=\"" << join_doubles(cfg.tau_grid) << "\"\n";
    os << "mode=" << to_string(cfg.mode) << '\n';
    os << "output-dir=" << cfg.output_dir.string() << '\n';
    os << "workers=" << cfg.workers << '\n';
    if (cfg.save_states) os << "save-states=true\n";
    for (const auto& r : records) {
        if (r.failed)
            os << "# failed: tau=" << g17(r.tau) << " mode=" << r.mode << " " << r.error << '\n';
    }
}

void write_summary_csv(std::ostream& os, const SummaryReport& rep) {
    os << "metric,mode,tau,value\n";
    os << "fitted_order,standard,," << g17(rep.slope_standard) << '\n';
    os << "fitted_order,augmented,," << g17(rep.slope_augmented) << '\n';
    for (std::size_t i = 0; i < rep.trace_distance_ratios.size(); ++i) {
        os << "trace_distance_ratio,both," << g17(rep.taus[i]) << ','
           << g17(rep.trace_distance_ratios[i]) << '\n';
        os << "energy_error_ratio,both," << g17(rep.taus[i]) << ','
           << g17(rep.energy_error_ratios[i]) << '\n';
    }
    os << "max_norm_drift,all,," << g17(rep.max_norm_drift) << '\n';
    os << "max_superop_energy_drift,all,," << g17(rep.max_superop_energy_drift) << '\n';
    os << "failures,all,," << rep.failures.size() << '\n';
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg_in) {
    const ExperimentConfig cfg = finalize_config(cfg_in);
    validate_config(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    XxzCouplings couplings{cfg.coupling, cfg.delta};
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(cfg.n_sites, couplings);
    const MpoTensorTrain w = build_commutator_superoperator(h);

    std::vector<Eigen::Index> init_bonds(static_cast<std::size_t>(cfg.n_sites) + 1,
                                         cfg.init_bond_dim);
    init_bonds.front() = init_bonds.back() = 1;
    MpsTensorTrain o0 = random_gaussian_mps(cfg.n_sites, kPurifiedDim, init_bonds, cfg.seed);
    o0 = pad_bond_dims(o0, cfg.max_bond_dims);

    const CanonicalResult standard_init = left_normalize(o0);
    const AugmentedState augmented_init =
        make_augmented_state(o0, h, cfg.gamma_site_factor);

    const ComplexMatrix h_dense = mpo_to_dense(h, cfg.dense_cap);
    const ComplexMatrix o0_dense = mpo_to_dense(purified_mps_to_mpo(o0), cfg.dense_cap);

    ComplexMatrix exact;
    const std::filesystem::path ref_path = reference_path(cfg);
    if (!load_reference(ref_path, o0_dense.rows(), exact)) {
        exact = dense_evolve(h_dense, o0_dense, cfg.t_final);
        store_reference(ref_path, exact);
    }

    const int cut = cfg.n_sites / 2;
    const SchmidtSpectrum spec_t0 = dense_schmidt_spectrum(o0_dense, cfg.n_sites, cut);
    const SchmidtSpectrum spec_tf = dense_schmidt_spectrum(exact, cfg.n_sites, cut);

    struct RunSpec {
        double tau;
        bool augmented;
    };
    std::vector<RunSpec> specs;
    for (double tau : cfg.tau_grid) {
        if (cfg.mode != RunMode::augmented) specs.push_back({tau, false});
        if (cfg.mode != RunMode::standard) specs.push_back({tau, true});
    }

    std::vector<RunRecord> records(specs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto do_run = [&](std::size_t i) {
        const RunSpec& spec = specs[i];
        RunRecord rec;
        rec.tau = spec.tau;
        rec.mode = spec.augmented ? "augmented" : "standard";
        rec.seed = cfg.seed;
        TdvpRunParams params;
        params.tau = spec.tau;
        params.n_steps = steps_for(cfg.t_final, spec.tau);
        params.krylov = cfg.krylov;
        try {
            const auto wall_start = std::chrono::steady_clock::now();
            MpsTensorTrain final_train;
            ObservableTrace trace;
            if (spec.augmented) {
                final_train = augmented_evolve(augmented_init, w, params, &trace);
            } else {
                EvolveResult res = evolve(standard_init.train, w, params);
                trace = std::move(res.trace);
                final_train = scale_global(res.final_state, Complex(standard_init.norm, 0.0));
            }
            rec.wall_time_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
                    .count();

            const ComplexMatrix final_dense =
                mpo_to_dense(purified_mps_to_mpo(final_train), cfg.dense_cap);
            rec.trace_distance_to_exact = trace_distance(final_dense, exact);
            rec.rel_energy_error = relative_energy_error(h_dense, o0_dense, final_dense).value;
            rec.norm_drift = drift_from(trace.norms, 0.0);
            std::vector<double> energies(trace.superop_energies.size());
            for (std::size_t k = 0; k < energies.size(); ++k)
                energies[k] = trace.superop_energies[k].real();
            rec.superop_energy_drift = drift_from(energies, 1e-12);

            if (cfg.save_states) {
                auto it = std::find(cfg.tau_grid.begin(), cfg.tau_grid.end(), spec.tau);
                auto ti = static_cast<std::size_t>(it - cfg.tau_grid.begin());
                std::string name = "state-" + rec.mode + "-tau" + std::to_string(ti) + ".mps";
                save_mps(cfg.output_dir / name, final_train);
            }
        } catch (const IntegratorError& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        records[i] = std::move(rec);
    };

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            try {
                do_run(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int n_workers = std::min<int>(cfg.workers, static_cast<int>(specs.size()));
    n_workers = std::max(n_workers, 1);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentOutput out;
    out.records = std::move(records);
    out.summary = summarize(out.records);

    out.results_csv = cfg.output_dir / "results.csv";
    {
        std::ofstream os(out.results_csv, std::ios::trunc);
        if (!os) throw std::runtime_error("run_experiment: cannot write " + out.results_csv.string());
        write_results_csv(os, out.records);
    }
    out.schmidt_csv = cfg.output_dir / "schmidt.csv";
    {
        std::ofstream os(out.schmidt_csv, std::ios::trunc);
        if (!os) throw std::runtime_error("run_experiment: cannot write " + out.schmidt_csv.string());
        write_schmidt_csv(os, spec_t0, von_neumann_entropy(spec_t0), spec_tf,
                          von_neumann_entropy(spec_tf));
    }
    out.manifest_file = cfg.output_dir / "manifest.conf";
    {
        std::ofstream os(out.manifest_file, std::ios::trunc);
        if (!os) throw std::runtime_error("run_experiment: cannot write " + out.manifest_file.string());
        write_manifest(os, cfg, out.records);
    }
    out.summary_file = cfg.output_dir / "summary.txt";
    {
        std::ofstream os(out.summary_file, std::ios::trunc);
        if (!os) throw std::runtime_error("run_experiment: cannot write " + out.summary_file.string());
        os << summary_text(out.summary);
    }
    out.summary_csv = cfg.output_dir / "summary.csv";
    {
        std::ofstream os(out.summary_csv, std::ios::trunc);
        if (!os) throw std::runtime_error("run_experiment: cannot write " + out.summary_csv.string());
        write_summary_csv(os, out.summary);
    }
    return out;
}

}  // namespace tnet
