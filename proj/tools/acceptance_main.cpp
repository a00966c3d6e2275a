// Full verification suite for the Heisenberg-picture TDVP library: prints one
// pass/fail line per criterion and exits nonzero if any fails. The sweep-based
// criteria share three full-size benchmark runs, so a complete pass takes on
// the order of an hour of single-core time.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "tnet/bench.hpp"
#include "tnet/ed.hpp"
#include "tnet/linalg.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"
#include "tnet/tdvp.hpp"

namespace {

using namespace tnet;

std::string g3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Tally {
    int passed = 0;
    int total = 0;
    void report(int id, bool ok, const std::string& what, const std::string& detail) {
        ++total;
        if (ok) ++passed;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ": " << what << "\n";
        if (!detail.empty()) std::cout << "         " << detail << "\n";
        std::cout.flush();
    }
};

ComplexVector purified_vector(const MpoTensorTrain& op) {
    return to_dense_vector(mpo_to_purified_mps(op));
}

std::vector<Eigen::Index> uniform_bonds(int n_sites, Eigen::Index b) {
    std::vector<Eigen::Index> bonds(static_cast<std::size_t>(n_sites) + 1, b);
    bonds.front() = bonds.back() = 1;
    return bonds;
}

// 1: dense action of the superoperator equals -[H, O]; it annihilates |H>.
void criterion_superoperator(Tally& t) {
    try {
        double worst_action = 0.0, worst_annihilation = 0.0;
        for (int n : {3, 4}) {
            XxzCouplings c;
            const MpoTensorTrain h = build_xxz_spin1_hamiltonian(n, c);
            const MpoTensorTrain w = build_commutator_superoperator(h);
            const MpsTensorTrain o = random_gaussian_mps(n, 9, uniform_bonds(n, 4), 7);

            const ComplexVector lhs_vec = mpo_apply_dense_vector(w, to_dense_vector(o));
            const ComplexMatrix lhs = purified_vector_to_dense(lhs_vec, n, 3);
            const ComplexMatrix hd = mpo_to_dense(h);
            const ComplexMatrix od = mpo_to_dense(purified_mps_to_mpo(o));
            const ComplexMatrix rhs = -(hd * od - od * hd);
            worst_action = std::max(worst_action, (lhs - rhs).norm() / rhs.norm());

            const ComplexVector wh = mpo_apply_dense_vector(w, purified_vector(h));
            worst_annihilation =
                std::max(worst_annihilation,
                         wh.norm() / (mpo_frobenius_norm(w) * mpo_frobenius_norm(h)));
        }
        bool ok = worst_action < 1e-12 && worst_annihilation < 1e-12;
        t.report(1, ok, "superoperator acts as -[H,O] and annihilates the conserved train",
                 "action residual " + g3(worst_action) + ", annihilation residual " +
                     g3(worst_annihilation) + " (tolerance 1e-12, N = 3, 4)");
    } catch (const std::exception& e) {
        t.report(1, false, "superoperator acts as -[H,O] and annihilates the conserved train",
                 std::string("exception: ") + e.what());
    }
}

// 2: current operators satisfy the discrete continuity equations.
void criterion_conservation(Tally& t) {
    try {
        double worst_rel = 0.0, worst_sz = 0.0;
        for (int n : {4, 5, 6}) {
            XxzCouplings c;
            const ConservationReport rep = verify_conservation_laws(n, c);
            worst_rel = std::max(worst_rel, rep.max_spin_residual / rep.h_frobenius);
            worst_rel = std::max(worst_rel, rep.max_energy_residual / rep.h_frobenius);
            worst_sz = std::max(worst_sz, rep.total_sz_commutator / rep.h_frobenius);
        }
        bool ok = worst_rel < 1e-12 && worst_sz <= 1e-13;
        t.report(2, ok, "spin and energy currents close the continuity equations",
                 "worst residual " + g3(worst_rel) + " of |H|_F (tolerance 1e-12), "
                 "total-Sz commutator " + g3(worst_sz) + " of |H|_F (tolerance 1e-13), "
                 "N = 4, 5, 6");
    } catch (const std::exception& e) {
        t.report(2, false, "spin and energy currents close the continuity equations",
                 std::string("exception: ") + e.what());
    }
}

// 3: the dense propagator preserves energy, trace and Frobenius norm.
void criterion_oracle(Tally& t) {
    try {
        const ExperimentConfig cfg = finalize_config(ExperimentConfig{});
        XxzCouplings c{cfg.coupling, cfg.delta};
        const MpoTensorTrain h = build_xxz_spin1_hamiltonian(cfg.n_sites, c);
        MpsTensorTrain o0 = random_gaussian_mps(cfg.n_sites, 9,
                                                uniform_bonds(cfg.n_sites, cfg.init_bond_dim),
                                                cfg.seed);
        o0 = pad_bond_dims(o0, cfg.max_bond_dims);
        const ComplexMatrix hd = mpo_to_dense(h);
        const ComplexMatrix od = mpo_to_dense(purified_mps_to_mpo(o0));
        const ComplexMatrix ot = dense_evolve(hd, od, cfg.t_final);

        const double e_err = std::abs(physical_energy(hd, ot) - physical_energy(hd, od)) /
                             std::abs(physical_energy(hd, od));
        const double tr_err = std::abs(ot.trace() - od.trace()) / std::abs(od.trace());
        const double f_err = std::abs(ot.norm() - od.norm()) / od.norm();
        bool ok = e_err < 1e-10 && tr_err < 1e-10 && f_err < 1e-10;
        t.report(3, ok, "dense propagator preserves tr[HO], tr[O] and |O|_F",
                 "energy " + g3(e_err) + ", trace " + g3(tr_err) + ", norm " + g3(f_err) +
                     " relative (tolerance 1e-10, N = 6, t = 1/8)");
    } catch (const std::exception& e) {
        t.report(3, false, "dense propagator preserves tr[HO], tr[O] and |O|_F",
                 std::string("exception: ") + e.what());
    }
}

// 4: at full bond dimension the sweep reproduces the dense propagator.
void criterion_full_rank(Tally& t) {
    try {
        XxzCouplings c;
        const MpoTensorTrain h = build_xxz_spin1_hamiltonian(2, c);
        const MpoTensorTrain w = build_commutator_superoperator(h);
        const MpsTensorTrain o = random_gaussian_mps(2, 9, {1, 9, 1}, 5);
        const CanonicalResult canon = left_normalize(o);
        const ComplexMatrix hd = mpo_to_dense(h, 9);
        const ComplexMatrix o0d = mpo_to_dense(purified_mps_to_mpo(o), 9);
        SpectralCache cache;

        KrylovParams kry{40, 1e-13, true};
        const double tau = 1.0 / 64.0;
        MpsTensorTrain state = canon.train;
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            state = tdvp_sweep_step(state, w, tau, kry);
            const ComplexMatrix got = mpo_to_dense(
                purified_mps_to_mpo(scale_global(state, Complex(canon.norm, 0.0))), 9);
            const ComplexMatrix want = dense_evolve(hd, o0d, k * tau, &cache);
            worst = std::max(worst, (got - want).norm() / want.norm());
        }
        bool ok = worst < 1e-9;
        t.report(4, ok, "full-rank sweep matches the dense propagator step by step",
                 "worst per-step relative deviation " + g3(worst) +
                     " (tolerance 1e-9, N = 2, d_loc = 9, 8 steps)");
    } catch (const std::exception& e) {
        t.report(4, false, "full-rank sweep matches the dense propagator step by step",
                 std::string("exception: ") + e.what());
    }
}

// 10: the exact evolved operator is representable at the bond cap.
void criterion_representability(Tally& t) {
    try {
        const ExperimentConfig cfg = finalize_config(ExperimentConfig{});
        XxzCouplings c{cfg.coupling, cfg.delta};
        const MpoTensorTrain h = build_xxz_spin1_hamiltonian(cfg.n_sites, c);
        MpsTensorTrain o0 = random_gaussian_mps(cfg.n_sites, 9,
                                                uniform_bonds(cfg.n_sites, cfg.init_bond_dim),
                                                cfg.seed);
        o0 = pad_bond_dims(o0, cfg.max_bond_dims);
        const ComplexMatrix hd = mpo_to_dense(h);
        const ComplexMatrix od = mpo_to_dense(purified_mps_to_mpo(o0));
        const ComplexMatrix ot = dense_evolve(hd, od, cfg.t_final);

        const int cut = cfg.n_sites / 2;
        const SchmidtSpectrum s0 = dense_schmidt_spectrum(od, cfg.n_sites, cut);
        const SchmidtSpectrum st = dense_schmidt_spectrum(ot, cfg.n_sites, cut);
        double tail = 0.0;
        for (Eigen::Index i = 81; i < st.coefficients.size(); ++i)
            tail += st.coefficients[i] * st.coefficients[i];
        bool ok = tail < 1e-3;
        t.report(10, ok, "exact evolved operator carries < 1e-3 weight beyond rank 81",
                 "truncation weight " + g3(tail) + "; entropies " +
                     g3(von_neumann_entropy(s0)) + " at t = 0 (reference magnitude 0.9913), " +
                     g3(von_neumann_entropy(st)) +
                     " at t = 1/8 (reference magnitude 1.287); reported, not asserted");
    } catch (const std::exception& e) {
        t.report(10, false, "exact evolved operator carries < 1e-3 weight beyond rank 81",
                 std::string("exception: ") + e.what());
    }
}

const RunRecord* find_record(const std::vector<RunRecord>& records, double tau,
                             const std::string& mode) {
    for (const auto& r : records)
        if (!r.failed && r.mode == mode && std::abs(r.tau - tau) < 1e-15) return &r;
    return nullptr;
}

struct SweepData {
    std::vector<ExperimentOutput> outputs;  // one per seed
    std::vector<std::uint64_t> seeds;
    std::vector<double> tau_grid;
    bool any_failed_run = false;
    std::string failure_note;
};

SweepData run_full_sweeps(const std::filesystem::path& out_root) {
    SweepData data;
    data.seeds = {11, 12, 13};
    for (std::uint64_t seed : data.seeds) {
        ExperimentConfig cfg;
        cfg.seed = seed;
        cfg.output_dir = out_root / ("sweep-seed" + std::to_string(seed));
        std::cout << "running full benchmark grid, seed " << seed
                  << " (both modes, 5 step sizes; takes several minutes)..." << std::endl;
        ExperimentOutput out = run_experiment(cfg);
        if (data.tau_grid.empty()) data.tau_grid = finalize_config(cfg).tau_grid;
        for (const auto& r : out.records) {
            if (r.failed) {
                data.any_failed_run = true;
                data.failure_note += "seed " + std::to_string(seed) + " tau " + g3(r.tau) +
                                     " " + r.mode + ": " + r.error + "; ";
            }
        }
        data.outputs.push_back(std::move(out));
    }
    return data;
}

// 5: norm and superoperator energy are conserved along every run.
void criterion_invariants(Tally& t, const SweepData& data) {
    if (data.any_failed_run) {
        t.report(5, false, "sweeps conserve norm and superoperator energy",
                 "integrator failures: " + data.failure_note);
        return;
    }
    double worst_norm = 0.0, worst_energy = 0.0;
    for (const auto& out : data.outputs) {
        for (const auto& r : out.records) {
            worst_norm = std::max(worst_norm, r.norm_drift);
            worst_energy = std::max(worst_energy, r.superop_energy_drift);
        }
    }
    bool ok = worst_norm < 1e-9 && worst_energy < 1e-8;
    t.report(5, ok, "sweeps conserve norm and superoperator energy",
             "worst norm drift " + g3(worst_norm) + " (tolerance 1e-9), worst energy drift " +
                 g3(worst_energy) + " (tolerance 1e-8), over all full-size runs");
}

// 6: trace distance scales as tau^2.
void criterion_order(Tally& t, const SweepData& data) {
    if (data.any_failed_run) {
        t.report(6, false, "trace distance converges at second order in tau",
                 "integrator failures: " + data.failure_note);
        return;
    }
    std::string detail;
    bool ok = true;
    for (std::size_t i = 0; i < data.outputs.size(); ++i) {
        const SummaryReport& s = data.outputs[i].summary;
        for (double slope : {s.slope_standard, s.slope_augmented}) {
            if (!(slope >= 1.7 && slope <= 2.3)) ok = false;
        }
        detail += "seed " + std::to_string(data.seeds[i]) + ": standard " +
                  g3(s.slope_standard) + ", augmented " + g3(s.slope_augmented) + "; ";
    }
    t.report(6, ok, "trace distance converges at second order in tau",
             detail + "window [1.7, 2.3]");
}

// 7: the augmented scheme beats the standard one in trace distance.
void criterion_trace_benefit(Tally& t, const SweepData& data) {
    if (data.any_failed_run) {
        t.report(7, false, "augmentation cuts the trace distance at the smallest tau",
                 "integrator failures: " + data.failure_note);
        return;
    }
    const double tau_min = *std::min_element(data.tau_grid.begin(), data.tau_grid.end());
    std::vector<double> ratios;
    std::string detail;
    for (std::size_t i = 0; i < data.outputs.size(); ++i) {
        const RunRecord* s = find_record(data.outputs[i].records, tau_min, "standard");
        const RunRecord* a = find_record(data.outputs[i].records, tau_min, "augmented");
        double ratio = (s && a && a->trace_distance_to_exact > 0.0)
                           ? s->trace_distance_to_exact / a->trace_distance_to_exact
                           : 0.0;
        ratios.push_back(ratio);
        detail += "seed " + std::to_string(data.seeds[i]) + ": " + g3(ratio) + "; ";
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const bool all = std::all_of(ratios.begin(), ratios.end(),
                                 [](double r) { return r >= 5.0; });
    bool ok = all || median >= 5.0;
    t.report(7, ok, "augmentation cuts the trace distance at the smallest tau",
             "standard/augmented ratios " + detail + "median " + g3(median) +
                 " (floor 5, median rule when a seed dips)");
}

// 8: the augmented scheme beats the standard one in energy error everywhere.
void criterion_energy_benefit(Tally& t, const SweepData& data) {
    if (data.any_failed_run) {
        t.report(8, false, "augmentation lowers the energy error at every tau",
                 "integrator failures: " + data.failure_note);
        return;
    }
    bool ok = true;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.outputs.size(); ++i) {
        for (double tau : data.tau_grid) {
            const RunRecord* s = find_record(data.outputs[i].records, tau, "standard");
            const RunRecord* a = find_record(data.outputs[i].records, tau, "augmented");
            if (!s || !a) {
                ok = false;
                continue;
            }
            if (!(a->rel_energy_error < s->rel_energy_error)) ok = false;
            if (a->rel_energy_error > 0.0)
                worst_ratio = std::min(worst_ratio, s->rel_energy_error / a->rel_energy_error);
        }
    }
    t.report(8, ok, "augmentation lowers the energy error at every tau",
             "strict inequality across 3 seeds x 5 step sizes; smallest standard/augmented "
             "ratio " + g3(worst_ratio));
}

// 9: the benefit is insensitive to the exact augmentation weight.
void criterion_gamma(Tally& t, const SweepData& data, const std::filesystem::path& out_root) {
    try {
        if (data.any_failed_run) {
            t.report(9, false, "trace distance shifts < 10% under a half-decade gamma change",
                     "integrator failures: " + data.failure_note);
            return;
        }
        const double tau_min = *std::min_element(data.tau_grid.begin(), data.tau_grid.end());
        const RunRecord* base = find_record(data.outputs.front().records, tau_min, "augmented");

        ExperimentConfig cfg;
        cfg.seed = 11;
        cfg.mode = RunMode::augmented;
        cfg.tau_grid = {tau_min};
        cfg.gamma_site_factor = std::pow(10.0, -2.5);
        cfg.output_dir = out_root / "sweep-gamma";
        // The dense reference only depends on the initial operator, so the
        // seed-11 cache applies verbatim.
        std::filesystem::create_directories(cfg.output_dir);
        for (const auto& entry :
             std::filesystem::directory_iterator(out_root / "sweep-seed11")) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("reference-", 0) == 0)
                std::filesystem::copy_file(entry.path(), cfg.output_dir / name,
                                           std::filesystem::copy_options::overwrite_existing);
        }
        std::cout << "running gamma-robustness run (one step size, augmented)..." << std::endl;
        const ExperimentOutput out = run_experiment(cfg);
        const RunRecord* alt = find_record(out.records, tau_min, "augmented");
        if (!base || !alt || base->trace_distance_to_exact <= 0.0) {
            t.report(9, false, "trace distance shifts < 10% under a half-decade gamma change",
                     "missing comparison records");
            return;
        }
        const double change = std::abs(alt->trace_distance_to_exact -
                                       base->trace_distance_to_exact) /
                              base->trace_distance_to_exact;
        bool ok = change < 0.10;
        t.report(9, ok, "trace distance shifts < 10% under a half-decade gamma change",
                 "relative change " + g3(change) + " between per-site factors 1e-3 and 10^-2.5 "
                 "(seed 11, smallest tau)");
    } catch (const std::exception& e) {
        t.report(9, false, "trace distance shifts < 10% under a half-decade gamma change",
                 std::string("exception: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path out_root = argc > 1 ? argv[1] : "acceptance-out";
    Tally tally;

    criterion_superoperator(tally);
    criterion_conservation(tally);
    criterion_oracle(tally);
    criterion_full_rank(tally);
    criterion_representability(tally);

    try {
        const SweepData data = run_full_sweeps(out_root);
        criterion_invariants(tally, data);
        criterion_order(tally, data);
        criterion_trace_benefit(tally, data);
        criterion_energy_benefit(tally, data);
        criterion_gamma(tally, data, out_root);
    } catch (const std::exception& e) {
        for (int id : {5, 6, 7, 8, 9})
            tally.report(id, false, "full-size sweep criteria",
                         std::string("sweep setup failed: ") + e.what());
    }

    std::cout << tally.passed << "/" << tally.total << " criteria passed" << std::endl;
    return tally.passed == tally.total ? 0 : 1;
}
