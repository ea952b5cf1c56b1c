#include "lgtsim/runner.hpp"

#include "lgtsim/dynamics.hpp"
#include "lgtsim/models.hpp"
#include "lgtsim/observables.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lgtsim::harness {

namespace {

namespace fs = std::filesystem;

struct ModelSetup {
    models::ModelBundle bundle;
    Vector psi0;
    Operator hamiltonian;           // h0 + V * protection + lambda * H1
    std::vector<Operator> jumps;    // filtered by the jump toggle
    std::vector<std::string> jump_labels;
};

models::ModelBundle build_bundle(const ExperimentConfig& cfg) {
    const Boundary b = cfg.boundary == "periodic" ? Boundary::periodic : Boundary::open;
    if (cfg.model == "u1") {
        models::U1Params p;
        p.mu = cfg.mu;
        p.L = cfg.L;
        p.boundary = b;
        return models::build_u1_qlm(p);
    }
    models::Z2Params p;
    p.h = cfg.h;
    p.L = cfg.L;
    p.boundary = b;
    return models::build_z2_lgt(p);
}

models::ProtectionSequence build_sequence(const ExperimentConfig& cfg) {
    if (cfg.sequence.rfind("custom:", 0) == 0) {
        std::vector<double> c;
        std::stringstream ss(cfg.sequence.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) c.push_back(std::stod(item));
        return models::custom_sequence(std::move(c));
    }
    return models::make_sequence(models::sequence_kind_from_string(cfg.sequence), cfg.L);
}

ModelSetup build_setup(const ExperimentConfig& cfg, double V) {
    ModelSetup s;
    s.bundle = build_bundle(cfg);

    models::StatePreset preset = models::StatePreset::custom;
    std::string bits;
    if (cfg.initial_state.rfind("custom:", 0) == 0) {
        bits = cfg.initial_state.substr(7);
    } else {
        preset = models::preset_from_string(cfg.initial_state);
    }
    s.psi0 = models::build_initial_state(s.bundle, preset, bits, true);

    Matrix h = s.bundle.h0.mat;
    if (cfg.protection == "linear" && V != 0.0) {
        const models::GeneratorSource src = cfg.generator_source == "pseudo"
                                                ? models::GeneratorSource::pseudo
                                                : models::GeneratorSource::full;
        h += V * models::build_linear_protection(s.bundle, build_sequence(cfg), src).mat;
    } else if (cfg.protection == "quadratic" && V != 0.0) {
        h += V * models::build_quadratic_protection(s.bundle).mat;
    }
    if (cfg.lambda != 0.0) h += cfg.lambda * models::build_coherent_error(s.bundle, cfg.eta).mat;
    s.hamiltonian = make_hermitian_operator(std::move(h));

    for (const models::JumpOperator& j : s.bundle.jump_ops) {
        const bool is_matter = j.label.rfind("matter", 0) == 0;
        if ((cfg.jumps == "matter" && !is_matter) || (cfg.jumps == "gauge" && is_matter)) continue;
        s.jumps.push_back(j.op);
        s.jump_labels.push_back(j.label);
    }
    return s;
}

noise::Spectrum build_spectrum(const ExperimentConfig& cfg, double gamma) {
    noise::Spectrum s;
    s.kind = noise::spectrum_kind_from_string(cfg.spectrum);
    s.gamma = gamma;
    s.beta = cfg.beta;
    s.omega_cutoff = cfg.omega_cutoff;
    s.rate = cfg.rtn_rate;
    s.band_lo = cfg.band_lo;
    s.band_hi = cfg.band_hi;
    s.alpha = cfg.alpha;
    s.level = cfg.flat_level;
    s.validate();
    return s;
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("runner: cannot open output file " + path);
    }
    void header(const std::string& third_column) {
        out << "time,violation," << third_column
            << ",imbalance_avg,fidelity,entropy_midchain,trace_error,min_eig\n";
    }
    void row(double t, double viol, double third, double ibal, double fid, double entropy,
             double trace_err, double min_eig) {
        out << format_double(t) << ',' << format_double(viol) << ',' << format_double(third) << ','
            << format_double(ibal) << ',' << format_double(fid) << ',' << format_double(entropy)
            << ',' << format_double(trace_err) << ',' << format_double(min_eig) << '\n';
    }
};

void write_meta(const std::string& path, const ExperimentConfig& resolved, const RunResult& result,
                const std::vector<std::string>& jump_labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("runner: cannot open metadata file " + path);
    out << "# lgtsim run metadata; the key = value body reproduces this run\n";
    out << "# eps_plateau = " << format_double(result.eps_plateau) << "\n";
    out << "# validity_max_ratio = " << format_double(result.validity.max_ratio) << "\n";
    out << "# validity_threshold = " << format_double(result.validity.threshold) << "\n";
    out << "# validity_pass = " << (result.validity.pass ? "true" : "false") << "\n";
    out << "# validity_pairs_checked = " << result.validity.n_checked << "\n";
    out << "# max_trace_error = " << format_double(result.max_trace_error) << "\n";
    out << "# max_herm_error = " << format_double(result.max_herm_error) << "\n";
    out << "# min_eigenvalue = " << format_double(result.min_eigenvalue) << "\n";
    out << "# n_steps = " << result.n_steps << "\n";
    out << "# n_rejected = " << result.n_rejected << "\n";
    out << "# wall_seconds = " << format_double(result.wall_seconds) << "\n";
    out << "# jump_operators =";
    for (const std::string& l : jump_labels) out << " " << l;
    out << "\n";
    out << resolved.echo();
}

}  // namespace

std::string run_tag(double gamma, double V) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "g%g_V%g", gamma, V);
    return buf;
}

std::string resolve_output_dir(const std::string& dir) {
    const char* root = std::getenv("LGTSIM_OUTPUT_ROOT");
    fs::path p(dir);
    if (root && *root && p.is_relative()) p = fs::path(root) / p;
    return p.string();
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const char* env = std::getenv("LGTSIM_WORKERS");
    if (env && *env) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 2;
}

RunResult run_single(const ExperimentConfig& cfg, double gamma, double V,
                     const std::string& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();

    ModelSetup setup = build_setup(cfg, V);
    const models::ModelBundle& bundle = setup.bundle;
    const LatticeSpec& lat = bundle.lattice;

    fs::create_directories(out_dir);
    const std::string tag = run_tag(gamma, V);

    RunResult result;
    result.gamma = gamma;
    result.V = V;
    result.csv_path = (fs::path(out_dir) / ("run_" + tag + ".csv")).string();
    result.meta_path = (fs::path(out_dir) / ("run_" + tag + ".meta")).string();

    // observables in the computational basis
    const Matrix viol_op = models::violation_operator(bundle).mat;
    const Matrix third_op = cfg.model == "u1"
                                ? obs::condensate_operator(bundle).mat
                                : obs::imbalance_integrand_operator(
                                      bundle, obs::imbalance_weights(bundle, setup.psi0))
                                      .mat;
    const std::vector<double> p = obs::imbalance_weights(bundle, setup.psi0);
    const Matrix imb_op = obs::imbalance_integrand_operator(bundle, p).mat;
    result.eps_plateau = viol_op.trace().real() / static_cast<double>(lat.dim());

    dynamics::IntegratorConfig icfg;
    icfg.rel_tol = cfg.rel_tol;
    icfg.abs_tol = cfg.abs_tol;
    icfg.max_step = cfg.max_step;
    icfg.renormalize_trace = cfg.renormalize_trace;
    icfg.grid = cfg.output_grid();
    icfg.min_eig_stride = cfg.min_eig_stride;

    CsvWriter csv(result.csv_path);
    csv.header(cfg.model == "u1" ? "condensate" : "imbalance_int");

    obs::TrapezoidAverage imb_avg;
    result.min_eigenvalue = 0.0;

    if (gamma == 0.0) {
        // closed evolution: spectral propagation of the pure state
        auto sampler = [&](const dynamics::ClosedSample& s) {
            const double viol = obs::expectation(s.psi, viol_op);
            const double third = obs::expectation(s.psi, third_op);
            const double ibal = imb_avg.push(s.t, obs::expectation(s.psi, imb_op));
            const Complex amp = (setup.psi0.adjoint() * s.psi)(0);
            const double fid = std::norm(amp);
            const double entropy = obs::midchain_entropy_of(s.psi, lat);
            const double norm_err = std::abs(s.psi.norm() - 1.0);
            result.max_trace_error = std::max(result.max_trace_error, norm_err);
            csv.row(s.t, viol, third, ibal, fid, entropy, norm_err, 0.0);
        };
        dynamics::Trajectory traj = dynamics::evolve_closed(setup.hamiltonian, setup.psi0, icfg, sampler);
        result.n_steps = traj.n_steps;
        result.n_rejected = traj.n_rejected;
        result.validity.pass = true;  // no environment coupling
        result.validity.threshold = cfg.validity_threshold;
    } else {
        std::vector<noise::Spectrum> spectra(setup.jumps.size(), build_spectrum(cfg, gamma));
        redfield::EigenOperatorSet eset =
            redfield::decompose_eigenoperators(setup.hamiltonian, setup.jumps, cfg.bin_tol);
        result.validity = redfield::validity_check(eset, spectra, cfg.validity_threshold);

        redfield::GeneratorOptions gopts;
        gopts.secular = cfg.secular;
        gopts.drop_zero_frequency = cfg.drop_zero_frequency;
        gopts.coupling_budget = cfg.coupling_budget;
        redfield::RedfieldGenerator gen = redfield::assemble_generator(eset, spectra, gopts);

        Matrix rho0 = setup.psi0 * setup.psi0.adjoint();
        const Matrix viol_eig = gen.to_eigenbasis(viol_op);
        const Matrix third_eig = gen.to_eigenbasis(third_op);
        const Matrix imb_eig = gen.to_eigenbasis(imb_op);
        const Vector psi0_eig = gen.eig().eigenvectors.adjoint() * setup.psi0;

        double min_eig_seen = 0.0;
        auto sampler = [&](const dynamics::OpenSample& s) {
            const double viol = std::max(0.0, obs::expectation(s.rho_eig, viol_eig));
            const double third = obs::expectation(s.rho_eig, third_eig);
            const double ibal = imb_avg.push(s.t, obs::expectation(s.rho_eig, imb_eig));
            const double fid = (psi0_eig.adjoint() * s.rho_eig * psi0_eig)(0).real();
            const double entropy = obs::midchain_entropy_of(gen.to_computational(s.rho_eig), lat);
            result.max_trace_error = std::max(result.max_trace_error, s.trace_error);
            result.max_herm_error = std::max(result.max_herm_error, s.herm_error);
            if (!std::isnan(s.min_eig)) min_eig_seen = std::min(min_eig_seen, s.min_eig);
            csv.row(s.t, viol, third, ibal, fid, entropy, s.trace_error, s.min_eig);
        };
        dynamics::Trajectory traj = dynamics::evolve(gen, rho0, icfg, sampler);
        result.n_steps = traj.n_steps;
        result.n_rejected = traj.n_rejected;
        result.min_eigenvalue = min_eig_seen;
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    ExperimentConfig resolved = cfg;
    resolved.gamma = {gamma};
    resolved.V = {V};
    resolved.output_dir = out_dir;
    write_meta(result.meta_path, resolved, result, setup.jump_labels);
    return result;
}

RunResult run_one(const ExperimentConfig& cfg) {
    if (cfg.gamma.size() != 1 || cfg.V.size() != 1)
        throw ConfigError("run: gamma and V must be single values (use sweep for grids)");
    return run_single(cfg, cfg.gamma[0], cfg.V[0], resolve_output_dir(cfg.output_dir));
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    const std::string out_dir = resolve_output_dir(cfg.output_dir);
    fs::create_directories(out_dir);

    struct Job {
        double gamma, V;
    };
    std::vector<Job> jobs;
    for (double g : cfg.gamma)
        for (double v : cfg.V) jobs.push_back({g, v});

    SweepResult sweep;
    sweep.runs.resize(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;

    const int n_workers = std::min<int>(resolve_workers(cfg.workers), static_cast<int>(jobs.size()));
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                sweep.runs[i] = run_single(cfg, jobs[i].gamma, jobs[i].V, out_dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);

    sweep.index_path = (fs::path(out_dir) / "index.csv").string();
    std::ofstream index(sweep.index_path, std::ios::binary);
    if (!index) throw std::runtime_error("sweep: cannot open " + sweep.index_path);
    index << "file,gamma,V,beta,model,protection,generator_source,sequence,initial_state,"
             "eps_plateau,validity_max_ratio,validity_pass\n";
    for (const RunResult& r : sweep.runs) {
        index << fs::path(r.csv_path).filename().string() << ',' << format_double(r.gamma) << ','
              << format_double(r.V) << ',' << format_double(cfg.beta) << ',' << cfg.model << ','
              << cfg.protection << ',' << cfg.generator_source << ',' << cfg.sequence << ','
              << cfg.initial_state << ',' << format_double(r.eps_plateau) << ','
              << format_double(r.validity.max_ratio) << ',' << (r.validity.pass ? "true" : "false")
              << '\n';
    }
    return sweep;
}

std::string render_tables() {
    std::ostringstream out;

    out << "Z2 local eigenvalues: n tau_l tau_r | G W(gtar=-1) W(gtar=+1)\n";
    for (const models::Z2LocalRow& r : models::z2_local_eigenvalue_table()) {
        out << "  " << r.n << "  " << (r.tau_l > 0 ? "+1" : "-1") << "  "
            << (r.tau_r > 0 ? "+1" : "-1") << "  |  " << (r.g > 0 ? "+" : "") << r.g << "  "
            << (r.w_tar_m > 0 ? "+" : "") << r.w_tar_m << "  " << (r.w_tar_p > 0 ? "+" : "")
            << r.w_tar_p << "\n";
    }

    auto print_weights = [&out](const std::vector<models::Sector>& sectors, const Vector& a,
                                const Vector& b, const std::string& head) {
        out << head << "\n";
        for (const models::Sector& s : sectors) {
            const double wa = (a.adjoint() * s.projector * a)(0).real();
            const double wb = (b.adjoint() * s.projector * b)(0).real();
            if (wa < 1e-12 && wb < 1e-12) continue;
            out << "  (";
            for (size_t j = 0; j < s.g.size(); ++j) out << (j ? "," : "") << s.g[j];
            out << ")  " << format_double(wa) << "  " << format_double(wb) << "\n";
        }
    };

    {
        models::U1Params p;  // mu irrelevant for the state tables
        p.L = 4;
        models::ModelBundle bundle = models::build_u1_qlm(p);
        const Vector z = models::build_initial_state(bundle, models::StatePreset::u1_domainwall_z);
        const Vector x = models::build_initial_state(bundle, models::StatePreset::u1_domainwall_x);
        print_weights(models::sector_projectors(bundle), z, x,
                      "U(1) sector weights (domain wall): g | rho_z rho_x");
    }
    {
        models::Z2Params p;
        p.L = 4;
        models::ModelBundle bundle = models::build_z2_lgt(p);
        const Vector x = models::build_initial_state(bundle, models::StatePreset::z2_domainwall_x);
        const Vector z = models::build_initial_state(bundle, models::StatePreset::z2_domainwall_z);
        print_weights(models::sector_projectors(bundle), x, z,
                      "Z2 sector weights (domain wall): g | rho_x rho_z");
    }
    return out.str();
}

}  // namespace lgtsim::harness
