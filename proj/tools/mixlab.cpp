#include "mixlab/mixlab.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace mixlab;

namespace {

struct Options {
    std::string model_path;
    std::string out = "out";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double a = 0.0;
    double b = 256.0;
    double eps = 0.0;
    double theta = 0.0;
    int grid = 0;
    std::vector<std::string> set;

    // command specific
    std::vector<double> b_list{64, 128, 256, 512};
    double c = 4.0;
    int n_max = 12;
    std::vector<double> T_grid;
    std::string observable = "sin-one";
    double t_max = 3.0;
    double dt = 0.125;
    std::size_t samples = 200000;
    double C1 = 8.0;
    int trials = 2000;
};

struct Run {
    Options opt;
    std::string command;
    ModelConfig config;
    std::string config_text; // verbatim model file
    ModelPtr model;
};

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_number(v[i]);
    return s;
}

std::string param_block(const Run& r) {
    std::ostringstream o;
    o << "a=" << csv_number(r.opt.a) << " b=" << csv_number(r.opt.b) << " eps=" << csv_number(r.opt.eps)
      << " theta=" << csv_number(r.config.theta) << " grid=" << r.config.grid_size << " seed=" << r.opt.seed;
    return o.str();
}

void emit(const Run& r, const std::string& name, const std::string& body) {
    Artifact art;
    art.meta = {{"command", r.command}, {"model_hash", r.model->hash}, {"params", param_block(r)}};
    write_text((std::filesystem::path(r.opt.out) / name).string(), art.render() + body);
}

std::string kv_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string s = "key,value\n";
    for (const auto& [k, v] : rows) s += csv_field(k) + "," + csv_field(v) + "\n";
    return s;
}

double default_eps(const Run& r) { return r.opt.eps > 0.0 ? r.opt.eps : 1.0 / 256.0; }

int cmd_model_info(Run& r) {
    const MarkovModel& m = *r.model;
    auto cs = contraction_sandwich(m, 12);
    std::vector<std::pair<std::string, std::string>> rows{
        {"family", m.config.family},       {"alphabet", std::to_string(m.alphabet())},
        {"intervals", std::to_string(m.intervals.size())},
        {"chi0", csv_number(m.chi0)},      {"chi_star", csv_number(m.chi_star)},
        {"chi_u", csv_number(m.chi_u)},    {"chi_u_bar", csv_number(m.chi_u_bar)},
        {"chi_s", csv_number(m.chi_s)},    {"chi_s_bar", csv_number(m.chi_s_bar)},
        {"tau0", csv_number(m.tau0)},      {"tau_star", csv_number(m.tau_star)},
        {"theta", csv_number(m.theta)},    {"contraction_C", csv_number(cs.C)},
        {"tau_word_holder", csv_number(tau_word_holder(m, 10, m.theta))}};
    emit(r, "model_info.csv", kv_csv(rows));
    std::printf("model-info: family=%s tau0=%.17g tau_star=%.17g chi0=%.17g model_hash=%s\n", m.config.family.c_str(),
                m.tau0, m.tau_star, m.chi0, m.hash.c_str());
    return 0;
}

int cmd_gibbs(Run& r) {
    GibbsMeasure g = gibbs_measure(r.model);
    emit(r, "gibbs_measure.csv", g.nu.to_csv());
    emit(r, "fhat.csv", to_csv(g.fhat.nodes()));
    std::vector<std::pair<std::string, std::string>> rows{{"flow_pressure", csv_number(g.flow_pressure)},
                                                           {"fiber_defect", csv_number(g.fiber_defect)},
                                                           {"invariance_defect", csv_number(g.invariance_defect)}};
    emit(r, "gibbs_summary.csv", kv_csv(rows));
    std::printf("gibbs: flow_pressure=%.17g fiber_defect=%.3g invariance_defect=%.3g\n", g.flow_pressure,
                g.fiber_defect, g.invariance_defect);
    return 0;
}

int cmd_pressure(Run& r) {
    const MarkovModel& m = *r.model;
    std::string body = "a,pressure\n";
    for (int k = -4; k <= 4; ++k) {
        double a = 0.0125 * k;
        double p = pressure(m, [&m, a](const PointRef& y) { return section_potential_at(m, y) + a * m.tau(y); });
        body += csv_number(a) + "," + csv_number(p) + "\n";
    }
    emit(r, "pressure.csv", body);
    double h = entropy(m);
    double p0 = pressure(m, [&m](const PointRef& y) { return section_potential_at(m, y); });
    emit(r, "pressure_summary.csv", kv_csv({{"pressure", csv_number(p0)}, {"entropy", csv_number(h)}}));
    std::printf("pressure: pressure=%.17g entropy=%.17g\n", p0, h);
    return 0;
}

int cmd_decay(Run& r) {
    GibbsMeasure g = gibbs_measure(r.model);
    ComplexFunction u(r.model->grid_ptr(), Complex(1.0, 0.0));
    DecayProfile d = decay_profile(g, r.opt.a, r.opt.b_list, r.opt.c, u);
    emit(r, "decay.csv", d.to_csv());
    std::printf("decay: kappa=%.17g fitted=%d rows=%zu model_hash=%s\n", d.kappa, int(d.fitted), d.rows.size(),
                r.model->hash.c_str());
    return 0;
}

int cmd_uni_scan(Run& r) {
    const MarkovModel& m = *r.model;
    GibbsMeasure g = gibbs_measure(r.model);
    ScaleFunction s = matching_scale(m, default_eps(r));
    UniformSet om = uniform_set(m, 4, 0.1, 64);
    UniCertificate cert = uni_scan(m, s, om, r.opt.C1);
    auto st = s.certificate;
    emit(r, "uni.csv", cert.to_csv());
    emit(r, "omega.csv", om.to_csv(m.grid()));
    emit(r, "stability.csv",
         kv_csv({{"pass", st.pass ? "1" : "0"},
                 {"n", std::to_string(st.n)},
                 {"kappa", csv_number(st.kappa)},
                 {"kappa_floor", csv_number(st.kappa_floor)},
                 {"slow_growth", std::to_string(st.slow_growth)}}));
    RecurrenceReport rec = recurrence_rate(m, g.nu, om, 1, 32, r.opt.trials, r.opt.seed);
    emit(r, "recurrence.csv", rec.to_csv());
    std::printf("uni-scan: eps=%.17g kappa=%.17g w1=%s w2=%s points=%d model_hash=%s\n", cert.eps, cert.kappa,
                word_string(cert.w1).c_str(), word_string(cert.w2).c_str(), cert.points, m.hash.c_str());
    return 0;
}

int cmd_dolgopyat(Run& r) {
    GibbsMeasure g = gibbs_measure(r.model);
    EngineParams p;
    p.C1 = r.opt.C1;
    p.eps = r.opt.eps;
    ComplexFunction u(r.model->grid_ptr(), Complex(1.0, 0.0));
    L2Certificate c = run_l2_iteration(g, r.opt.a, r.opt.b, u, p);
    emit(r, "dolgopyat.csv", c.to_csv());
    emit(r, "dolgopyat_summary.csv", c.summary_csv());
    emit(r, "dolgopyat_recurrence.csv", c.recurrence.to_csv());
    std::printf("dolgopyat: kappa=%.17g kappa6=%.17g n1=%d refused=%d bound=%.17g %s model_hash=%s\n", c.kappa,
                c.kappa6, c.n1, int(c.refused), c.bound, c.pass ? "pass" : "fail", c.model_hash.c_str());
    return c.pass ? 0 : 2;
}

int cmd_orbits(Run& r) {
    const MarkovModel& m = *r.model;
    auto orbits = enumerate_periodic_orbits(m, r.opt.n_max);
    std::vector<double> T = r.opt.T_grid;
    if (T.empty())
        for (int k = 1; k <= r.opt.n_max; ++k) T.push_back(k * m.tau0);
    CountingReport rep = prime_orbit_report(m, orbits, r.opt.n_max, T);
    emit(r, "orbits.csv", orbits_csv(orbits));
    emit(r, "counting.csv", rep.to_csv());
    std::string counts = "n,prime_orbits,necklace,fixed_points\n";
    std::vector<std::uint64_t> L(r.opt.n_max + 1, 0);
    for (const auto& o : orbits) ++L[o.n];
    for (int n = 1; n <= r.opt.n_max; ++n)
        counts += std::to_string(n) + "," + std::to_string(L[n]) + "," + std::to_string(necklace_count(m, n)) + "," +
                  std::to_string(fixed_point_count(m, n)) + "\n";
    emit(r, "orbit_counts.csv", counts);
    std::printf("orbits: count=%zu h=%.17g c_hat=%.17g model_hash=%s\n", orbits.size(), rep.h, rep.c_hat,
                m.hash.c_str());
    return 0;
}

int cmd_correlation(Run& r) {
    GibbsMeasure g = gibbs_measure(r.model);
    Observable A = named_observable(r.opt.observable);
    std::vector<double> t;
    for (int k = 0; k * r.opt.dt <= r.opt.t_max + 1e-12; ++k) t.push_back(k * r.opt.dt);
    CorrelationReport rep = correlation_decay(g, A, A, t, r.opt.samples, r.opt.seed);
    emit(r, "correlation.csv", rep.to_csv());
    emit(r, "correlation_summary.csv",
         kv_csv({{"observable", r.opt.observable},
                 {"samples", std::to_string(rep.samples)},
                 {"degenerate", rep.degenerate ? "1" : "0"},
                 {"fitted", rep.fitted ? "1" : "0"},
                 {"rate", csv_number(rep.rate)},
                 {"rate_stderr", csv_number(rep.rate_stderr)},
                 {"r2", csv_number(rep.r2)}}));
    std::printf("correlation: rate=%.17g stderr=%.17g r2=%.17g fitted=%d model_hash=%s\n", rep.rate, rep.rate_stderr,
                rep.r2, int(rep.fitted), r.model->hash.c_str());
    return 0;
}

int cmd_invariants(Run& r) {
    const MarkovModel& m = *r.model;
    const Grid& gr = m.grid();
    struct Check {
        std::string name;
        double value, tol;
        bool upper; // value <= tol, else value >= tol
    };
    std::vector<Check> checks;
    GibbsMeasure g = gibbs_measure(r.model);
    checks.push_back({"gibbs_fiber_defect", g.fiber_defect, 1e-10, true});
    checks.push_back({"gibbs_invariance_defect", g.invariance_defect, 1e-8, true});
    for (double a : {-0.05, 0.05}) {
        EigenData eig = leading_eigendata(g, a);
        NormalizedPotential fa = normalize_potential(g, a, eig);
        checks.push_back({"normalized_fiber_defect_a=" + csv_number(a), fa.max_fiber_defect(), 1e-8, true});
        double mn = *std::min_element(eig.rho.values().begin(), eig.rho.values().end());
        checks.push_back({"rho_min_a=" + csv_number(a), mn, 0.5, false});
    }
    double inv_err = 0.0, coc_err = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, gr.size() / 64);
    for (int n = 1; n <= 6; ++n)
        for (const Word& w : enumerate_branches(m, n))
            for (std::size_t k = 0; k < gr.size(); k += stride) {
                PointRef x = gr.node(k);
                if (!m.admissible(w, x.interval)) continue;
                PointRef y = apply_branch(m, w, x);
                bool edge = false;
                for (int i = 0; i < n && !edge; ++i) y = m.forward(y, &edge);
                if (edge) continue;
                const double h = gr.intervals()[x.interval].spacing();
                inv_err = std::max(inv_err, std::abs(y.x - x.x) / h);
            }
    for (std::size_t k = 0; k < gr.size(); k += stride) {
        PointRef x = gr.node(k);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; b <= 4; ++b) {
                PointRef y = x;
                for (int i = 0; i < a; ++i) y = m.forward(y);
                double lhs = expansion_cocycle(m, x, a + b).value;
                double rhs = expansion_cocycle(m, x, a).value * expansion_cocycle(m, y, b).value;
                coc_err = std::max(coc_err, std::abs(lhs - rhs) / rhs);
            }
    }
    checks.push_back({"branch_inverse_in_spacings", inv_err, 10.0, true});
    checks.push_back({"cocycle_identity_rel", coc_err, 1e-12, true});
    ComplexRPF rpf = make_complex_rpf(g, 0.0, 64.0);
    RealFunction one(m.grid_ptr(), 1.0);
    RealFunction m1 = m_apply(rpf, one);
    double mdef = 0.0;
    for (double v : m1.values()) mdef = std::max(mdef, std::abs(v - 1.0));
    checks.push_back({"M_ab_one_defect_b=64", mdef, 1e-10, true});
    checks.push_back({"doubling_constant", doubling_constant(g.nu, {0.05, 0.1, 0.2}, 16), 0.0, false});

    std::string body = "name,value,tolerance,pass\n";
    bool all = true;
    for (const auto& c : checks) {
        bool ok = c.upper ? c.value <= c.tol : c.value > c.tol;
        all = all && ok;
        body += csv_field(c.name) + "," + csv_number(c.value) + "," + csv_number(c.tol) + "," + (ok ? "1" : "0") + "\n";
    }
    emit(r, "invariants.csv", body);
    std::printf("invariants: %zu checks, %s model_hash=%s\n", checks.size(), all ? "all green" : "FAILED",
                m.hash.c_str());
    return all ? 0 : 2;
}

std::string experiment_text(const Run& r) {
    std::ostringstream o;
    o << "command=" << r.command << "\n";
    o << "model=" << r.opt.model_path << "\n";
    o << "seed=" << r.opt.seed << "\nthreads=" << r.opt.threads << "\n";
    o << "a=" << csv_number(r.opt.a) << "\nb=" << csv_number(r.opt.b) << "\neps=" << csv_number(r.opt.eps) << "\n";
    o << "theta=" << csv_number(r.opt.theta) << "\ngrid=" << r.opt.grid << "\n";
    for (const auto& s : r.opt.set) o << "set=" << s << "\n";
    o << "b_list=" << join(r.opt.b_list) << "\nc=" << csv_number(r.opt.c) << "\nn_max=" << r.opt.n_max
      << "\nT=" << join(r.opt.T_grid) << "\nobservable=" << r.opt.observable << "\nt_max=" << csv_number(r.opt.t_max)
      << "\ndt=" << csv_number(r.opt.dt) << "\nsamples=" << r.opt.samples << "\nC1=" << csv_number(r.opt.C1)
      << "\ntrials=" << r.opt.trials << "\n";
    return o.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixlab: transfer operators, Dolgopyat cancellation and orbit statistics for suspension models"};
    app.set_version_flag("--version", "mixlab 0.1.0");
    Run run;
    Options& o = run.opt;
    app.add_option("--model", o.model_path, "model config file (key=value)")->envname("MIXLAB_MODEL");
    app.add_option("--out", o.out, "output directory")->envname("MIXLAB_OUT");
    app.add_option("--seed", o.seed, "generator seed")->envname("MIXLAB_SEED");
    app.add_option("--threads", o.threads, "worker cap (0: all cores)")->envname("MIXLAB_THREADS");
    app.add_option("--a", o.a, "real twist a")->envname("MIXLAB_A");
    app.add_option("--b", o.b, "frequency b")->envname("MIXLAB_B");
    app.add_option("--eps", o.eps, "scale parameter eps (0: command default)")->envname("MIXLAB_EPS");
    app.add_option("--theta", o.theta, "Hoelder exponent override")->envname("MIXLAB_THETA");
    app.add_option("--grid", o.grid, "grid size override (power of two)")->envname("MIXLAB_GRID");
    app.add_option("--set", o.set, "model override key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.fallthrough();
    app.require_subcommand(1);

    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(Run&);
    };
    const std::vector<Cmd> cmds{
        {"model-info", "model constants and measured contraction bounds", cmd_model_info},
        {"gibbs", "Gibbs measure and normalized potential", cmd_gibbs},
        {"pressure", "pressure along F + a tau and flow entropy", cmd_pressure},
        {"decay", "decay profile of L_{a,b}^n 1", cmd_decay},
        {"uni-scan", "scale function, uniform set and UNI certificate", cmd_uni_scan},
        {"dolgopyat", "majorant iteration and L2 decay certificate", cmd_dolgopyat},
        {"orbits", "periodic orbits and prime orbit counting", cmd_orbits},
        {"correlation", "Monte Carlo correlation decay", cmd_correlation},
        {"invariants", "invariant suite", cmd_invariants},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        CLI::App* s = app.add_subcommand(c.name, c.help);
        subs.push_back(s);
        std::string n = c.name;
        if (n == "decay") {
            s->add_option("--b-list", o.b_list, "frequencies")->delimiter(',');
            s->add_option("--c", o.c, "n(b) = ceil(c ln b)");
        } else if (n == "orbits") {
            s->add_option("--nmax", o.n_max, "maximal word length");
            s->add_option("--T", o.T_grid, "period thresholds")->delimiter(',');
        } else if (n == "correlation") {
            s->add_option("--observable", o.observable, "section-fiber pair, e.g. sin-one");
            s->add_option("--samples", o.samples, "Monte Carlo samples");
            s->add_option("--tmax", o.t_max, "largest lag");
            s->add_option("--dt", o.dt, "lag step");
        } else if (n == "uni-scan" || n == "dolgopyat") {
            s->add_option("--C1", o.C1, "partition constant");
            if (n == "uni-scan") s->add_option("--trials", o.trials, "recurrence trials");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    std::size_t idx = 0;
    for (; idx < subs.size(); ++idx)
        if (subs[idx]->parsed()) break;
    run.command = cmds[idx].name;
    try {
        if (!o.model_path.empty()) {
            run.config_text = read_text(o.model_path);
            run.config = ModelConfig::parse(run.config_text);
        }
        for (const auto& kv : o.set) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            run.config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (o.theta > 0.0) run.config.theta = o.theta;
        if (o.grid > 0) run.config.grid_size = o.grid;
        run.model = make_model(run.config);
        set_thread_cap(o.threads);
        std::filesystem::create_directories(o.out);
        write_text((std::filesystem::path(o.out) / "model.cfg").string(),
                   run.config_text.empty() ? run.config.serialize() : run.config_text);
        write_text((std::filesystem::path(o.out) / "model_resolved.cfg").string(), run.config.serialize());
        write_text((std::filesystem::path(o.out) / "experiment.cfg").string(), experiment_text(run));
        return cmds[idx].fn(run);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
