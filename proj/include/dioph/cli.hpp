#pragma once

// Command-line front end.  run() parses arguments, executes one subcommand
// and returns the exit code: 0 success, 2 inconclusive or budget-limited
// results, 1 errors.  Output goes to --out when given, else to `out`.

#include "dioph/certificate.hpp"
#include "dioph/daniflow.hpp"
#include "dioph/diophantine.hpp"
#include "dioph/error.hpp"
#include "dioph/kslattice.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"
#include "dioph/singconstruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace dioph::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct RunConfig {
    std::string field_path;
    int precision = 0;  // 0: whatever the field file says
    std::string out_path;
    std::uint64_t seed = 0;
    std::string format = "csv";
};

inline int exit_code(ErrorKind k) { return k == ErrorKind::BudgetExceeded ? kExitInconclusive : kExitError; }

inline Field load_config_field(const RunConfig& cfg) {
    if (cfg.field_path.empty()) throw Error(ErrorKind::InvalidInput, "--field is required");
    std::ifstream in(cfg.field_path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open field file " + cfg.field_path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto ff = parse_field_text(ss.str());
    if (cfg.precision > 0) ff.options.precision_bits = cfg.precision;
    return Field::create(ff.min_poly, ff.options);
}

inline std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(sep, start);
        if (end == std::string::npos) end = text.size();
        out.push_back(detail::trim_copy(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

inline Real parse_real(const std::string& s) {
    try {
        if (s.find('/') != std::string::npos) return to_real(parse_rational(s));
        std::size_t used = 0;
        (void)std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return Real(s);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "not a number: '" + s + "'");
    }
}

/// "--x": places separated by ';', coordinates by ','.  "--x-field": m
/// elements of K separated by ';' (each "[c1,...,cd]" or a rational), and
/// x = tau(alpha).
inline KSVector parse_point(const Field& K, const std::string& x_text, const std::string& x_field) {
    if (x_text.empty() == x_field.empty()) throw Error(ErrorKind::InvalidInput, "give exactly one of --x and --x-field");
    const int d = K.degree();
    if (!x_field.empty()) {
        std::vector<FieldElement> a;
        for (const auto& s : split_on(x_field, ';')) a.push_back(K.parse(s));
        return embed_point(K, a);
    }
    auto places = split_on(x_text, ';');
    if (static_cast<int>(places.size()) != d)
        throw Error(ErrorKind::InvalidInput, "--x needs " + std::to_string(d) + " ';'-separated places");
    std::vector<std::vector<Real>> rows;
    for (const auto& p : places) {
        std::vector<Real> row;
        for (const auto& c : split_on(p, ',')) row.push_back(parse_real(c));
        if (!rows.empty() && row.size() != rows[0].size())
            throw Error(ErrorKind::InvalidInput, "every place needs the same number of coordinates");
        rows.push_back(std::move(row));
    }
    KSVector x(d, rows[0].size());
    for (int s = 0; s < d; ++s)
        for (std::size_t i = 0; i < rows[s].size(); ++i) x(s, i) = rows[s][i];
    return x;
}

/// "a..b" (integers a to b), a comma list, or one value.
inline std::vector<Real> parse_q_list(const std::string& text) {
    std::vector<Real> qs;
    auto dots = text.find("..");
    if (dots != std::string::npos) {
        long a = 0, b = 0;
        try {
            a = std::stol(text.substr(0, dots));
            b = std::stol(text.substr(dots + 2));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput, "bad Q range " + text);
        }
        if (a < 1 || b < a || b - a > 100000) throw Error(ErrorKind::InvalidInput, "bad Q range " + text);
        for (long q = a; q <= b; ++q) qs.push_back(Real(q));
        return qs;
    }
    for (const auto& s : split_on(text, ',')) qs.push_back(parse_real(s));
    return qs;
}

inline std::string fmt(const Real& x) { return format_real(x, 20); }

inline json element_list(const Field& K, const std::vector<FieldElement>& v) {
    json j = json::array();
    for (const auto& e : v) j.push_back(K.format(e));
    return j;
}

// Subcommands.  Each writes its document to `doc` and returns an exit code.

inline int cmd_field(const RunConfig& cfg, std::ostream& doc) {
    Field K = load_config_field(cfg);
    const int d = K.degree();
    std::vector<std::string> poly, roots, basis;
    for (const auto& c : K.min_poly()) poly.push_back(c.str());
    for (const auto& r : K.roots()) roots.push_back(format_real(r, 30));
    for (int r = 0; r < d; ++r) {
        std::string row;
        for (int k = 0; k < d; ++k) row += (k ? "," : "") + format_rational(K.integral_basis()(r, k));
        basis.push_back("[" + row + "]");
    }
    if (cfg.format == "json") {
        json j;
        j["degree"] = d;
        j["discriminant"] = K.discriminant().str();
        j["minpoly"] = poly;
        j["roots"] = roots;
        j["basis"] = basis;
        j["precision"] = K.precision_bits();
        doc << j.dump(2) << "\n";
    } else {
        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + v[k];
            return s;
        };
        doc << "key,value\n";
        doc << "degree," << d << "\n";
        doc << "discriminant," << K.discriminant().str() << "\n";
        doc << "minpoly," << join(poly) << "\n";
        doc << "roots," << join(roots) << "\n";
        doc << "basis,\"" << join(basis) << "\"\n";
        doc << "precision," << K.precision_bits() << "\n";
    }
    return kExitOk;
}

struct PointArgs {
    std::string x, x_field;
};

inline int cmd_dirichlet(const RunConfig& cfg, const PointArgs& pa, const std::string& q_text, std::ostream& doc) {
    Field K = load_config_field(cfg);
    const KSVector x = parse_point(K, pa.x, pa.x_field);
    int code = kExitOk;
    if (cfg.format == "csv") doc << "Q,value,q0,q,certified\n";
    for (const auto& Q : parse_q_list(q_text)) {
        auto sol = dirichlet_solve(K, x, Q);
        if (!sol.certified) code = kExitInconclusive;
        if (cfg.format == "json") {
            json j;
            j["Q"] = fmt(Q);
            j["value"] = fmt(sol.value);
            j["q0"] = K.format(sol.q0);
            j["q"] = element_list(K, sol.q);
            j["certified"] = sol.certified;
            doc << j.dump() << "\n";
        } else {
            doc << fmt(Q) << "," << fmt(sol.value) << ",\"" << K.format(sol.q0) << "\",\""
                << format_module_vector(K, sol.q) << "\"," << (sol.certified ? "true" : "false") << "\n";
        }
    }
    return code;
}

inline int cmd_flow_trace(const RunConfig& cfg, const PointArgs& pa, const std::string& t0, const std::string& tmax,
                          const std::string& step, std::ostream& doc) {
    Field K = load_config_field(cfg);
    const KSVector x = parse_point(K, pa.x, pa.x_field);
    auto tr = systole_trace(K, x, uniform_grid(parse_real(t0), parse_real(tmax), parse_real(step)));
    if (cfg.format == "csv") doc << "t,delta,certified,witness,log_delta\n";
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        const std::string w = format_module_vector(K, tr.witnesses[k]);
        if (cfg.format == "json") {
            json j;
            j["t"] = fmt(tr.grid[k]);
            j["delta"] = fmt(tr.values[k]);
            j["certified"] = static_cast<bool>(tr.certified[k]);
            j["witness"] = w;
            j["log_delta"] = fmt(mp::log(tr.values[k]));
            doc << j.dump() << "\n";
        } else {
            doc << fmt(tr.grid[k]) << "," << fmt(tr.values[k]) << "," << (tr.certified[k] ? "true" : "false") << ",\""
                << w << "\"," << fmt(mp::log(tr.values[k])) << "\n";
        }
    }
    return tr.all_certified() ? kExitOk : kExitInconclusive;
}

inline int cmd_exponent(const RunConfig& cfg, const PointArgs& pa, const std::string& tmin, const std::string& tmax,
                        int points, const std::string& phi_name, std::ostream& doc) {
    Field K = load_config_field(cfg);
    const KSVector x = parse_point(K, pa.x, pa.x_field);
    const Real a = parse_real(tmin), b = parse_real(tmax);
    if (points < 8 || !(a >= 1) || !(b > a)) throw Error(ErrorKind::InvalidInput, "need 1 <= tmin < tmax and >= 8 points");
    std::vector<Real> grid;
    for (int k = 0; k < points; ++k) grid.push_back(a * mp::pow(b / a, Real(k) / (points - 1)));
    grid.back() = b;
    auto est = uniform_exponent_estimate(K, x, grid, Phi::parse(phi_name));
    if (cfg.format == "json") {
        json j;
        j["omega_hat"] = est.infinite ? "inf" : fmt(est.omega_hat);
        j["t_min"] = fmt(est.t_min);
        j["t_max"] = fmt(est.t_max);
        j["residual"] = fmt(est.residual);
        j["unstable"] = est.unstable;
        j["table"] = json::array();
        for (std::size_t k = 0; k < est.t.size(); ++k) j["table"].push_back({{"t", fmt(est.t[k])}, {"eta", fmt(est.eta[k])}});
        doc << j.dump(2) << "\n";
    } else {
        doc << "t,eta\n";
        for (std::size_t k = 0; k < est.t.size(); ++k) doc << fmt(est.t[k]) << "," << fmt(est.eta[k]) << "\n";
    }
    return est.unstable ? kExitInconclusive : kExitOk;
}

struct ConstructArgs {
    std::string surface = "x1*x2";
    std::string box = "0,1,0,1";
    std::string zeta = "inv_pow:2";
    std::string phi = "house";
    int stages = 5;
    int dyadic_bits = 224;
};

inline int cmd_construct(const RunConfig& cfg, const ConstructArgs& ca, std::ostream& doc) {
    Field K = load_config_field(cfg);
    auto S = SurfaceSpec::parse(K, ca.surface, ca.box);
    ConstructOptions opt;
    opt.stages = ca.stages;
    opt.zeta = Zeta::parse(ca.zeta);
    opt.phi = Phi::parse(ca.phi);
    opt.seed = cfg.seed;
    opt.dyadic_bits = ca.dyadic_bits;
    auto out = construct_singular(K, S, opt);
    if (cfg.format == "json") {
        write_certificate(out, doc);
    } else {
        doc << "index,family,phi,zeta_phi,e_bound,margin\n";
        for (const auto& st : out.stages)
            doc << st.index << "," << st.line.family << "," << fmt(st.phi) << "," << fmt(st.zeta_phi) << ","
                << fmt(st.e_bound) << "," << fmt(st.e_margin) << "\n";
    }
    return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& cert_path, int samples, bool skip_eta,
                      std::ostream& doc) {
    auto c = load_certificate(cert_path);
    VerifyOptions opt;
    opt.sample_density = samples;
    opt.eta_cross_check = !skip_eta;
    auto rep = verify_certificate(c, opt);
    if (cfg.format == "json") {
        json j;
        j["ok"] = rep.ok();
        j["checks"] = json::array();
        for (const auto& ch : rep.checks)
            j["checks"].push_back({{"name", ch.name}, {"stage", ch.stage}, {"ok", ch.ok}, {"detail", ch.detail}});
        j["warnings"] = rep.warnings;
        j["irrationality"] = {{"relation", rep.irrationality.relation},
                              {"bound", fmt(rep.irrationality.bound)},
                              {"relation_rank", rep.irrationality.relation_rank}};
        doc << j.dump(2) << "\n";
    } else {
        doc << "check,stage,ok,detail\n";
        for (const auto& ch : rep.checks)
            doc << ch.name << "," << ch.stage << "," << (ch.ok ? "true" : "false") << ",\"" << ch.detail << "\"\n";
    }
    return rep.ok() ? kExitOk : kExitError;
}

struct PaucityArgs {
    int samples = 200;
    int m = 1;
    std::string box = "0,1";
    std::string tmax = "15";
    std::string epsilon = "0.1";
    std::string step = "0.25";
    std::string plant;  // elements of K; the first sample becomes tau(alpha)
};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int cmd_paucity(const RunConfig& cfg, const PaucityArgs& pa, std::ostream& doc) {
    Field K = load_config_field(cfg);
    const int d = K.degree();
    if (pa.samples < 1) throw Error(ErrorKind::InvalidInput, "need at least one sample");
    if (pa.m < 1) throw Error(ErrorKind::InvalidInput, "m must be positive");
    auto bounds = split_on(pa.box, ',');
    if (bounds.size() != 2) throw Error(ErrorKind::InvalidInput, "--box is lo,hi");
    const Real lo = parse_real(bounds[0]), hi = parse_real(bounds[1]);
    if (!(lo < hi)) throw Error(ErrorKind::InvalidInput, "--box has lo >= hi");
    DiagnosticOptions dopt;
    dopt.t_max = parse_real(pa.tmax);
    dopt.epsilon = parse_real(pa.epsilon);
    dopt.step = parse_real(pa.step);

    std::mt19937_64 rng(cfg.seed);
    std::vector<Verdict> verdicts;
    long counts[3] = {0, 0, 0};
    for (int k = 0; k < pa.samples; ++k) {
        KSVector x(d, pa.m);
        if (k == 0 && !pa.plant.empty()) {
            x = parse_point(K, "", pa.plant);
            if (static_cast<int>(x.cols()) != pa.m) throw Error(ErrorKind::InvalidInput, "--plant needs m elements");
        } else {
            for (int s = 0; s < d; ++s)
                for (int i = 0; i < pa.m; ++i) x(s, i) = lo + (hi - lo) * Real(unit_uniform(rng));
        }
        verdicts.push_back(singularity_diagnostic(K, x, dopt));
        ++counts[static_cast<int>(verdicts.back().kind)];
    }
    const Real frac = Real(counts[0]) / pa.samples;
    std::vector<Real> floors;
    for (const auto& v : verdicts) floors.push_back(v.floor);
    std::sort(floors.begin(), floors.end());
    auto quantile = [&](double q) { return floors[static_cast<std::size_t>(q * (floors.size() - 1) + 0.5)]; };

    if (cfg.format == "json") {
        json j;
        j["samples"] = pa.samples;
        j["seed"] = cfg.seed;
        j["m"] = pa.m;
        j["t_max"] = fmt(dopt.t_max);
        j["epsilon"] = fmt(dopt.epsilon);
        j["divergent"] = counts[0];
        j["nondivergent"] = counts[1];
        j["inconclusive"] = counts[2];
        j["divergent_fraction"] = fmt(frac);
        j["floor_quantiles"] = {{"min", fmt(floors.front())}, {"q10", fmt(quantile(0.1))},
                                {"median", fmt(quantile(0.5))}, {"q90", fmt(quantile(0.9))},
                                {"max", fmt(floors.back())}};
        json hist = json::object();
        for (const auto& f : floors) {
            const long b = mp::floor(mp::log10(f)).convert_to<long>();
            hist[std::to_string(b)] = hist.value(std::to_string(b), 0) + 1;
        }
        j["floor_log10_histogram"] = hist;
        doc << j.dump(2) << "\n";
    } else {
        doc << "sample,verdict,floor,onset,slope\n";
        for (std::size_t k = 0; k < verdicts.size(); ++k)
            doc << k << "," << to_string(verdicts[k].kind) << "," << fmt(verdicts[k].floor) << ","
                << fmt(verdicts[k].onset) << "," << fmt(verdicts[k].slope) << "\n";
    }
    return kExitOk;
}

/// Entry point.  `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diophantine approximation over totally real number fields", "dioph"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags override it");
    RunConfig cfg;
    app.add_option("--field", cfg.field_path, "field description file");
    app.add_option("--precision", cfg.precision, "working precision in bits")->check(CLI::Range(64, 256));
    app.add_option("--out", cfg.out_path, "output path (default stdout)");
    app.add_option("--seed", cfg.seed, "seed for sampling and rational selection");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();

    auto* field = app.add_subcommand("field", "report degree, discriminant, roots and basis");

    PointArgs pa;
    auto add_point = [&](CLI::App* sc) {
        sc->add_option("--x", pa.x, "point: places separated by ';', coordinates by ','");
        sc->add_option("--x-field", pa.x_field, "point tau(alpha): elements of K separated by ';'");
    };
    std::string q_text = "2..64";
    auto* dir = app.add_subcommand("dirichlet", "Dirichlet solutions for a sweep of Q");
    add_point(dir);
    dir->add_option("--Q", q_text, "a..b, a comma list, or one value");

    std::string t0 = "0", tmax = "15", step = "0.25";
    auto* ft = app.add_subcommand("flow-trace", "systole of g_t u_x O_K^{m+1} along a t-grid");
    add_point(ft);
    ft->add_option("--t0", t0);
    ft->add_option("--tmax", tmax);
    ft->add_option("--step", step);

    std::string etmin = "2", etmax = "64", phi_name = "house";
    int points = 8;
    auto* ex = app.add_subcommand("exponent", "uniform exponent estimate from eta on a geometric grid");
    add_point(ex);
    ex->add_option("--tmin", etmin);
    ex->add_option("--tmax", etmax);
    ex->add_option("--points", points);
    ex->add_option("--phi", phi_name, "house or content");

    ConstructArgs ca;
    auto* co = app.add_subcommand("construct", "build a singular point with stage certificates");
    co->add_option("--surface", ca.surface, "f_1; ...; f_{m-2} in x1, x2 (empty for m = 2)");
    co->add_option("--box", ca.box, "lo1,hi1,lo2,hi2 (one group, or one per place separated by ';')");
    co->add_option("--zeta", ca.zeta, "inv_pow:a or exp_over_pow:nu");
    co->add_option("--phi", ca.phi, "house or content");
    co->add_option("--stages", ca.stages);
    co->add_option("--dyadic-bits", ca.dyadic_bits);

    std::string cert;
    int vsamples = 5;
    bool skip_eta = false;
    auto* ve = app.add_subcommand("verify", "re-check a certificate file");
    ve->add_option("certificate", cert, "certificate JSON")->required();
    ve->add_option("--samples", vsamples, "grid points per axis for the sampled cross-check");
    ve->add_flag("--skip-eta", skip_eta, "skip the eta cross-check");

    PaucityArgs pp;
    auto* pc = app.add_subcommand("paucity", "fraction of uniform samples with divergent systole");
    pc->add_option("--samples", pp.samples);
    pc->add_option("--m", pp.m);
    pc->add_option("--box", pp.box, "lo,hi for every coordinate");
    pc->add_option("--tmax", pp.tmax);
    pc->add_option("--epsilon", pp.epsilon);
    pc->add_option("--step", pp.step);
    pc->add_option("--plant", pp.plant, "use tau(alpha) as the first sample");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    std::ostringstream doc;
    int code = kExitOk;
    try {
        if (*field) code = cmd_field(cfg, doc);
        else if (*dir) code = cmd_dirichlet(cfg, pa, q_text, doc);
        else if (*ft) code = cmd_flow_trace(cfg, pa, t0, tmax, step, doc);
        else if (*ex) code = cmd_exponent(cfg, pa, etmin, etmax, points, phi_name, doc);
        else if (*co) code = cmd_construct(cfg, ca, doc);
        else if (*ve) code = cmd_verify(cfg, cert, vsamples, skip_eta, doc);
        else if (*pc) code = cmd_paucity(cfg, pp, doc);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    if (cfg.out_path.empty()) {
        out << doc.str();
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << cfg.out_path << "\n";
            return kExitError;
        }
        f << doc.str();
    }
    return code;
}

}  // namespace dioph::cli
