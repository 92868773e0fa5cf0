// weylvol: root-system data, closed-form volumes, and spectral verification
// from the command line.
//
// Exit codes: 0 success, 1 tolerance failure, 2 usage/validation error.
// stdout carries data; stderr carries diagnostics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "weylvol/weylvol.hpp"

namespace {

using namespace weylvol;

struct Options {
    std::string group;
    std::string cartan_file;
    std::vector<std::string> scale;
    double t_start = 0.05;
    double t_stop = 0.002;
    int t_points = 8;
    bool grid_given = false;
    double rel_tol = 1e-6;
    std::string out;
    std::string format = "table";
    std::int64_t max_terms = 20'000'000;
};

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--group", o.group, "group spec, e.g. A2, B2xG2, A1xA1");
    cmd->add_option("--cartan-file", o.cartan_file, "JSON file with {\"cartan\": [[...]], \"scale\": [...]}");
    cmd->add_option("--scale", o.scale, "per-factor Gram scale (rational, e.g. 2 or 1/2)");
    cmd->add_option("--rel-tol", o.rel_tol, "heat-trace relative tolerance, in (0, 1e-3]");
    cmd->add_option("--out", o.out, "write output to this file instead of stdout");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--max-terms", o.max_terms, "lattice term budget per evaluation");
}

void add_grid_options(CLI::App* cmd, Options& o) {
    auto mark = [&o](double) { o.grid_given = true; };
    cmd->add_option("--t-start", o.t_start, "largest t of the log grid")->each([&o](std::string) { o.grid_given = true; });
    cmd->add_option("--t-stop", o.t_stop, "smallest t of the log grid")->each([&o](std::string) { o.grid_given = true; });
    cmd->add_option("--t-points", o.t_points, "number of grid points")->each([&o](std::string) { o.grid_given = true; });
    (void)mark;
}

rootsys::RootSystem build_system(const Options& o) {
    rootsys::RootSystemSpec spec;
    if (!o.cartan_file.empty()) {
        std::ifstream in(o.cartan_file);
        if (!in) throw std::invalid_argument("cannot open Cartan file: " + o.cartan_file);
        nlohmann::json doc = nlohmann::json::parse(in);
        spec = rootsys::spec_from_cartan_json(doc);
        for (const auto& s : o.scale) spec.scales.push_back(parse_rational(s));
    } else if (!o.group.empty()) {
        spec = rootsys::parse_group_spec(o.group);
        if (!o.scale.empty()) {
            std::vector<Rational> scales;
            for (const auto& s : o.scale) scales.push_back(parse_rational(s));
            if (scales.size() == 1) {
                for (auto& f : spec.factors) f.scale = scales[0];
            } else if (scales.size() == spec.factors.size()) {
                for (std::size_t i = 0; i < scales.size(); ++i) spec.factors[i].scale = scales[i];
            } else {
                throw std::invalid_argument("--scale needs one entry or one per factor");
            }
        }
    } else {
        throw std::invalid_argument("either --group or --cartan-file is required");
    }
    return rootsys::build_root_system(spec);
}

std::vector<double> make_grid(const Options& o, const rootsys::RootSystem& rs) {
    return o.grid_given ? verify::log_grid(o.t_start, o.t_stop, o.t_points)
                        : verify::default_t_grid(rs);
}

heat::HeatTraceOptions heat_options(const Options& o) {
    heat::HeatTraceOptions opt;
    opt.rel_tol = o.rel_tol;
    opt.max_terms = o.max_terms;
    return opt;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + o.out);
    f << text;
}

std::string join_coords(const std::vector<std::int64_t>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(sep);
        s += std::to_string(v[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------

int cmd_roots(const Options& o) {
    rootsys::RootSystem rs = build_system(o);
    if (o.format == "json") {
        nlohmann::ordered_json j;
        j["group"] = rs.name;
        j["r"] = rs.r;
        j["m"] = rs.m;
        j["n"] = rs.n;
        j["weyl_order"] = rs.weyl_order.str();
        j["cartan"] = rs.cartan;
        nlohmann::ordered_json gram = nlohmann::ordered_json::array();
        for (int i = 0; i < rs.r; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int jj = 0; jj < rs.r; ++jj) row.push_back(format_rational(rs.gram_weights(i, jj)));
            gram.push_back(std::move(row));
        }
        j["gram_weights"] = std::move(gram);
        j["rho"] = rs.rho;
        j["positive_roots"] = rs.positive_roots;
        nlohmann::ordered_json pair = nlohmann::ordered_json::array();
        for (const auto& p : rs.rho_pairings) pair.push_back(format_rational(p));
        j["rho_pairings"] = std::move(pair);
        j["hc_product"] = format_rational(rs.rho_pairing_product);
        emit(o, j.dump(2) + "\n");
        return 0;
    }
    if (o.format == "csv") {
        std::string s = "index,height,coords,pairing_with_rho\n";
        for (int k = 0; k < rs.m; ++k) {
            std::int64_t h = 0;
            for (auto c : rs.positive_roots[k]) h += c;
            s += std::to_string(k) + "," + std::to_string(h) + "," +
                 join_coords(rs.positive_roots[k], ' ') + "," +
                 format_rational(rs.rho_pairings[k]) + "\n";
        }
        emit(o, s);
        return 0;
    }
    std::ostringstream s;
    s << "group " << rs.name << "  r=" << rs.r << "  m=" << rs.m << "  n=" << rs.n
      << "  |W|=" << rs.weyl_order.str() << "\n";
    s << "rho = (" << join_coords(rs.rho, ',') << ")\n";
    s << "gram_weights:\n";
    for (int i = 0; i < rs.r; ++i) {
        s << "  ";
        for (int j = 0; j < rs.r; ++j) s << format_rational(rs.gram_weights(i, j)) << (j + 1 < rs.r ? " " : "");
        s << "\n";
    }
    s << "positive roots (simple-root coords) and <alpha, rho>:\n";
    for (int k = 0; k < rs.m; ++k)
        s << "  [" << join_coords(rs.positive_roots[k], ' ') << "]  " << format_rational(rs.rho_pairings[k])
          << "\n";
    emit(o, s.str());
    return 0;
}

int cmd_volume(const Options& o) {
    rootsys::RootSystem rs = build_system(o);
    volume::VolumeReport rep = volume::volume_report(rs);
    if (o.format == "json") {
        emit(o, volume::to_json(rep).dump(2) + "\n");
    } else if (o.format == "csv") {
        std::string s =
            "group,r,m,n,weyl_order,flag_volume,covol_weights,covol_coroots,torus_volume,group_volume,"
            "hc_product_exact\n";
        s += rep.group + "," + std::to_string(rep.r) + "," + std::to_string(rep.m) + "," +
             std::to_string(rep.n) + "," + rep.weyl_order.str() + "," + format_double(rep.flag_volume) +
             "," + format_double(rep.covol_weights) + "," + format_double(rep.covol_coroots) + "," +
             format_double(rep.torus_volume) + "," + format_double(rep.group_volume) + "," +
             format_rational(rep.hc_product_exact) + "\n";
        emit(o, s);
    } else {
        std::ostringstream s;
        s << "group " << rep.group << "  r=" << rep.r << "  m=" << rep.m << "  n=" << rep.n
          << "  |W|=" << rep.weyl_order.str() << "\n"
          << "flag_volume      = " << format_double(rep.flag_volume) << "   ((2pi)^m / "
          << format_rational(rep.hc_product_exact) << ")\n"
          << "covol_weights    = " << format_double(rep.covol_weights) << "\n"
          << "covol_coroots    = " << format_double(rep.covol_coroots) << "\n"
          << "torus_volume     = " << format_double(rep.torus_volume) << "\n"
          << "group_volume     = " << format_double(rep.group_volume) << "\n";
        emit(o, s.str());
    }
    return 0;
}

constexpr double kWeylLawTol = 0.01;       // rel_error gate for verify weyl-law
constexpr double kIntegrationTol = 1e-10;  // discrepancy gate per t sample

bool spectral_in_scope(const rootsys::RootSystem& rs) {
    return rs.n <= heat::HeatTraceOptions{}.spectral_dim_limit;
}

bool moment_in_scope(const rootsys::RootSystem& rs) { return rs.r <= 3 && 2 * rs.m <= 20; }

int run_weyl_law(const Options& o, const rootsys::RootSystem& rs, std::string& out_text) {
    if (!spectral_in_scope(rs)) {
        std::cerr << "weyl-law: dim G = " << rs.n
                  << " exceeds the spectral gate (30); formula-only output\n";
        volume::VolumeReport rep = volume::volume_report(rs);
        if (o.format == "json") {
            nlohmann::ordered_json j;
            j["group"] = rs.name;
            j["skipped"] = "spectral evaluation gated to dim G <= 30";
            j["formula_volume"] = rep.group_volume;
            j["formula_flag_volume"] = rep.flag_volume;
            out_text += j.dump(2) + "\n";
        } else {
            out_text += "weyl-law skipped (formula-only): vol(G) = " + format_double(rep.group_volume) +
                        ", vol(G/T) = " + format_double(rep.flag_volume) + "\n";
        }
        return 0;
    }
    verify::WeylLawReport rep = verify::weyl_law_check(rs, make_grid(o, rs), heat_options(o));
    if (o.format == "json")
        out_text += verify::to_json(rep).dump(2) + "\n";
    else if (o.format == "csv")
        out_text += heat::samples_to_csv(rep.samples);
    else {
        std::ostringstream s;
        s << "weyl-law " << rep.group << ": extrapolated=" << format_double(rep.extrapolated_volume)
          << " formula=" << format_double(rep.formula_volume)
          << " rel_error=" << format_double(rep.rel_error)
          << " slope=" << format_double(rep.fit_slope_loglog) << "\n"
          << "  spectral_flag=" << format_double(rep.spectral_flag_volume)
          << " formula_flag=" << format_double(rep.formula_flag_volume) << "\n";
        out_text += s.str();
    }
    if (rep.rel_error <= kWeylLawTol) return 0;
    std::cerr << "weyl-law: rel_error " << format_double(rep.rel_error) << " exceeds "
              << format_double(kWeylLawTol) << "\n";
    return 1;
}

int run_integration_formula(const Options& o, const rootsys::RootSystem& rs, bool explicit_request,
                            std::string& out_text) {
    if (!moment_in_scope(rs)) {
        if (explicit_request)
            throw std::invalid_argument("integration-formula: scope exceeded (rank <= 3, 2m <= 20)");
        std::cerr << "integration-formula: scope exceeded for " << rs.name << "; skipped\n";
        return 0;
    }
    const std::vector<double> ts = {0.3, 1.0, 3.0};
    std::vector<double> discs;
    bool ok = true;
    for (double t : ts) {
        double d = verify::integration_formula_check(rs, t);
        discs.push_back(d);
        ok = ok && d <= kIntegrationTol;
    }
    if (o.format == "json") {
        nlohmann::ordered_json j;
        j["group"] = rs.name;
        j["t_values"] = ts;
        j["discrepancies"] = discs;
        j["tolerance"] = kIntegrationTol;
        j["pass"] = ok;
        out_text += j.dump(2) + "\n";
    } else if (o.format == "csv") {
        std::string s = "t,discrepancy\n";
        for (std::size_t i = 0; i < ts.size(); ++i)
            s += format_double(ts[i]) + "," + format_double(discs[i]) + "\n";
        out_text += s;
    } else {
        std::ostringstream s;
        s << "integration-formula " << rs.name << ":";
        for (std::size_t i = 0; i < ts.size(); ++i)
            s << "  t=" << format_double(ts[i]) << " disc=" << format_double(discs[i]);
        s << "  => " << (ok ? "ok" : "FAIL") << "\n";
        out_text += s.str();
    }
    if (!ok)
        std::cerr << "integration-formula: discrepancy exceeds " << format_double(kIntegrationTol)
                  << "\n";
    return ok ? 0 : 1;
}

int run_em_suite(const Options& o, std::string& out_text) {
    verify::EmSuiteResult res = verify::em_regression_suite();
    if (o.format == "json")
        out_text += verify::to_json(res).dump(2) + "\n";
    else if (o.format == "csv") {
        std::string s = "name,pass,measured,detail\n";
        for (const auto& c : res.checks)
            s += c.name + "," + (c.pass ? "1" : "0") + "," + format_double(c.measured) + ",\"" +
                 c.detail + "\"\n";
        out_text += s;
    } else {
        std::ostringstream s;
        for (const auto& c : res.checks)
            s << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  (" << format_double(c.measured)
              << ": " << c.detail << ")\n";
        s << (res.all_pass ? "euler-maclaurin suite: all checks passed\n"
                           : "euler-maclaurin suite: FAILURES above\n");
        out_text += s.str();
    }
    return res.all_pass ? 0 : 1;
}

int cmd_verify(const Options& o, const std::string& which) {
    std::string out_text;
    int rc = 0;
    if (which == "euler-maclaurin") {
        rc = run_em_suite(o, out_text);
    } else {
        rootsys::RootSystem rs = build_system(o);
        if (which == "weyl-law") {
            rc = run_weyl_law(o, rs, out_text);
        } else if (which == "integration-formula") {
            rc = run_integration_formula(o, rs, true, out_text);
        } else {  // all
            int a = run_weyl_law(o, rs, out_text);
            int b = run_integration_formula(o, rs, false, out_text);
            int c = run_em_suite(o, out_text);
            rc = (a || b || c) ? 1 : 0;
        }
    }
    emit(o, out_text);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"root-system volumes and spectral verification"};
    app.require_subcommand(1);
    Options o;

    CLI::App* roots = app.add_subcommand("roots", "dump exact root-system data");
    add_common_options(roots, o);

    CLI::App* vol = app.add_subcommand("volume", "closed-form volume report");
    add_common_options(vol, o);

    CLI::App* ver = app.add_subcommand("verify", "run verification checks");
    add_common_options(ver, o);
    add_grid_options(ver, o);
    std::string which;
    ver->add_option("which", which, "weyl-law | euler-maclaurin | integration-formula | all")
        ->required()
        ->check(CLI::IsMember({"weyl-law", "euler-maclaurin", "integration-formula", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (roots->parsed()) return cmd_roots(o);
        if (vol->parsed()) return cmd_volume(o);
        return cmd_verify(o, which);
    } catch (const heat::TruncationError& e) {
        std::cerr << "error: " << e.what() << " (partial z=" << format_double(e.partial().z)
                  << ", terms=" << e.partial().terms_used << ")\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
