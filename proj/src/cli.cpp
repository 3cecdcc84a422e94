#include "flipkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "flipkit/constants.hpp"
#include "flipkit/cpw.hpp"
#include "flipkit/device.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/fieldsolve.hpp"
#include "flipkit/network.hpp"
#include "flipkit/plot.hpp"
#include "flipkit/transmon.hpp"
#include "flipkit/units.hpp"

namespace flipkit::cli {

namespace {

using Json = nlohmann::ordered_json;
using units::Dimension;

double quantity(const std::string& flag, const std::string& text, Dimension d) {
    try {
        return units::parse_quantity(text, d);
    } catch (const DomainError& e) {
        throw ValidationError(fmt::format("{}: {}", flag, e.what()));
    }
}

std::optional<double> quantity(const std::string& flag, const std::optional<std::string>& text, Dimension d) {
    if (!text) return std::nullopt;
    return quantity(flag, *text, d);
}

Json number(double v) { return Json(round_to_12_digits(v)); }

void print_pairs(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::size_t width = 0;
    for (const auto& [k, v] : pairs) width = std::max(width, k.size());
    for (const auto& [k, v] : pairs) out << fmt::format("{:<{}}  {}\n", k, width, v);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError(fmt::format("cannot write '{}'", path));
    return f;
}

unsigned thread_cap() {
    const char* env = std::getenv("FLIPKIT_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw ValidationError(fmt::format("FLIPKIT_THREADS='{}' is not a nonnegative integer", env));
    return static_cast<unsigned>(v);
}

struct CpwArgs {
    std::string w, s, eps_sub = "11.9", eps_sup = "1";
    std::optional<std::string> target_z0;
};

struct TransmonArgs {
    std::string cj = "8fF", cs = "81fF", lj = "8.75nH";
    double flux = 0.0;
    std::optional<std::string> ceff;
    int cutoff = transmon::kDefaultChargeCutoff;
    int levels = 4;
    double ng = 0.0;
};

struct SmatrixArgs {
    std::string fr, ql, qc;
    std::optional<std::string> qc_opt;
    std::string chi = "0";
    int state = 0;
    int points = 2001;
    double linewidths = 10.0;
    std::string z_ref = "50";
};

struct MatchArgs {
    std::string line_z0 = "49.533";
    std::string z_min = "40", z_max = "60", step = "0.1";
    std::string band_lo = "1GHz", band_hi = "20GHz";
    std::string length = "4.2956mm";
    double eps_eff = 6.45;
};

struct FieldArgs {
    std::optional<std::string> config;
    std::string w = "10um", s = "5.806um", eps_sub = "11.9", eps_sup = "1";
    double h_fine = 1.0 / 40.0;
    double margin = 10.0;
    std::optional<std::string> dump;
};

struct SweepArgs {
    std::string param, grid;
    std::vector<std::string> columns;
};

struct Common {
    bool json = false;
    std::optional<std::string> out_path;
    std::optional<std::string> plot_path;
    bool logx = false;
    bool logy = false;
    std::string config = "paper-default";
};

void cmd_cpw(const CpwArgs& a, const Common& c, std::ostream& out) {
    const double w = quantity("--w", a.w, Dimension::length);
    const double eps_sub = quantity("--eps-sub", a.eps_sub, Dimension::dimensionless);
    const double eps_sup = quantity("--eps-sup", a.eps_sup, Dimension::dimensionless);
    const double eps_eff = cpw::effective_permittivity(eps_sub, eps_sup);
    double s = 0.0;
    if (a.target_z0) {
        if (!a.s.empty()) throw ValidationError("give either --s or --z0, not both");
        s = cpw::solve_gap_for_impedance(w, eps_eff, quantity("--z0", *a.target_z0, Dimension::impedance));
    } else {
        if (a.s.empty()) throw ValidationError("--s or --z0 is required");
        s = quantity("--s", a.s, Dimension::length);
    }
    cpw::CpwGeometry g{w, s, eps_sub, eps_sup, 0.0};
    g.validate();
    const auto k = cpw::modulus_k0(w, s);
    const double z0 = cpw::characteristic_impedance(w, s, eps_eff);
    const double vp = cpw::phase_velocity(eps_eff);
    if (c.json) {
        Json j;
        j["trace_width_m"] = number(w);
        j["trace_gap_m"] = number(s);
        j["eps_eff"] = number(eps_eff);
        j["k0"] = number(k.k0);
        j["z0_ohm"] = number(z0);
        j["phase_velocity_m_per_s"] = number(vp);
        out << j.dump(2) << '\n';
        return;
    }
    print_pairs(out, {{"trace_width", format_number(w) + " m"},
                      {"trace_gap", format_number(s) + " m"},
                      {"eps_eff", format_number(eps_eff)},
                      {"k0", format_number(k.k0)},
                      {"z0", format_number(z0) + " ohm"},
                      {"phase_velocity", format_number(vp) + " m/s"}});
}

void cmd_transmon(const TransmonArgs& a, const Common& c, std::ostream& out) {
    transmon::TransmonParams p;
    p.junction_capacitance = quantity("--cj", a.cj, Dimension::capacitance);
    p.shunt_capacitance = quantity("--cs", a.cs, Dimension::capacitance);
    p.junction_inductance = quantity("--lj", a.lj, Dimension::inductance);
    p.flux_bias = a.flux;
    p.effective_capacitance = quantity("--ceff", a.ceff, Dimension::capacitance);
    p.validate();
    const auto scales = transmon::energy_scales(p);
    const double fq = transmon::transmon_frequency(scales);
    const double alpha = transmon::anharmonicity(scales);
    const auto oracle = transmon::cpb_transitions(scales, a.ng, a.cutoff);
    const auto levels = transmon::cpb_spectrum(scales, a.ng, a.cutoff, a.levels);
    const double h = constants::planck;
    if (c.json) {
        Json j;
        j["total_capacitance_f"] = number(p.total_capacitance());
        j["charging_energy_hz"] = number(scales.charging_energy / h);
        j["josephson_energy_hz"] = number(scales.josephson_energy / h);
        j["ej_ec_ratio"] = number(transmon::ej_ec_ratio(scales));
        j["transmon_regime"] = scales.transmon_regime();
        j["frequency_hz"] = number(fq);
        j["anharmonicity_hz"] = number(alpha);
        j["oracle_f01_hz"] = number(oracle.f01);
        j["oracle_f12_hz"] = number(oracle.f12);
        j["oracle_anharmonicity_hz"] = number(oracle.anharmonicity);
        Json lv = Json::array();
        for (double e : levels) lv.push_back(number((e - levels.front()) / h));
        j["levels_hz"] = lv;
        out << j.dump(2) << '\n';
        return;
    }
    print_pairs(out, {{"total_capacitance", format_number(p.total_capacitance()) + " F"},
                      {"E_c/h", format_number(scales.charging_energy / h) + " Hz"},
                      {"E_J/h", format_number(scales.josephson_energy / h) + " Hz"},
                      {"E_J/E_c", format_number(transmon::ej_ec_ratio(scales))},
                      {"frequency", format_number(fq) + " Hz"},
                      {"anharmonicity", format_number(alpha) + " Hz"},
                      {"oracle_f01", format_number(oracle.f01) + " Hz"},
                      {"oracle_anharmonicity", format_number(oracle.anharmonicity) + " Hz"}});
    if (!scales.transmon_regime()) out << "warning: E_J/E_c < 20, outside the transmon regime\n";
}

void cmd_smatrix(const SmatrixArgs& a, const Common& c, std::ostream& out) {
    network::NotchResonator r;
    r.resonant_frequency = quantity("--fr", a.fr, Dimension::frequency);
    r.loaded_q = quantity("--ql", a.ql, Dimension::dimensionless);
    r.coupling_q = a.qc_opt ? quantity("--qc", *a.qc_opt, Dimension::dimensionless) : r.loaded_q;
    r.dispersive_shift = quantity("--chi", a.chi, Dimension::frequency);
    r.qubit_state = a.state;
    r.validate();
    const double z_ref = quantity("--z-ref", a.z_ref, Dimension::impedance);
    const auto response = network::notch_s21(r, network::notch_grid(r, a.linewidths, a.points), z_ref);
    const auto fit = network::extract_q_fwhm(response);

    if (c.out_path) {
        auto f = open_out(*c.out_path);
        response.write_csv(f);
    }
    if (c.plot_path) {
        Table t{{"freq_hz", "s21_db"}, {}};
        const auto& s21 = response.trace("s21");
        for (std::size_t i = 0; i < s21.size(); ++i) {
            t.rows.push_back({response.frequencies()[i], 20.0 * std::log10(std::max(std::abs(s21[i]), 1e-15))});
        }
        emit_plot(*c.plot_path, t, "freq_hz", {"s21_db"}, {c.logx, c.logy, "|S21| (dB)"});
    }
    if (c.json) {
        Json j;
        j["dip_frequency_hz"] = number(r.dip_frequency());
        j["extracted_frequency_hz"] = number(fit.resonant_frequency);
        j["extracted_q"] = number(fit.quality_factor);
        j["bandwidth_hz"] = number(fit.bandwidth);
        out << j.dump(2) << '\n';
        return;
    }
    print_pairs(out, {{"dip_frequency", format_number(r.dip_frequency()) + " Hz"},
                      {"extracted_frequency", format_number(fit.resonant_frequency) + " Hz"},
                      {"extracted_q", format_number(fit.quality_factor)},
                      {"bandwidth", format_number(fit.bandwidth) + " Hz"}});
}

void cmd_match(const MatchArgs& a, const Common& c, std::ostream& out) {
    const double line_z0 = quantity("--line-z0", a.line_z0, Dimension::impedance);
    const numerics::RealInterval band(quantity("--band-lo", a.band_lo, Dimension::frequency),
                                      quantity("--band-hi", a.band_hi, Dimension::frequency));
    const auto sweep = network::match_sweep(line_z0, quantity("--z-min", a.z_min, Dimension::impedance),
                                            quantity("--z-max", a.z_max, Dimension::impedance),
                                            quantity("--step", a.step, Dimension::impedance), band,
                                            quantity("--length", a.length, Dimension::length), a.eps_eff);
    Table t{{"z_port_ohm", "worst_s11_db"}, {}};
    for (const auto& p : sweep.points) t.rows.push_back({p.z_port, p.worst_s11_db});
    if (c.out_path) {
        auto f = open_out(*c.out_path);
        t.write_csv(f);
    }
    if (c.plot_path) emit_plot(*c.plot_path, t, "z_port_ohm", {"worst_s11_db"}, {c.logx, c.logy, "worst-case S11"});
    if (c.json) {
        Json j;
        j["line_z0_ohm"] = number(line_z0);
        j["best_z_port_ohm"] = number(sweep.best_z_port);
        j["best_worst_s11_db"] = number(sweep.best_worst_s11_db);
        out << j.dump(2) << '\n';
        return;
    }
    print_pairs(out, {{"line_z0", format_number(line_z0) + " ohm"},
                      {"best_z_port", format_number(sweep.best_z_port) + " ohm"},
                      {"best_worst_s11", format_number(sweep.best_worst_s11_db) + " dB"}});
}

void cmd_fieldsolve(const FieldArgs& a, const Common& c, std::ostream& out) {
    double w = 0, s = 0, eps_sub = 0, eps_sup = 0;
    if (a.config) {
        const auto spec = device::load_spec(*a.config);
        const auto g = spec.bottom().cpw_geometry(spec.stack);
        w = g.trace_width;
        s = g.trace_gap;
        eps_sub = g.eps_substrate;
        eps_sup = g.eps_superstrate;
    } else {
        w = quantity("--w", a.w, Dimension::length);
        s = quantity("--s", a.s, Dimension::length);
        eps_sub = quantity("--eps-sub", a.eps_sub, Dimension::dimensionless);
        eps_sup = quantity("--eps-sup", a.eps_sup, Dimension::dimensionless);
    }
    fieldsolve::CpwSectionOptions options;
    options.h_fine_fraction = a.h_fine;
    options.margin_factor = a.margin;
    const auto cs = fieldsolve::cpw_cross_section(w, s, eps_sub, eps_sup, options);
    const auto solution = fieldsolve::solve_potential(cs);
    const auto ez = fieldsolve::extract_eps_eff_and_z0(cs);
    const auto p = fieldsolve::energy_participation(cs, solution);
    const double conformal = cpw::characteristic_impedance(w, s, cpw::effective_permittivity(eps_sub, eps_sup));
    if (a.dump) {
        auto f = open_out(*a.dump);
        fieldsolve::write_potential_csv(f, cs, solution);
    }
    if (c.json) {
        Json j;
        j["cells_x"] = solution.nx;
        j["cells_y"] = solution.ny;
        j["iterations"] = solution.iterations;
        j["capacitance_f_per_m"] = number(ez.capacitance);
        j["eps_eff"] = number(ez.eps_eff);
        j["z0_ohm"] = number(ez.z0);
        j["z0_conformal_ohm"] = number(conformal);
        Json pj;
        for (const auto& [name, v] : p) pj[name] = number(v);
        j["participation"] = pj;
        out << j.dump(2) << '\n';
        return;
    }
    std::vector<std::pair<std::string, std::string>> rows = {
        {"grid", fmt::format("{} x {}", solution.nx, solution.ny)},
        {"iterations", std::to_string(solution.iterations)},
        {"capacitance", format_number(ez.capacitance) + " F/m"},
        {"eps_eff", format_number(ez.eps_eff)},
        {"z0", format_number(ez.z0) + " ohm"},
        {"z0_conformal", format_number(conformal) + " ohm"}};
    for (const auto& [name, v] : p) rows.emplace_back("participation_" + name, format_number(v));
    print_pairs(out, rows);
}

void cmd_analyze(const Common& c, std::ostream& out) {
    const auto report = device::analyze(device::load_spec(c.config));
    const std::string json = report.to_json();
    if (c.out_path) {
        auto f = open_out(*c.out_path);
        f << json;
    }
    if (c.json) {
        out << json;
        return;
    }
    out << "device " << report.device << '\n';
    auto print_row = [&](const device::ReportRow& r) {
        out << '\n' << r.name << " (" << r.kind << ")\n";
        for (const auto& f : r.fields) {
            out << fmt::format("  {:<26} {:>20} {:<4} [{}]\n", f.name, f.value ? format_number(*f.value) : "n/a", f.unit,
                               f.source);
        }
    };
    for (const auto& r : report.modes) print_row(r);
    print_row(report.coupling);
    out << "\nnotes\n";
    for (const auto& n : report.notes) out << "  - " << n << '\n';
}

void cmd_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    const auto spec = device::load_spec(c.config);
    const auto param = device::parse_sweep_parameter(a.param);
    const auto grid = device::parse_grid(a.grid);
    const auto result = device::sweep(spec, param, grid, thread_cap());
    if (c.out_path) {
        auto f = open_out(*c.out_path);
        result.table.write_csv(f);
    } else {
        result.table.write_csv(out);
    }
    if (c.plot_path) {
        std::vector<std::string> columns = a.columns;
        if (columns.empty()) {
            columns = param == device::SweepParameter::loss_tangent
                          ? std::vector<std::string>{"bottom_qubit_q", "top_qubit_q"}
                          : std::vector<std::string>{"g"};
        }
        emit_plot(*c.plot_path, result.table, "param_value", columns, {c.logx, c.logy, result.parameter});
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"flipkit: flip-chip superconducting device calculator", "flipkit"};
    app.require_subcommand(1, 1);

    Common common;
    CpwArgs cpw_args;
    TransmonArgs tr;
    SmatrixArgs sm;
    MatchArgs ma;
    FieldArgs fa;
    SweepArgs sw;

    auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", common.json, "Machine-readable output"); };
    auto add_plot = [&](CLI::App* sub) {
        sub->add_option("--plot", common.plot_path, "Write an SVG chart");
        sub->add_flag("--logx", common.logx, "Log x axis");
        sub->add_flag("--logy", common.logy, "Log y axis");
    };

    auto* cpw_cmd = app.add_subcommand("cpw", "CPW effective permittivity and impedance");
    cpw_cmd->add_option("--w", cpw_args.w, "Trace width")->required();
    cpw_cmd->add_option("--s", cpw_args.s, "Trace gap");
    cpw_cmd->add_option("--z0", cpw_args.target_z0, "Target impedance; solves for the gap");
    cpw_cmd->add_option("--eps-sub", cpw_args.eps_sub, "Substrate permittivity")->capture_default_str();
    cpw_cmd->add_option("--eps-sup", cpw_args.eps_sup, "Superstrate permittivity")->capture_default_str();
    add_json(cpw_cmd);

    auto* tr_cmd = app.add_subcommand("transmon", "Transmon energies, frequency and charge-basis oracle");
    tr_cmd->add_option("--cj", tr.cj, "Junction capacitance")->capture_default_str();
    tr_cmd->add_option("--cs", tr.cs, "Shunt capacitance")->capture_default_str();
    tr_cmd->add_option("--lj", tr.lj, "Junction inductance")->capture_default_str();
    tr_cmd->add_option("--flux", tr.flux, "Flux bias in flux quanta")->capture_default_str();
    tr_cmd->add_option("--ceff", tr.ceff, "Effective capacitance replacing C_j + C_s");
    tr_cmd->add_option("--cutoff", tr.cutoff, "Charge basis cutoff")->capture_default_str();
    tr_cmd->add_option("--levels", tr.levels, "Levels to report")->capture_default_str();
    tr_cmd->add_option("--ng", tr.ng, "Offset charge")->capture_default_str();
    add_json(tr_cmd);

    auto* sm_cmd = app.add_subcommand("smatrix", "Notch resonator S21 and -3 dB Q extraction");
    sm_cmd->add_option("--fr", sm.fr, "Resonant frequency")->required();
    sm_cmd->add_option("--ql", sm.ql, "Loaded Q")->required();
    sm_cmd->add_option("--qc", sm.qc_opt, "Coupling Q (defaults to loaded Q)");
    sm_cmd->add_option("--chi", sm.chi, "Dispersive shift")->capture_default_str();
    sm_cmd->add_option("--state", sm.state, "Qubit state 0 or 1")->capture_default_str();
    sm_cmd->add_option("--points", sm.points, "Grid points")->capture_default_str();
    sm_cmd->add_option("--linewidths", sm.linewidths, "Window half-width in linewidths")->capture_default_str();
    sm_cmd->add_option("--z-ref", sm.z_ref, "Reference impedance")->capture_default_str();
    sm_cmd->add_option("--out", common.out_path, "Write the S21 trace as CSV");
    add_plot(sm_cmd);
    add_json(sm_cmd);

    auto* ma_cmd = app.add_subcommand("match", "Worst-case reflection sweep over port impedance");
    ma_cmd->add_option("--line-z0", ma.line_z0, "Line impedance")->capture_default_str();
    ma_cmd->add_option("--z-min", ma.z_min, "Lowest port impedance")->capture_default_str();
    ma_cmd->add_option("--z-max", ma.z_max, "Highest port impedance")->capture_default_str();
    ma_cmd->add_option("--step", ma.step, "Port impedance step")->capture_default_str();
    ma_cmd->add_option("--band-lo", ma.band_lo, "Band start")->capture_default_str();
    ma_cmd->add_option("--band-hi", ma.band_hi, "Band stop")->capture_default_str();
    ma_cmd->add_option("--length", ma.length, "Line length")->capture_default_str();
    ma_cmd->add_option("--eps-eff", ma.eps_eff, "Effective permittivity")->capture_default_str();
    ma_cmd->add_option("--out", common.out_path, "Write the sweep as CSV");
    add_plot(ma_cmd);
    add_json(ma_cmd);

    auto* fs_cmd = app.add_subcommand("fieldsolve", "Quasi-static CPW cross-section solve");
    fs_cmd->add_option("--config", fa.config, "Take the bottom-chip geometry from a config");
    fs_cmd->add_option("--w", fa.w, "Trace width")->capture_default_str();
    fs_cmd->add_option("--s", fa.s, "Trace gap")->capture_default_str();
    fs_cmd->add_option("--eps-sub", fa.eps_sub, "Substrate permittivity")->capture_default_str();
    fs_cmd->add_option("--eps-sup", fa.eps_sup, "Superstrate permittivity")->capture_default_str();
    fs_cmd->add_option("--h-fine", fa.h_fine, "Finest cell as a fraction of w")->capture_default_str();
    fs_cmd->add_option("--margin", fa.margin, "Box half-size in apertures")->capture_default_str();
    fs_cmd->add_option("--dump-potential", fa.dump, "Write x,y,V rows as CSV");
    add_json(fs_cmd);

    auto* an_cmd = app.add_subcommand("analyze", "Full device report");
    an_cmd->add_option("--config", common.config, "Config file or preset name")->capture_default_str();
    an_cmd->add_option("--out", common.out_path, "Also write the JSON report to a file");
    add_json(an_cmd);

    auto* sw_cmd = app.add_subcommand("sweep", "Parametric sweep to CSV");
    sw_cmd->add_option("--config", common.config, "Config file or preset name")->capture_default_str();
    sw_cmd->add_option("--param", sw.param, "interlayer_thickness or loss_tangent")->required();
    sw_cmd->add_option("--grid", sw.grid, "a,b,c | lo:hi:N | lo:hi:logN")->required();
    sw_cmd->add_option("--out", common.out_path, "CSV path (stdout when omitted)");
    sw_cmd->add_option("--columns", sw.columns, "Columns to plot");
    add_plot(sw_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (cpw_cmd->parsed()) cmd_cpw(cpw_args, common, out);
        else if (tr_cmd->parsed()) cmd_transmon(tr, common, out);
        else if (sm_cmd->parsed()) cmd_smatrix(sm, common, out);
        else if (ma_cmd->parsed()) cmd_match(ma, common, out);
        else if (fs_cmd->parsed()) cmd_fieldsolve(fa, common, out);
        else if (an_cmd->parsed()) cmd_analyze(common, out);
        else if (sw_cmd->parsed()) cmd_sweep(sw, common, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace flipkit::cli
