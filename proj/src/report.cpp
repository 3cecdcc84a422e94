#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "flipkit/constants.hpp"
#include "flipkit/coupling.hpp"
#include "flipkit/device.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/fieldsolve.hpp"
#include "flipkit/loss.hpp"
#include "flipkit/network.hpp"

namespace flipkit::device {

namespace {

constexpr double kParticipationFineFraction = 1.0 / 20.0;

struct RowBuilder {
    ReportRow row;

    RowBuilder(std::string name, std::string kind) { row = {std::move(name), std::move(kind), {}}; }

    void add(std::string field, std::optional<double> value, std::string unit, std::string source) {
        row.fields.push_back({std::move(field), value, std::move(unit), std::move(source)});
    }
};

double resonator_centre(const ChipSpec& chip, const cpw::FrequencyInterval& interval) {
    return chip.resonator_reference_frequency.value_or(0.5 * (interval.lower + interval.upper));
}

network::NotchResonator notch_for(const ChipSpec& chip, const StackSpec& stack) {
    const auto interval = cpw::quarter_wave_interval(chip.resonator(stack));
    network::NotchResonator res;
    res.resonant_frequency = resonator_centre(chip, interval);
    res.loaded_q = chip.resonator_loaded_q;
    res.coupling_q = chip.resonator_coupling_q;
    return res;
}

transmon::EnergyScales primary_scales(const transmon::TransmonParams& params) {
    return transmon::energy_scales(params);
}

transmon::EnergyScales literal_scales(const transmon::TransmonParams& params) {
    transmon::TransmonParams literal = params;
    literal.effective_capacitance.reset();
    return transmon::energy_scales(literal);
}

std::array<Participation, 2> participations(const DeviceSpec& spec) {
    if (spec.loss.participation_substrate && spec.loss.participation_interlayer) {
        const Participation p{*spec.loss.participation_substrate, *spec.loss.participation_interlayer};
        return {p, p};
    }
    const Participation first = cross_section_participation(spec.bottom(), spec.stack);
    const auto& a = spec.bottom();
    const auto& b = spec.top();
    if (a.trace_width == b.trace_width && a.trace_gap == b.trace_gap) return {first, first};
    return {first, cross_section_participation(b, spec.stack)};
}

loss::LossBudget qubit_budget(const DeviceSpec& spec, const ChipSpec& chip, const Participation& p) {
    loss::LossBudget budget;
    budget.mode_frequency = chip.qubit_reference_frequency;
    budget.baseline_q = chip.qubit_baseline_q;
    budget.eta = spec.loss.eta;
    budget.regions = {{"substrate", p.substrate, spec.stack.substrate_tan_delta},
                      {"interlayer", p.interlayer, spec.stack.interlayer_tan_delta}};
    return budget;
}

ReportRow qubit_row(const DeviceSpec& spec, const ChipSpec& chip, const Participation& p, std::vector<std::string>& notes) {
    RowBuilder b(chip.name + "_qubit", "qubit");
    const auto literal = literal_scales(chip.transmon);
    const auto scales = primary_scales(chip.transmon);
    const bool calibrated = chip.transmon.effective_capacitance.has_value();

    b.add("total_capacitance", chip.transmon.total_capacitance(), "F", "transmon.total_capacitance");
    b.add("frequency_literal", transmon::transmon_frequency(literal), "Hz", "transmon.transmon_frequency(C_j + C_s)");
    b.add("frequency_calibrated",
          calibrated ? std::optional<double>(transmon::transmon_frequency(scales)) : std::nullopt, "Hz",
          "transmon.transmon_frequency(C_eff)");
    b.add("charging_energy", scales.charging_energy / constants::planck, "Hz", "transmon.charging_energy");
    b.add("josephson_energy", scales.josephson_energy / constants::planck, "Hz", "transmon.squid_josephson_energy");
    b.add("ej_ec_ratio", transmon::ej_ec_ratio(scales), "", "transmon.ej_ec_ratio");
    b.add("anharmonicity", transmon::anharmonicity(scales), "Hz", "transmon.anharmonicity");

    const auto oracle = transmon::cpb_transitions(scales);
    b.add("oracle_frequency", oracle.f01, "Hz", "transmon.cpb_transitions");
    b.add("oracle_anharmonicity", oracle.anharmonicity, "Hz", "transmon.cpb_transitions");

    if (!scales.transmon_regime()) {
        notes.push_back(fmt::format("{}_qubit: E_J/E_c = {} is outside the transmon regime; closed forms are approximate",
                                    chip.name, format_number(transmon::ej_ec_ratio(scales))));
    }

    std::optional<double> chi;
    if (chip.qubit_resonator_g) {
        const double f_q = transmon::transmon_frequency(scales);
        const double f_r = resonator_centre(chip, cpw::quarter_wave_interval(chip.resonator(spec.stack)));
        chi = coupling::dispersive_shift(*chip.qubit_resonator_g, f_q - f_r, transmon::anharmonicity(scales));
    }
    b.add("dispersive_shift", chi, "Hz", "coupling.dispersive_shift");

    const auto budget = qubit_budget(spec, chip, p);
    const double q = loss::q_with_dielectric(budget);
    b.add("reference_frequency", chip.qubit_reference_frequency, "Hz", "config");
    b.add("baseline_q", chip.qubit_baseline_q, "", "config");
    b.add("q_total", q, "", "loss.q_with_dielectric");
    b.add("t1_upper", loss::t1_upper_bound(q, chip.qubit_reference_frequency), "s", "loss.t1_upper_bound");
    b.add("gamma_cap", loss::dielectric_decay_rate(budget), "1/s", "loss.dielectric_decay_rate");
    b.add("participation_substrate", p.substrate, "", "device.cross_section_participation");
    b.add("participation_interlayer", p.interlayer, "", "device.cross_section_participation");
    return b.row;
}

ReportRow resonator_row(const DeviceSpec& spec, const ChipSpec& chip, std::vector<std::string>& notes) {
    RowBuilder b(chip.name + "_resonator", "resonator");
    const auto geometry = chip.cpw_geometry(spec.stack);
    const auto resonator = chip.resonator(spec.stack);
    const auto interval = cpw::quarter_wave_interval(resonator);
    b.add("eps_eff", resonator.eps_eff, "", "cpw.effective_permittivity");
    b.add("z0", cpw::characteristic_impedance(geometry), "ohm", "cpw.characteristic_impedance");
    b.add("frequency_lower", interval.lower, "Hz", "cpw.quarter_wave_interval");
    b.add("frequency_upper", interval.upper, "Hz", "cpw.quarter_wave_interval");

    const auto notch = notch_for(chip, spec.stack);
    b.add("notch_frequency", notch.resonant_frequency, "Hz",
          chip.resonator_reference_frequency ? "config" : "cpw.quarter_wave_interval midpoint");
    b.add("loaded_q", chip.resonator_loaded_q, "", "config");
    b.add("coupling_q", chip.resonator_coupling_q, "", "config");

    std::optional<double> q_fwhm;
    std::optional<double> bandwidth;
    try {
        const auto fit = network::extract_q_fwhm(network::notch_s21(notch, network::notch_grid(notch)));
        q_fwhm = fit.quality_factor;
        bandwidth = fit.bandwidth;
    } catch (const ExtractionError& e) {
        notes.push_back(fmt::format("{}_resonator: no -3 dB linewidth ({})", chip.name, e.what()));
    }
    b.add("q_fwhm", q_fwhm, "", "network.extract_q_fwhm");
    b.add("bandwidth", bandwidth, "Hz", "network.extract_q_fwhm");
    return b.row;
}

ReportRow coupling_row(const DeviceSpec& spec) {
    RowBuilder b("coupling", "coupling");
    const coupling::CouplingGeometry geometry{spec.coupling.pad_overlap_area, spec.stack.interlayer_thickness,
                                              spec.stack.interlayer_eps_r};
    const double cg = coupling::parallel_plate_cg(geometry);
    const double r = coupling::capacitance_ratio(cg, spec.bottom().transmon.shunt_capacitance,
                                                 spec.top().transmon.shunt_capacitance);
    const double g = coupling::coupling_strength(r, spec.coupling.f1, spec.coupling.f2);
    const auto modes = coupling::hybridized_modes({spec.coupling.f1, spec.coupling.f2, g});

    b.add("separation", spec.stack.interlayer_thickness, "m", "config");
    b.add("pad_overlap_area", spec.coupling.pad_overlap_area, "m^2",
          spec.coupling.calibration_ratio ? "coupling.calibrate_overlap_area" : "config");
    b.add("cg", cg, "F", "coupling.parallel_plate_cg");
    b.add("r", r, "", "coupling.capacitance_ratio");
    b.add("f1", spec.coupling.f1, "Hz", "config");
    b.add("f2", spec.coupling.f2, "Hz", "config");
    b.add("g", g, "Hz", "coupling.coupling_strength");
    b.add("f_minus", modes.f_minus, "Hz", "coupling.hybridized_modes");
    b.add("f_plus", modes.f_plus, "Hz", "coupling.hybridized_modes");
    b.add("crosstalk_dip", network::crosstalk_dip(cg, notch_for(spec.bottom(), spec.stack), notch_for(spec.top(), spec.stack)),
          "dB", "network.crosstalk_dip");
    return b.row;
}

DeviceReport analyze_with(const DeviceSpec& spec, const std::array<Participation, 2>& p) {
    DeviceReport report;
    report.device = spec.name;
    report.modes.push_back(qubit_row(spec, spec.bottom(), p[0], report.notes));
    report.modes.push_back(qubit_row(spec, spec.top(), p[1], report.notes));
    report.modes.push_back(resonator_row(spec, spec.bottom(), report.notes));
    report.modes.push_back(resonator_row(spec, spec.top(), report.notes));
    report.coupling = coupling_row(spec);

    if (spec.loss.participation_substrate) {
        for (auto& row : report.modes) {
            for (auto& f : row.fields) {
                if (f.name.rfind("participation_", 0) == 0) f.source = "config";
            }
        }
    }
    if (spec.bottom().transmon.effective_capacitance || spec.top().transmon.effective_capacitance) {
        report.notes.push_back(
            "qubit frequencies are reported for both C_j + C_s and the calibrated effective capacitance; "
            "E_c, E_J/E_c, anharmonicity and oracle fields use the calibrated value");
    }
    report.notes.push_back("coupling: shunt capacitances are held constant in separation; only C_g varies with d");
    report.notes.push_back("participation: substrate vs interlayer half-spaces of a single CPW cross-section");
    for (const auto& chip : spec.chips) {
        if (!chip.qubit_resonator_g) {
            report.notes.push_back(fmt::format("{}_qubit: dispersive_shift needs qubit_resonator_g", chip.name));
        }
    }
    return report;
}

nlohmann::ordered_json row_json(const ReportRow& row) {
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();
    for (const auto& f : row.fields) {
        nlohmann::ordered_json entry;
        entry["value"] = f.value ? nlohmann::ordered_json(round_to_12_digits(*f.value)) : nlohmann::ordered_json(nullptr);
        entry["unit"] = f.unit;
        entry["source"] = f.source;
        fields[f.name] = std::move(entry);
    }
    nlohmann::ordered_json out;
    out["name"] = row.name;
    out["kind"] = row.kind;
    out["fields"] = std::move(fields);
    return out;
}

}  // namespace

const ReportField* ReportRow::find(std::string_view field) const {
    for (const auto& f : fields) {
        if (f.name == field) return &f;
    }
    return nullptr;
}

const ReportRow& DeviceReport::row(std::string_view name) const {
    if (name == coupling.name) return coupling;
    for (const auto& r : modes) {
        if (r.name == name) return r;
    }
    throw DomainError(fmt::format("report has no row '{}'", name));
}

double DeviceReport::value(std::string_view row_name, std::string_view field) const {
    const ReportField* f = row(row_name).find(field);
    if (f == nullptr) throw DomainError(fmt::format("row '{}' has no field '{}'", row_name, field));
    if (!f->value) throw DomainError(fmt::format("{}.{} has no value", row_name, field));
    return *f->value;
}

std::string DeviceReport::to_json() const {
    nlohmann::ordered_json out;
    out["device"] = device;
    out["modes"] = nlohmann::ordered_json::array();
    for (const auto& r : modes) out["modes"].push_back(row_json(r));
    out["coupling"] = row_json(coupling);
    out["notes"] = notes;
    return out.dump(2) + "\n";
}

Participation cross_section_participation(const ChipSpec& chip, const StackSpec& stack) {
    fieldsolve::CpwSectionOptions options;
    options.h_fine_fraction = kParticipationFineFraction;
    const auto cs = fieldsolve::cpw_cross_section(chip.trace_width, chip.trace_gap, stack.substrate_eps_r,
                                                  stack.interlayer_eps_r, options);
    const auto solution = fieldsolve::solve_potential(cs);
    const auto p = fieldsolve::energy_participation(cs, solution);
    return {p.at("substrate"), p.at("superstrate")};
}

DeviceReport analyze(const DeviceSpec& spec) {
    spec.validate();
    return analyze_with(spec, participations(spec));
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> columns = {
        "bottom_qubit_frequency_literal", "top_qubit_frequency_literal",
        "bottom_qubit_frequency_calibrated", "top_qubit_frequency_calibrated",
        "bottom_qubit_anharmonicity", "top_qubit_anharmonicity",
        "cg", "r", "g", "f_minus", "f_plus", "crosstalk_dip_db",
        "bottom_qubit_q", "top_qubit_q",
        "bottom_qubit_t1_upper_s", "top_qubit_t1_upper_s",
        "bottom_qubit_gamma_cap_per_s", "top_qubit_gamma_cap_per_s",
    };
    return columns;
}

namespace {

std::vector<double> project(const DeviceReport& r) {
    auto opt = [&](std::string_view row, std::string_view field) {
        const auto* f = r.row(row).find(field);
        return f && f->value ? *f->value : std::nan("");
    };
    return {
        opt("bottom_qubit", "frequency_literal"), opt("top_qubit", "frequency_literal"),
        opt("bottom_qubit", "frequency_calibrated"), opt("top_qubit", "frequency_calibrated"),
        opt("bottom_qubit", "anharmonicity"), opt("top_qubit", "anharmonicity"),
        opt("coupling", "cg"), opt("coupling", "r"), opt("coupling", "g"),
        opt("coupling", "f_minus"), opt("coupling", "f_plus"), opt("coupling", "crosstalk_dip"),
        opt("bottom_qubit", "q_total"), opt("top_qubit", "q_total"),
        opt("bottom_qubit", "t1_upper"), opt("top_qubit", "t1_upper"),
        opt("bottom_qubit", "gamma_cap"), opt("top_qubit", "gamma_cap"),
    };
}

}  // namespace

SweepTable sweep(const DeviceSpec& spec, SweepParameter parameter, const std::vector<double>& grid, unsigned threads) {
    spec.validate();
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw ValidationError("sweep grid must be strictly ascending");
    }

    std::vector<DeviceSpec> points(grid.size(), spec);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (parameter == SweepParameter::interlayer_thickness) {
            points[k].stack.interlayer_thickness = grid[k];
        } else {
            points[k].stack.interlayer_tan_delta = grid[k];
        }
        points[k].validate();
    }
    // Neither parameter enters the cross-section, so one solve serves every point.
    const auto p = participations(spec);

    SweepTable out;
    out.parameter = std::string(to_string(parameter));
    out.table.columns.push_back("param_value");
    for (const auto& c : sweep_columns()) out.table.columns.push_back(c);
    out.table.rows.resize(grid.size());

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, grid.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < grid.size();) {
            try {
                auto row = project(analyze_with(points[k], p));
                row.insert(row.begin(), grid[k]);
                out.table.rows[k] = std::move(row);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace flipkit::device
