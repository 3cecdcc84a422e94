#include "flipkit/device.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "flipkit/coupling.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/units.hpp"

namespace flipkit::device {

namespace {

using units::Dimension;

struct KeySpec {
    std::string key;
    Dimension dimension;
    bool required;
    std::function<void(DeviceSpec&, double)> assign;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<KeySpec> key_table() {
    std::vector<KeySpec> keys;
    auto add = [&](std::string key, Dimension dim, bool required, std::function<void(DeviceSpec&, double)> f) {
        keys.push_back({std::move(key), dim, required, std::move(f)});
    };
    add("stack.interlayer_thickness", Dimension::length, true, [](DeviceSpec& s, double v) { s.stack.interlayer_thickness = v; });
    add("stack.interlayer_eps_r", Dimension::dimensionless, true, [](DeviceSpec& s, double v) { s.stack.interlayer_eps_r = v; });
    add("stack.interlayer_tan_delta", Dimension::dimensionless, false, [](DeviceSpec& s, double v) { s.stack.interlayer_tan_delta = v; });
    add("stack.substrate_eps_r", Dimension::dimensionless, true, [](DeviceSpec& s, double v) { s.stack.substrate_eps_r = v; });
    add("stack.substrate_tan_delta", Dimension::dimensionless, false, [](DeviceSpec& s, double v) { s.stack.substrate_tan_delta = v; });
    add("stack.substrate_thickness", Dimension::length, true, [](DeviceSpec& s, double v) { s.stack.substrate_thickness = v; });

    for (std::size_t idx = 0; idx < 2; ++idx) {
        const std::string chip = idx == 0 ? "bottom." : "top.";
        auto c = [idx](DeviceSpec& s) -> ChipSpec& { return s.chips[idx]; };
        add(chip + "trace_width", Dimension::length, true, [c](DeviceSpec& s, double v) { c(s).trace_width = v; });
        add(chip + "trace_gap", Dimension::length, true, [c](DeviceSpec& s, double v) { c(s).trace_gap = v; });
        add(chip + "resonator_length", Dimension::length, true, [c](DeviceSpec& s, double v) { c(s).resonator_length = v; });
        add(chip + "pocket_extension", Dimension::length, true, [c](DeviceSpec& s, double v) { c(s).pocket_extension = v; });
        add(chip + "resonator_loaded_q", Dimension::dimensionless, true, [c](DeviceSpec& s, double v) { c(s).resonator_loaded_q = v; });
        add(chip + "resonator_coupling_q", Dimension::dimensionless, true, [c](DeviceSpec& s, double v) { c(s).resonator_coupling_q = v; });
        add(chip + "resonator_reference_frequency", Dimension::frequency, false,
            [c](DeviceSpec& s, double v) { c(s).resonator_reference_frequency = v; });
        add(chip + "junction_capacitance", Dimension::capacitance, true,
            [c](DeviceSpec& s, double v) { c(s).transmon.junction_capacitance = v; });
        add(chip + "shunt_capacitance", Dimension::capacitance, true,
            [c](DeviceSpec& s, double v) { c(s).transmon.shunt_capacitance = v; });
        add(chip + "junction_inductance", Dimension::inductance, true,
            [c](DeviceSpec& s, double v) { c(s).transmon.junction_inductance = v; });
        add(chip + "flux_bias", Dimension::dimensionless, false, [c](DeviceSpec& s, double v) { c(s).transmon.flux_bias = v; });
        add(chip + "effective_capacitance", Dimension::capacitance, false,
            [c](DeviceSpec& s, double v) { c(s).transmon.effective_capacitance = v; });
        add(chip + "qubit_baseline_q", Dimension::dimensionless, true, [c](DeviceSpec& s, double v) { c(s).qubit_baseline_q = v; });
        add(chip + "qubit_reference_frequency", Dimension::frequency, true,
            [c](DeviceSpec& s, double v) { c(s).qubit_reference_frequency = v; });
        add(chip + "qubit_resonator_g", Dimension::frequency, false, [c](DeviceSpec& s, double v) { c(s).qubit_resonator_g = v; });
    }

    add("coupling.f1", Dimension::frequency, true, [](DeviceSpec& s, double v) { s.coupling.f1 = v; });
    add("coupling.f2", Dimension::frequency, true, [](DeviceSpec& s, double v) { s.coupling.f2 = v; });
    add("coupling.pad_overlap_area", Dimension::area, false, [](DeviceSpec& s, double v) { s.coupling.pad_overlap_area = v; });
    add("coupling.calibrate_ratio", Dimension::dimensionless, false, [](DeviceSpec& s, double v) { s.coupling.calibration_ratio = v; });
    add("coupling.calibrate_separation", Dimension::length, false,
        [](DeviceSpec& s, double v) { s.coupling.calibration_separation = v; });

    add("loss.eta", Dimension::dimensionless, false, [](DeviceSpec& s, double v) { s.loss.eta = v; });
    add("loss.participation_substrate", Dimension::dimensionless, false,
        [](DeviceSpec& s, double v) { s.loss.participation_substrate = v; });
    add("loss.participation_interlayer", Dimension::dimensionless, false,
        [](DeviceSpec& s, double v) { s.loss.participation_interlayer = v; });
    return keys;
}

void check(std::vector<std::string>& problems, bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
}

template <typename F>
void capture(std::vector<std::string>& problems, const std::string& path, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        problems.push_back(fmt::format("{}: {}", path, e.what()));
    }
}

}  // namespace

cpw::CpwGeometry ChipSpec::cpw_geometry(const StackSpec& stack) const {
    return {
        .trace_width = trace_width,
        .trace_gap = trace_gap,
        .eps_substrate = stack.substrate_eps_r,
        .eps_superstrate = stack.interlayer_eps_r,
        .substrate_thickness = stack.substrate_thickness,
    };
}

cpw::ResonatorSpec ChipSpec::resonator(const StackSpec& stack) const {
    return {
        .physical_length = resonator_length,
        .pocket_extension = pocket_extension,
        .eps_eff = cpw::effective_permittivity(stack.substrate_eps_r, stack.interlayer_eps_r),
    };
}

void DeviceSpec::validate() const {
    std::vector<std::string> problems;
    check(problems, stack.interlayer_thickness > 0.0,
          fmt::format("stack.interlayer_thickness: must be > 0 (got {})", stack.interlayer_thickness));
    check(problems, stack.interlayer_eps_r >= 1.0, "stack.interlayer_eps_r: must be >= 1");
    check(problems, stack.substrate_eps_r >= 1.0, "stack.substrate_eps_r: must be >= 1");
    check(problems, stack.interlayer_tan_delta >= 0.0, "stack.interlayer_tan_delta: must be >= 0");
    check(problems, stack.substrate_tan_delta >= 0.0, "stack.substrate_tan_delta: must be >= 0");
    check(problems, stack.substrate_thickness > 0.0, "stack.substrate_thickness: must be > 0");

    for (const auto& chip : chips) {
        const std::string& p = chip.name;
        if (stack.substrate_eps_r >= 1.0 && stack.interlayer_eps_r >= 1.0) {
            capture(problems, p + " (cpw)", [&] { chip.cpw_geometry(stack).validate(); });
            capture(problems, p + " (resonator)", [&] { chip.resonator(stack).validate(); });
        }
        capture(problems, p + " (transmon)", [&] { chip.transmon.validate(); });
        check(problems, chip.resonator_loaded_q > 0.0, p + ".resonator_loaded_q: must be > 0");
        check(problems, chip.resonator_coupling_q >= chip.resonator_loaded_q,
              p + ".resonator_coupling_q: must be >= resonator_loaded_q");
        check(problems, !chip.resonator_reference_frequency || *chip.resonator_reference_frequency > 0.0,
              p + ".resonator_reference_frequency: must be > 0");
        check(problems, chip.qubit_baseline_q > 0.0, p + ".qubit_baseline_q: must be > 0");
        check(problems, chip.qubit_reference_frequency > 0.0, p + ".qubit_reference_frequency: must be > 0");
        check(problems, !chip.qubit_resonator_g || *chip.qubit_resonator_g >= 0.0, p + ".qubit_resonator_g: must be >= 0");
    }

    check(problems, coupling.f1 > 0.0, "coupling.f1: must be > 0");
    check(problems, coupling.f2 > 0.0, "coupling.f2: must be > 0");
    check(problems, coupling.pad_overlap_area > 0.0, "coupling.pad_overlap_area: must be > 0");

    check(problems, loss.eta > 0.0, "loss.eta: must be > 0");
    check(problems, loss.participation_substrate.has_value() == loss.participation_interlayer.has_value(),
          "loss: participation_substrate and participation_interlayer must be given together");
    if (loss.participation_substrate && loss.participation_interlayer) {
        const double ps = *loss.participation_substrate;
        const double pi = *loss.participation_interlayer;
        check(problems, ps >= 0.0 && ps <= 1.0, "loss.participation_substrate: must lie in [0, 1]");
        check(problems, pi >= 0.0 && pi <= 1.0, "loss.participation_interlayer: must lie in [0, 1]");
        check(problems, ps + pi <= 1.0 + 1e-9, "loss: participations must sum to <= 1");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

DeviceSpec parse_spec(std::string_view text) {
    DeviceSpec spec;
    spec.chips[0].name = "bottom";
    spec.chips[1].name = "top";

    std::vector<std::string> problems;
    std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value text, line)
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back(fmt::format("line {}: expected 'section.key = value'", line_no));
            continue;
        }
        const std::string key{trim(body.substr(0, eq))};
        const std::string value{trim(body.substr(eq + 1))};
        if (key.empty() || value.empty()) {
            problems.push_back(fmt::format("line {}: empty key or value", line_no));
            continue;
        }
        if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
            problems.push_back(fmt::format("line {}: duplicate key '{}'", line_no, key));
        }
    }

    if (auto it = entries.find("device.name"); it != entries.end()) {
        spec.name = it->second.first;
        entries.erase(it);
    }
    for (const auto& k : key_table()) {
        const auto it = entries.find(k.key);
        if (it == entries.end()) {
            if (k.required) problems.push_back(fmt::format("{}: missing required field", k.key));
            continue;
        }
        try {
            k.assign(spec, units::parse_quantity(it->second.first, k.dimension));
        } catch (const ValidationError& e) {
            problems.push_back(fmt::format("{} (line {}): {}", k.key, it->second.second, e.what()));
        }
        entries.erase(it);
    }
    for (const auto& [key, value] : entries) {
        problems.push_back(fmt::format("{} (line {}): unknown key", key, value.second));
    }

    // Area: given directly, or calibrated from a target ratio at a reference separation.
    const bool has_area = spec.coupling.pad_overlap_area != 0.0;
    const bool has_ratio = spec.coupling.calibration_ratio.has_value();
    const bool has_sep = spec.coupling.calibration_separation.has_value();
    if (has_ratio != has_sep) {
        problems.push_back("coupling: calibrate_ratio and calibrate_separation must be given together");
    } else if (has_area == has_ratio) {
        problems.push_back("coupling: give exactly one of pad_overlap_area or calibrate_ratio/calibrate_separation");
    } else if (has_ratio && problems.empty()) {
        capture(problems, "coupling.calibrate_ratio", [&] {
            spec.coupling.pad_overlap_area = coupling::calibrate_overlap_area(
                *spec.coupling.calibration_ratio, *spec.coupling.calibration_separation, spec.stack.interlayer_eps_r,
                spec.bottom().transmon.shunt_capacitance, spec.top().transmon.shunt_capacitance);
        });
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    spec.validate();
    return spec;
}

DeviceSpec load_spec(const std::string& path_or_preset) {
    namespace fs = std::filesystem;
    if (fs::exists(path_or_preset)) {
        std::ifstream in(path_or_preset, std::ios::binary);
        if (!in) throw ValidationError(fmt::format("cannot read config '{}'", path_or_preset));
        std::ostringstream text;
        text << in.rdbuf();
        return parse_spec(text.str());
    }
    const std::string stem = fs::path(path_or_preset).filename().string();
    if (stem == "paper-default" || stem == "paper-default.cfg") return parse_spec(paper_default_config());
    throw ValidationError(fmt::format("config '{}' not found", path_or_preset));
}

SweepParameter parse_sweep_parameter(std::string_view name) {
    if (name == "interlayer_thickness") return SweepParameter::interlayer_thickness;
    if (name == "loss_tangent") return SweepParameter::loss_tangent;
    throw ValidationError(fmt::format("unsupported sweep parameter '{}' (interlayer_thickness, loss_tangent)", name));
}

std::string_view to_string(SweepParameter p) {
    return p == SweepParameter::interlayer_thickness ? "interlayer_thickness" : "loss_tangent";
}

std::vector<double> parse_grid(std::string_view text) {
    // Bare numbers are SI; unit suffixes of any dimension are accepted.
    auto number = [](std::string_view s) {
        for (Dimension d : {Dimension::dimensionless, Dimension::length, Dimension::frequency, Dimension::capacitance,
                            Dimension::inductance, Dimension::area, Dimension::impedance}) {
            try {
                return units::parse_quantity(s, d);
            } catch (const DomainError&) {
            }
        }
        throw ValidationError(fmt::format("grid value '{}' is not a quantity", s));
    };

    std::vector<double> grid;
    text = trim(text);
    if (text.empty()) throw ValidationError("empty grid");
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        for (std::size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1) {
            parts.push_back(trim(text.substr(start, pos - start)));
        }
        parts.push_back(trim(text.substr(start)));
        if (parts.size() != 3) throw ValidationError(fmt::format("grid '{}' must be lo:hi:N or lo:hi:logN", text));
        const double lo = number(parts[0]);
        const double hi = number(parts[1]);
        std::string_view count_text = parts[2];
        const bool log = count_text.substr(0, 3) == "log";
        if (log) count_text.remove_prefix(3);
        int count = 0;
        try {
            count = std::stoi(std::string(count_text));
        } catch (const std::exception&) {
            throw ValidationError(fmt::format("grid point count '{}' is not an integer", parts[2]));
        }
        if (count < 2) throw ValidationError("grid needs at least two points");
        if (!(hi > lo)) throw ValidationError("grid needs hi > lo");
        if (!log) {
            for (int k = 0; k < count; ++k) grid.push_back(lo + (hi - lo) * k / (count - 1));
            grid.back() = hi;
        } else {
            if (lo < 0.0) throw ValidationError("log grid needs lo >= 0");
            int log_points = count;
            double log_lo = lo;
            if (lo == 0.0) {
                grid.push_back(0.0);
                log_points = count - 1;
                log_lo = hi * 1e-4;
            }
            if (log_points == 1) {
                grid.push_back(hi);
            } else {
                const double a = std::log10(log_lo);
                const double b = std::log10(hi);
                for (int k = 0; k < log_points; ++k) grid.push_back(std::pow(10.0, a + (b - a) * k / (log_points - 1)));
                grid.back() = hi;
            }
        }
    } else {
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto pos = text.find(',', start);
            const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
            grid.push_back(number(item));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw ValidationError("grid must be strictly ascending");
    }
    return grid;
}

}  // namespace flipkit::device
