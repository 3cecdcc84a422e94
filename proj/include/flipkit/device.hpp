#pragma once

// Two-chip flip-chip stack: declarative spec, analysis pipeline and
// parametric sweeps.
//
// Config format: UTF-8 text, one `section.key = value [unit]` per line,
// `#` starts a comment. Sections are `device`, `stack`, `bottom`, `top`,
// `coupling` and `loss`; see configs/paper-default.cfg for every key.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flipkit/cpw.hpp"
#include "flipkit/table.hpp"
#include "flipkit/transmon.hpp"

namespace flipkit::device {

struct StackSpec {
    double interlayer_thickness = 0.0;  // m, also the chip separation
    double interlayer_eps_r = 1.0;
    double interlayer_tan_delta = 0.0;
    double substrate_eps_r = 11.9;
    double substrate_tan_delta = 0.0;
    double substrate_thickness = 0.0;   // m
};

struct ChipSpec {
    std::string name;  // "bottom" or "top"
    double trace_width = 0.0;
    double trace_gap = 0.0;
    double resonator_length = 0.0;
    double pocket_extension = 0.0;
    double resonator_loaded_q = 0.0;
    double resonator_coupling_q = 0.0;
    std::optional<double> resonator_reference_frequency;  // notch centre; interval midpoint when unset
    transmon::TransmonParams transmon;
    double qubit_baseline_q = 0.0;
    double qubit_reference_frequency = 0.0;  // mode frequency used for the loss budget
    std::optional<double> qubit_resonator_g;  // Hz; enables the dispersive shift

    cpw::CpwGeometry cpw_geometry(const StackSpec& stack) const;
    cpw::ResonatorSpec resonator(const StackSpec& stack) const;
};

struct CouplingSpec {
    double pad_overlap_area = 0.0;  // m^2, resolved at parse time when calibrated
    double f1 = 0.0;                // Hz, bottom qubit frequency for g
    double f2 = 0.0;                // Hz, top qubit frequency for g
    std::optional<double> calibration_ratio;
    std::optional<double> calibration_separation;
};

struct LossSpec {
    double eta = 1.0;
    // Overrides for the cross-section participation analog; both or neither.
    std::optional<double> participation_substrate;
    std::optional<double> participation_interlayer;
};

struct DeviceSpec {
    std::string name = "device";
    StackSpec stack;
    std::array<ChipSpec, 2> chips;  // [0] bottom, [1] top
    CouplingSpec coupling;
    LossSpec loss;

    const ChipSpec& bottom() const { return chips[0]; }
    const ChipSpec& top() const { return chips[1]; }

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

/// Parses config text; throws ConfigError with one path-qualified message per problem.
DeviceSpec parse_spec(std::string_view config_text);

/// Reads a config file, or the built-in preset when `path_or_preset` names it
/// ("paper-default" / "paper-default.cfg") and no such file exists.
DeviceSpec load_spec(const std::string& path_or_preset);

/// Text of the built-in "paper-default" preset.
std::string_view paper_default_config();

struct ReportField {
    std::string name;
    std::optional<double> value;  // nullopt when the input needed is absent
    std::string unit;
    std::string source;           // producing operation
};

struct ReportRow {
    std::string name;
    std::string kind;  // "qubit", "resonator", "coupling"
    std::vector<ReportField> fields;

    const ReportField* find(std::string_view field) const;
};

struct DeviceReport {
    std::string device;
    std::vector<ReportRow> modes;  // bottom_qubit, top_qubit, bottom_resonator, top_resonator
    ReportRow coupling;
    std::vector<std::string> notes;

    const ReportRow& row(std::string_view name) const;
    /// Throws DomainError when the row/field is missing or has no value.
    double value(std::string_view row, std::string_view field) const;

    /// JSON with stable key order and 12-significant-digit numbers.
    std::string to_json() const;
};

struct Participation {
    double substrate;
    double interlayer;
};

/// Electric-energy participation of substrate vs interlayer from a CPW cross-section solve.
Participation cross_section_participation(const ChipSpec& chip, const StackSpec& stack);

DeviceReport analyze(const DeviceSpec& spec);

enum class SweepParameter { interlayer_thickness, loss_tangent };

SweepParameter parse_sweep_parameter(std::string_view name);
std::string_view to_string(SweepParameter p);

/// Grid syntax: "a,b,c" | "lo:hi:N" (linear) | "lo:hi:logN" (log; lo = 0 gives 0
/// followed by N-1 points spanning hi*1e-4 .. hi). Values accept unit suffixes.
std::vector<double> parse_grid(std::string_view text);

struct SweepTable {
    std::string parameter;
    Table table;  // first column "param_value"
};

/// Metric columns, in output order.
const std::vector<std::string>& sweep_columns();

/// One analysis per grid point. Points run on up to `threads` workers (0 = hardware
/// concurrency); rows are assembled in grid order.
SweepTable sweep(const DeviceSpec& spec, SweepParameter parameter, const std::vector<double>& grid,
                 unsigned threads = 0);

}  // namespace flipkit::device
