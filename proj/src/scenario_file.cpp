#include "cascade/scenario_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

namespace cascade {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid scenario:";
    for (const auto& p : problems) {
        out += "\n  " + p;
    }
    return out;
}

} // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : InvalidConfig(join_problems(problems)), problems_(std::move(problems)) {}

namespace {

struct Unit {
    std::string_view suffix;
    double factor;
};

constexpr double kPi = std::numbers::pi;

const std::vector<Unit> kVolts = {{"", 1.0}, {"V", 1.0}, {"kV", 1e3}};
const std::vector<Unit> kOhms = {{"", 1.0}, {"ohm", 1.0}, {"Ohm", 1.0}, {"\xCE\xA9", 1.0}};
const std::vector<Unit> kWatts = {{"", 1.0}, {"W", 1.0}, {"kW", 1e3}};
const std::vector<Unit> kRadians = {{"", 1.0}, {"rad", 1.0}, {"deg", kPi / 180.0}};
const std::vector<Unit> kSeconds = {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}};
const std::vector<Unit> kFrequency = {{"Hz", 2.0 * kPi}, {"rad/s", 1.0}};
const std::vector<Unit> kGain = {{"", 1.0}, {"rad/s/W", 1.0}};
const std::vector<Unit> kPlain = {{"", 1.0}};

enum class Kind { Quantity, Count, Choice, AngleList };

struct KeySpec {
    std::string_view name;
    Kind kind;
    const std::vector<Unit>* units = nullptr;
    bool required = false;
};

const std::map<std::string, std::vector<KeySpec>, std::less<>>& section_specs() {
    static const std::map<std::string, std::vector<KeySpec>, std::less<>> specs = {
        {"grid",
         {{"voltage", Kind::Quantity, &kVolts, true},
          {"angle", Kind::Quantity, &kRadians},
          {"frequency", Kind::Quantity, &kFrequency, true},
          {"frequency_offset", Kind::Quantity, &kFrequency}}},
        {"line",
         {{"resistance", Kind::Quantity, &kOhms, true},
          {"reactance", Kind::Quantity, &kOhms, true},
          {"z_magnitude", Kind::Choice}}},
        {"modules",
         {{"count", Kind::Count, nullptr, true},
          {"ratio", Kind::Quantity, &kPlain},
          {"voltage", Kind::Quantity, &kVolts},
          {"rated_power", Kind::Quantity, &kWatts, true},
          {"droop_gain", Kind::Quantity, &kGain, true}}},
        {"sim",
         {{"dt", Kind::Quantity, &kSeconds},
          {"t_end", Kind::Quantity, &kSeconds},
          {"model", Kind::Choice},
          {"seed", Kind::Count},
          {"perturbation", Kind::Quantity, &kRadians},
          {"record_stride", Kind::Count},
          {"initial_angles", Kind::AngleList},
          {"settle_tol", Kind::Quantity, &kPlain},
          {"settle_window", Kind::Quantity, &kSeconds},
          {"divergence_threshold", Kind::Quantity, &kRadians},
          {"desync_growth", Kind::Quantity, &kPlain},
          {"desync_floor", Kind::Quantity, &kRadians}}},
    };
    return specs;
}

const std::vector<KeySpec> kModuleOverrideSpecs = {{"rated_power", Kind::Quantity, &kWatts},
                                                   {"droop_gain", Kind::Quantity, &kGain},
                                                   {"ratio", Kind::Quantity, &kPlain}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry, std::less<>>;

/// "number [unit]" -> SI value, or an error message.
std::optional<double> parse_quantity(std::string_view text, const std::vector<Unit>& units, std::string& error) {
    const std::string s(trim(text));
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) {
        error = "expected a number, got '" + s + "'";
        return std::nullopt;
    }
    const std::string_view suffix = trim(std::string_view(end));
    for (const auto& u : units) {
        if (u.suffix == suffix) {
            if (!std::isfinite(value)) {
                error = "value must be finite";
                return std::nullopt;
            }
            return value * u.factor;
        }
    }
    std::string allowed;
    for (const auto& u : units) {
        allowed += allowed.empty() ? "" : ", ";
        allowed += u.suffix.empty() ? "(none)" : std::string(u.suffix);
    }
    error = "unit '" + std::string(suffix) + "' not accepted here (allowed: " + allowed + ")";
    return std::nullopt;
}

std::optional<std::uint64_t> parse_count(std::string_view text, std::string& error) {
    const std::string s(trim(text));
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        error = "expected a non-negative integer, got '" + s + "'";
        return std::nullopt;
    }
    return std::strtoull(s.c_str(), nullptr, 10);
}

const KeySpec* find_spec(const std::vector<KeySpec>& specs, std::string_view key) {
    for (const auto& k : specs) {
        if (k.name == key) return &k;
    }
    return nullptr;
}

/// Returns the 1-based index of a "module.<i>" section name, or 0.
std::size_t module_section_index(std::string_view name) {
    constexpr std::string_view prefix = "module.";
    if (name.substr(0, prefix.size()) != prefix) return 0;
    std::string err;
    const auto idx = parse_count(name.substr(prefix.size()), err);
    return idx ? static_cast<std::size_t>(*idx) : 0;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Scenario parse_scenario(std::string_view text) {
    std::vector<std::string> problems;
    std::map<std::string, Section, std::less<>> sections;

    std::string current;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto cut = line.find_first_of("#;"); cut != std::string_view::npos) {
            line = line.substr(0, cut);
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";

        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back(where + "unterminated section header");
                current.clear();
                continue;
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (!section_specs().contains(name) && module_section_index(name) == 0) {
                problems.push_back(where + "unknown section [" + name + "]");
                current = "\x01"; // swallow keys until the next header
                continue;
            }
            current = name;
            sections[current];
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (current.empty()) {
            problems.push_back(where + "key '" + key + "' appears before any [section]");
            continue;
        }
        if (current == "\x01") continue;
        const auto& specs = module_section_index(current) ? kModuleOverrideSpecs : section_specs().at(current);
        if (!find_spec(specs, key)) {
            problems.push_back(where + "unknown key '" + key + "' in [" + current + "]");
            continue;
        }
        auto [it, inserted] = sections[current].try_emplace(key, Entry{value, line_no});
        if (!inserted) {
            problems.push_back(where + "duplicate key '" + key + "' in [" + current + "] (first on line " +
                               std::to_string(it->second.line) + ")");
        }
    }

    for (const auto& [name, specs] : section_specs()) {
        for (const auto& spec : specs) {
            if (spec.required && !(sections.contains(name) && sections[name].contains(spec.name))) {
                problems.push_back("missing required key [" + name + "] " + std::string(spec.name));
            }
        }
    }
    const bool has_ratio = sections["modules"].contains("ratio");
    const bool has_voltage = sections["modules"].contains("voltage");
    if (!has_ratio && !has_voltage) {
        problems.push_back("missing required key [modules] ratio (or voltage)");
    }

    auto get = [&](std::string_view section, std::string_view key) -> const Entry* {
        const auto s = sections.find(section);
        if (s == sections.end()) return nullptr;
        const auto e = s->second.find(key);
        return e == s->second.end() ? nullptr : &e->second;
    };
    auto quantity = [&](std::string_view section, std::string_view key, const std::vector<Unit>& units,
                        double fallback) {
        const Entry* e = get(section, key);
        if (!e) return fallback;
        std::string err;
        const auto v = parse_quantity(e->value, units, err);
        if (!v) {
            problems.push_back("line " + std::to_string(e->line) + ": " + std::string(key) + ": " + err);
            return fallback;
        }
        return *v;
    };
    auto count = [&](std::string_view section, std::string_view key, std::uint64_t fallback) {
        const Entry* e = get(section, key);
        if (!e) return fallback;
        std::string err;
        const auto v = parse_count(e->value, err);
        if (!v) {
            problems.push_back("line " + std::to_string(e->line) + ": " + std::string(key) + ": " + err);
            return fallback;
        }
        return *v;
    };

    Scenario sc;
    SystemConfig& cfg = sc.config;
    cfg.grid_voltage = quantity("grid", "voltage", kVolts, cfg.grid_voltage);
    cfg.grid_angle = quantity("grid", "angle", kRadians, 0.0);
    cfg.nominal_frequency = quantity("grid", "frequency", kFrequency, cfg.nominal_frequency);
    sc.grid_frequency_offset = quantity("grid", "frequency_offset", kFrequency, 0.0);

    const double r = quantity("line", "resistance", kOhms, cfg.line.resistance());
    const double x = quantity("line", "reactance", kOhms, cfg.line.reactance());
    try {
        cfg.line = LineImpedance(r, x);
    } catch (const InvalidInput& e) {
        problems.push_back(std::string("[line]: ") + e.what());
    }
    if (const Entry* e = get("line", "z_magnitude")) {
        if (e->value == "full") {
            cfg.z_mode = ZMagnitudeMode::Full;
        } else if (e->value == "reactance-only") {
            cfg.z_mode = ZMagnitudeMode::ReactanceOnly;
        } else {
            problems.push_back("line " + std::to_string(e->line) +
                               ": z_magnitude must be 'full' or 'reactance-only'");
        }
    }

    cfg.module_count = static_cast<std::size_t>(count("modules", "count", cfg.module_count));
    cfg.rated_power = quantity("modules", "rated_power", kWatts, cfg.rated_power);
    cfg.droop_gain = quantity("modules", "droop_gain", kGain, cfg.droop_gain);
    const double ratio = quantity("modules", "ratio", kPlain, 0.0);
    const double voltage = quantity("modules", "voltage", kVolts, 0.0);
    if (has_ratio) {
        cfg.voltage_ratio = ratio;
        if (has_voltage && ratio > 0.0 && voltage > 0.0) {
            const double implied = cfg.grid_voltage / ratio;
            if (std::abs(implied - voltage) > 0.005 * implied) {
                problems.push_back("line " + std::to_string(get("modules", "voltage")->line) +
                                   ": module voltage " + format_number(voltage) +
                                   " V is inconsistent with V* = V_g / M = " + format_number(implied) +
                                   " V (tolerance 0.5%)");
            }
        }
    } else if (has_voltage) {
        if (voltage > 0.0) {
            cfg.voltage_ratio = cfg.grid_voltage / voltage;
        } else {
            problems.push_back("line " + std::to_string(get("modules", "voltage")->line) +
                               ": module voltage must be > 0");
        }
    }

    for (const auto& [name, entries] : sections) {
        const std::size_t idx = module_section_index(name);
        if (idx == 0) continue;
        if (idx > cfg.module_count) {
            problems.push_back("[" + name + "]: module index exceeds count " + std::to_string(cfg.module_count));
            continue;
        }
        if (cfg.module_overrides.empty()) {
            cfg.module_overrides.assign(cfg.module_count, cfg.module(0));
        }
        ModuleParams& m = cfg.module_overrides[idx - 1];
        m.rated_power = quantity(name, "rated_power", kWatts, m.rated_power);
        m.droop_gain = quantity(name, "droop_gain", kGain, m.droop_gain);
        m.voltage_ratio = quantity(name, "ratio", kPlain, m.voltage_ratio);
    }

    sc.dt = quantity("sim", "dt", kSeconds, sc.dt);
    sc.t_end = quantity("sim", "t_end", kSeconds, sc.t_end);
    if (const Entry* e = get("sim", "model")) {
        if (e->value == "exact") {
            sc.model = PowerModel::Exact;
        } else if (e->value == "inductive") {
            sc.model = PowerModel::Inductive;
        } else {
            problems.push_back("line " + std::to_string(e->line) + ": model must be 'exact' or 'inductive'");
        }
    }
    sc.seed = count("sim", "seed", sc.seed);
    sc.perturbation = quantity("sim", "perturbation", kRadians, sc.perturbation);
    sc.record_stride = static_cast<std::size_t>(count("sim", "record_stride", sc.record_stride));
    if (const Entry* e = get("sim", "initial_angles")) {
        std::string_view rest = e->value;
        while (true) {
            const auto comma = rest.find(',');
            std::string err;
            const auto v = parse_quantity(rest.substr(0, comma), kRadians, err);
            if (!v) {
                problems.push_back("line " + std::to_string(e->line) + ": initial_angles: " + err);
                break;
            }
            sc.initial_angles.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    sc.classify.settle_tol = quantity("sim", "settle_tol", kPlain, sc.classify.settle_tol);
    sc.classify.settle_window = quantity("sim", "settle_window", kSeconds, sc.classify.settle_window);
    sc.classify.divergence_threshold =
        quantity("sim", "divergence_threshold", kRadians, sc.classify.divergence_threshold);
    sc.classify.desync_growth = quantity("sim", "desync_growth", kPlain, sc.classify.desync_growth);
    sc.classify.desync_floor = quantity("sim", "desync_floor", kRadians, sc.classify.desync_floor);

    if (!problems.empty()) {
        throw ScenarioError(std::move(problems));
    }
    try {
        sc.validate();
    } catch (const InvalidConfig& e) {
        throw ScenarioError({e.what()});
    }
    return sc;
}

std::string format_scenario(const Scenario& sc) {
    const SystemConfig& cfg = sc.config;
    std::ostringstream out;
    out << "[grid]\n"
        << "voltage = " << format_number(cfg.grid_voltage) << " V\n"
        << "angle = " << format_number(cfg.grid_angle) << " rad\n"
        << "frequency = " << format_number(cfg.nominal_frequency) << " rad/s\n"
        << "frequency_offset = " << format_number(sc.grid_frequency_offset) << " rad/s\n"
        << "\n[line]\n"
        << "resistance = " << format_number(cfg.line.resistance()) << " ohm\n"
        << "reactance = " << format_number(cfg.line.reactance()) << " ohm\n"
        << "z_magnitude = " << (cfg.z_mode == ZMagnitudeMode::Full ? "full" : "reactance-only") << "\n"
        << "\n[modules]\n"
        << "count = " << cfg.module_count << "\n"
        << "ratio = " << format_number(cfg.voltage_ratio) << "\n"
        << "rated_power = " << format_number(cfg.rated_power) << " W\n"
        << "droop_gain = " << format_number(cfg.droop_gain) << "\n";
    for (std::size_t i = 0; i < cfg.module_overrides.size(); ++i) {
        const ModuleParams& m = cfg.module_overrides[i];
        out << "\n[module." << (i + 1) << "]\n"
            << "rated_power = " << format_number(m.rated_power) << " W\n"
            << "droop_gain = " << format_number(m.droop_gain) << "\n"
            << "ratio = " << format_number(m.voltage_ratio) << "\n";
    }
    out << "\n[sim]\n"
        << "dt = " << format_number(sc.dt) << " s\n"
        << "t_end = " << format_number(sc.t_end) << " s\n"
        << "model = " << (sc.model == PowerModel::Exact ? "exact" : "inductive") << "\n"
        << "seed = " << sc.seed << "\n"
        << "perturbation = " << format_number(sc.perturbation) << " rad\n"
        << "record_stride = " << sc.record_stride << "\n";
    if (!sc.initial_angles.empty()) {
        out << "initial_angles = ";
        for (std::size_t i = 0; i < sc.initial_angles.size(); ++i) {
            out << (i ? ", " : "") << format_number(sc.initial_angles[i]);
        }
        out << "\n";
    }
    out << "settle_tol = " << format_number(sc.classify.settle_tol) << "\n"
        << "settle_window = " << format_number(sc.classify.settle_window) << " s\n"
        << "divergence_threshold = " << format_number(sc.classify.divergence_threshold) << " rad\n"
        << "desync_growth = " << format_number(sc.classify.desync_growth) << "\n"
        << "desync_floor = " << format_number(sc.classify.desync_floor) << " rad\n";
    return out.str();
}

Scenario preset_scenario(int index) {
    static constexpr double ratios[] = {5.8, 6.2, 7.0};
    if (index < 1 || index > 3) {
        throw InvalidInput("preset case must be 1, 2 or 3");
    }
    Scenario sc;
    sc.config.grid_voltage = 311.0;
    sc.config.nominal_frequency = 2.0 * kPi * 50.0;
    sc.config.line = LineImpedance(0.1, 0.5);
    sc.config.module_count = 6;
    sc.config.rated_power = 4000.0;
    sc.config.droop_gain = 1.2e-3;
    sc.config.voltage_ratio = ratios[index - 1];
    return sc;
}

double preset_table_voltage(int index) {
    static constexpr double listed[] = {53.6, 50.1, 44.4};
    if (index < 1 || index > 3) {
        throw InvalidInput("preset case must be 1, 2 or 3");
    }
    return listed[index - 1];
}

} // namespace cascade
