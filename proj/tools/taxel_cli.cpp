// taxel: command-line front end for the taxel simulator and decoder.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taxel/taxel.hpp"

namespace {

using namespace taxel;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Output sink shared with the error handler, so a failure after the first
// row can be marked in the stream itself.
struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &std::cout;
    bool started = false;

    std::ostream& out() {
        started = true;
        return *os;
    }
};

Sink g_sink;

void open_sink(const std::string& path) {
    if (path.empty() || path == "-") {
        g_sink.os = &std::cout;
        return;
    }
    g_sink.file = std::make_unique<std::ofstream>(path);
    if (!*g_sink.file) {
        throw Error("cannot open '" + path + "' for writing");
    }
    g_sink.os = g_sink.file.get();
}

Quad parse_quad(const std::string& s, const char* what) {
    Quad q{};
    std::stringstream ss(s);
    std::string item;
    std::size_t n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == 4) {
            throw ValidationError(std::string(what) + " needs exactly 4 values");
        }
        try {
            std::size_t used = 0;
            q[n] = std::stod(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw ValidationError(std::string(what) + ": '" + item + "' is not a number");
        }
        ++n;
    }
    if (n != 4) {
        throw ValidationError(std::string(what) + " needs exactly 4 values");
    }
    return q;
}

ParasiticModel parasitics_preset(const std::string& name, double c0) {
    if (name == "none") return ParasiticModel::none();
    if (name == "unshielded") return ParasiticModel::unshielded(c0);
    if (name == "shielded") return ParasiticModel::shielded_preset(c0);
    throw ValidationError("unknown parasitics preset '" + name + "'");
}

CalibrationSet load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open calibration file '" + path + "'");
    }
    return read_calibration(in);
}

// Options that override scenario files and defaults.
struct SensorOverrides {
    std::string calibration;
    std::string parasitics;
    double crosstalk = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    bool ground_plane = false;
    CLI::Option* crosstalk_opt = nullptr;
    CLI::Option* noise_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* gp_opt = nullptr;

    void add(CLI::App* app, bool with_run_options) {
        app->add_option("--calibration", calibration, "Calibration parameter file")->check(CLI::ExistingFile);
        app->add_option("--parasitics", parasitics, "Parasitic preset: none | unshielded | shielded");
        crosstalk_opt = app->add_option("--crosstalk", crosstalk, "X/Y crosstalk coupling");
        if (with_run_options) {
            noise_opt = app->add_option("--noise", noise, "Noise sigma in pF");
            seed_opt = app->add_option("--seed", seed, "Noise seed");
            gp_opt = app->add_flag("--ground-plane", ground_plane, "Fit the ground plane and read SELF");
        }
    }

    void apply(SensorModel& s) const {
        if (!calibration.empty()) {
            s = load_calibration(calibration).sensor();
        }
        if (!parasitics.empty()) {
            s.parasitics = parasitics_preset(parasitics, s.geometry.baseline_pf());
        }
        if (crosstalk_opt && crosstalk_opt->count()) {
            s.crosstalk.xy_coupling = crosstalk;
        }
    }

    void apply(ScenarioConfig& c) const {
        apply(c.sensor);
        if (noise_opt && noise_opt->count()) c.noise.sigma_pf = noise;
        if (seed_opt && seed_opt->count()) c.noise.seed = seed;
        if (gp_opt && gp_opt->count()) c.ground_plane = ground_plane;
    }
};

void emit_report(const RunReport& r, const std::string& format) {
    if (format == "json") {
        g_sink.out() << report_to_json(r).dump(2) << '\n';
        return;
    }
    std::ostream& os = g_sink.out();
    write_csv_header(os);
    for (const auto& s : r.steps) {
        os << csv_row(s) << '\n';
    }
}

// --------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string scenario_file;
    std::string builtin;
    double eta = 0, lx = 0, ly = 0, fn = 0, fx = 0, fy = 0, distance = -1;
    bool insulator = false;
    unsigned cycles = 10;
    std::string format = "frames";
    std::string output;
    SensorOverrides sensor;
    CLI::Option *eta_o{}, *lx_o{}, *ly_o{}, *fn_o{}, *fx_o{}, *fy_o{};
};

Scenario static_scenario(const SimulateArgs& a) {
    const bool disp = a.eta_o->count() || a.lx_o->count() || a.ly_o->count();
    const bool force = a.fn_o->count() || a.fx_o->count() || a.fy_o->count();
    if (disp && force) {
        throw ValidationError("give either displacements (--eta/--lambda-*) or forces (--normal-force/--shear-*)");
    }
    if (a.cycles == 0) {
        throw ValidationError("--cycles must be >= 1");
    }
    Scenario sc;
    sc.name = "static";
    Keyframe k;
    if (force) {
        k.normal_force_n = a.fn;
        k.shear_force_x_n = a.fx;
        k.shear_force_y_n = a.fy;
    } else {
        k.eta_mm = a.eta;
        k.lambda_x_mm = a.lx;
        k.lambda_y_mm = a.ly;
    }
    if (a.distance >= 0) {
        k.distance_mm = a.distance;
        k.grounded = !a.insulator;
    }
    sc.keyframes.push_back(k);
    return sc;
}

int cmd_simulate(SimulateArgs& a) {
    if (!a.scenario_file.empty() && !a.builtin.empty()) {
        throw ValidationError("--scenario and --builtin are exclusive");
    }
    Scenario sc = !a.scenario_file.empty() ? load_scenario(a.scenario_file)
                  : !a.builtin.empty()     ? find_builtin(a.builtin)
                                           : static_scenario(a);
    a.sensor.apply(sc.config);
    if (sc.keyframes.size() == 1 && a.cycles > 1) {
        const bool gp = sc.uses_ground_plane();
        MuxSchedule m = gp ? MuxSchedule::with_self(sc.config.self_every) : MuxSchedule::mutual_only();
        Keyframe last;
        last.t_s = sc.keyframes.front().t_s + (a.cycles - 1) * m.cycle_duration(sc.config.cdc);
        sc.keyframes.push_back(last);
    }
    open_sink(a.output);
    std::vector<FrameRecord> records;
    const RunReport r = run(sc, 0.0, &records);
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (a.format == "frames") {
        std::ostream& os = g_sink.out();
        os << "# t,tag,code,value  scenario=" << sc.name << " seed=" << sc.config.noise.seed << '\n';
        write_frames(os, records);
    } else {
        emit_report(r, a.format);
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// decode

struct DecodeArgs {
    std::string input = "-";
    std::string output;
    std::string format = "csv";
    SensorOverrides sensor;
    ClassifierThresholds thresholds{};
};

int cmd_decode(DecodeArgs& a) {
    SensorModel sensor;
    a.sensor.apply(sensor);
    sensor.validate();
    std::ifstream file;
    std::istream* in = &std::cin;
    if (a.input != "-") {
        file.open(a.input);
        if (!file) {
            throw ValidationError("cannot open frame file '" + a.input + "'");
        }
        in = &file;
    }
    open_sink(a.output);
    const bool csv = a.format == "csv";
    if (csv) {
        write_csv_header(g_sink.out());
    }

    RunReport report;
    report.scenario = a.input;
    FrameAssembler assembler;
    std::optional<CapacitanceFrame> base_sub;
    std::optional<double> base_self;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto frame = assembler.push(parse_frame(line, line_no));
        if (!frame) {
            continue;
        }
        if (!base_sub) {
            report.baseline = frame->mutual;
            base_self = frame->latest_self_pf;
            report.baseline_self_pf = base_self;
            base_sub = subtract_parasitics(frame->mutual, sensor.parasitics);
            continue;
        }
        std::optional<SelfCapReading> self;
        if (frame->latest_self_pf && base_self) {
            self = SelfCapReading{*base_self, *frame->latest_self_pf};
        }
        RunStep step;
        step.t_s = frame->mutual.t_s;
        step.frame = frame->mutual;
        step.self_cap_pf = frame->latest_self_pf;
        step.decoded = decode(*base_sub, subtract_parasitics(frame->mutual, sensor.parasitics),
                              sensor.geometry, sensor.material, a.thresholds, self);
        if (csv) {
            g_sink.out() << csv_row(step) << '\n';
        }
        report.steps.push_back(std::move(step));
    }
    if (!base_sub) {
        throw ValidationError("no complete C1..C4 frame in input");
    }
    if (assembler.pending()) {
        std::cerr << "warning: trailing incomplete frame ignored\n";
    }
    if (!csv) {
        report.summary = summarize(report.steps);
        g_sink.out() << report_to_json(report).dump(2) << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// calibrate

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open '" + path + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(detail::trim(c));
        // Header row: first cell not numeric.
        if (first && !cells.empty()) {
            first = false;
            char* end = nullptr;
            std::strtod(cells[0].c_str(), &end);
            if (end == cells[0].c_str()) continue;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

double cell_number(const std::string& s, const std::string& path, std::size_t row) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw ValidationError(path + ": row " + std::to_string(row + 1) + ": '" + s + "' is not a number");
}

StressStrainRecord read_stress_strain(const std::string& path, double frequency) {
    StressStrainRecord r;
    r.frequency_hz = frequency;
    const auto rows = read_csv_rows(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& c = rows[i];
        if (c.size() < 2) {
            throw ValidationError(path + ": row " + std::to_string(i + 1) + " needs strain,stress_kPa");
        }
        StressStrainSample s{cell_number(c[0], path, i), cell_number(c[1], path, i), Branch::Loading};
        if (c.size() > 2) {
            if (c[2] == "unloading") s.branch = Branch::Unloading;
            else if (c[2] != "loading") {
                throw ValidationError(path + ": row " + std::to_string(i + 1) +
                                      ": branch must be loading or unloading");
            }
        }
        r.samples.push_back(s);
    }
    return r;
}

std::vector<ProximitySample> read_proximity(const std::string& path) {
    std::vector<ProximitySample> out;
    const auto rows = read_csv_rows(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() < 2) {
            throw ValidationError(path + ": row " + std::to_string(i + 1) + " needs z_mm,rel");
        }
        out.push_back({cell_number(rows[i][0], path, i), cell_number(rows[i][1], path, i)});
    }
    return out;
}

struct CalibrateArgs {
    std::vector<std::string> stress_strain;
    double frequency = 0.0;
    std::string proximity;
    std::string sensitivity = "headline";
    std::string base;
    std::string parasitics;
    std::string output;
};

int cmd_calibrate(CalibrateArgs& a) {
    CalibrationSet set;
    if (!a.base.empty()) {
        set = load_calibration(a.base);
    } else {
        const SensitivityTarget t = a.sensitivity == "line_fit" ? SensitivityTarget::line_fit()
                                    : a.sensitivity == "headline"
                                        ? SensitivityTarget::headline()
                                        : throw ValidationError("--sensitivity must be headline or line_fit");
        set.material = paper_material(set.geometry, t);
    }
    if (!a.parasitics.empty()) {
        set.parasitics = parasitics_preset(a.parasitics, set.geometry.baseline_pf());
    }
    if (!a.stress_strain.empty()) {
        std::vector<StressStrainRecord> recs;
        for (const auto& p : a.stress_strain) {
            recs.push_back(read_stress_strain(p, a.frequency));
        }
        const MaterialFit fit = fit_material(recs, set.material);
        set.material = fit.model;
        std::cerr << "material fit: E1=" << fit.model.e1_kpa << " kPa E2=" << fit.model.e2_kpa
                  << " kPa break=" << fit.model.strain_break << " rms=" << fit.rms_residual_kpa << " kPa\n";
    }
    if (!a.proximity.empty()) {
        const auto prof = read_proximity(a.proximity);
        const ProximityFit fit = fit_proximity(prof, set.proximity);
        if (!fit.monotone_input) {
            std::cerr << "warning: proximity profile is not monotone; fitted its isotonic regression\n";
        }
        set.proximity = fit.params;
        std::cerr << "proximity fit: delta=" << fit.params.delta_contact << " decay=" << fit.params.decay_mm
                  << " mm rms=" << fit.rms << '\n';
    }
    CalibrationSet{set}.sensor().validate();
    open_sink(a.output);
    write_calibration(g_sink.out(), set);
    return kExitOk;
}

// --------------------------------------------------------------------------
// classify

struct ClassifyArgs {
    std::string baseline, current;
    double self_baseline = 0.0, self_current = 0.0;
    CLI::Option *self_b_o{}, *self_c_o{};
    bool verbose = false;
    SensorOverrides sensor;
    ClassifierThresholds thresholds{};
};

int cmd_classify(ClassifyArgs& a) {
    SensorModel sensor;
    a.sensor.apply(sensor);
    sensor.validate();
    if (a.self_b_o->count() != a.self_c_o->count()) {
        throw ValidationError("--self-baseline and --self must be given together");
    }
    std::optional<SelfCapReading> self;
    if (a.self_b_o->count()) {
        self = SelfCapReading{a.self_baseline, a.self_current};
    }
    const auto base = subtract_parasitics(CapacitanceFrame::mutual(0, parse_quad(a.baseline, "--baseline")),
                                          sensor.parasitics);
    const auto cur = subtract_parasitics(CapacitanceFrame::mutual(0, parse_quad(a.current, "--current")),
                                         sensor.parasitics);
    const DecodedState d = decode(base, cur, sensor.geometry, sensor.material, a.thresholds, self);
    std::ostream& os = g_sink.out();
    os << d.stimulus.label() << '\n';
    if (a.verbose) {
        os << "normal_strain=" << d.normal_strain << "\nshear_x_mm=" << d.shear_x_mm
           << "\nshear_y_mm=" << d.shear_y_mm << "\nshear_strain_x=" << d.shear_strain_x
           << "\nshear_strain_y=" << d.shear_strain_y << "\nshear_angle_deg=" << d.shear_angle_deg
           << "\npressure_kPa=" << d.pressure_kpa << "\nshear_N=" << d.shear_force_n
           << "\nsaturated=" << (d.saturated ? "true" : "false") << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// scenario

struct ScenarioRunArgs {
    std::vector<std::string> files;
    std::vector<std::string> builtins;
    bool all_builtins = false;
    double step_dt = 0.0;
    std::string format = "csv";
    std::string output;
    std::string out_dir;
    SensorOverrides sensor;
};

int cmd_scenario_run(ScenarioRunArgs& a) {
    std::vector<Scenario> list;
    for (const auto& f : a.files) list.push_back(load_scenario(f));
    for (const auto& b : a.builtins) list.push_back(find_builtin(b));
    if (a.all_builtins) {
        for (auto& s : builtin_scenarios()) list.push_back(std::move(s));
    }
    if (list.empty()) {
        throw CLI::ValidationError("scenario run", "give a scenario file, --builtin or --all-builtins");
    }
    for (auto& s : list) {
        a.sensor.apply(s.config);
    }
    if (list.size() > 1 && a.out_dir.empty()) {
        throw CLI::ValidationError("scenario run", "several scenarios need --out-dir");
    }
    const auto reports = run_many(list, a.step_dt);
    for (const auto& r : reports) {
        for (const auto& w : r.warnings) std::cerr << r.scenario << ": warning: " << w << '\n';
    }
    if (!a.out_dir.empty()) {
        const ExportFormat fmt = a.format == "json" ? ExportFormat::Json : ExportFormat::Csv;
        std::filesystem::create_directories(a.out_dir);
        for (const auto& r : reports) {
            const std::string path = a.out_dir + "/" + r.scenario + (a.format == "json" ? ".json" : ".csv");
            export_report(r, fmt, path);
            std::cerr << "wrote " << path << '\n';
        }
        return kExitOk;
    }
    open_sink(a.output);
    emit_report(reports.front(), a.format);
    return kExitOk;
}

int cmd_scenario_list() {
    std::ostream& os = g_sink.out();
    for (const auto& s : builtin_scenarios()) {
        std::string ch;
        for (const auto& c : s.stimulus_channels()) ch += (ch.empty() ? "" : "+") + c;
        os << s.name << '\t' << (ch.empty() ? "-" : ch) << '\t' << s.description << '\n';
    }
    return kExitOk;
}

int cmd_scenario_show(const std::string& name, const std::string& output) {
    open_sink(output);
    g_sink.out() << scenario_to_json(find_builtin(name)).dump(2) << '\n';
    return kExitOk;
}

// --------------------------------------------------------------------------
// demos

struct GripperArgs {
    GripperParams p;
    std::string format = "csv";
    std::string output;
    CLI::Option* seed_o{};
    std::uint64_t seed = 0;
};

int cmd_demo_gripper(GripperArgs& a) {
    if (a.seed_o->count()) a.p.noise.seed = a.seed;
    const GripperResult r = gripper_demo(a.p);
    for (const auto& w : r.report.warnings) std::cerr << "warning: " << w << '\n';
    const auto& last = r.report.steps.back().decoded;
    std::cerr << "final mass " << r.mass_g.back() << " g: decoded shear " << last.shear_force_n << " N at "
              << last.shear_angle_deg << " deg\n";
    open_sink(a.output);
    emit_report(r.report, a.format);
    return kExitOk;
}

struct AmbiguityArgs {
    AmbiguityParams p;
    std::string format = "text";
    std::string output;
    CLI::Option* seed_o{};
    std::uint64_t seed = 0;
};

int cmd_demo_ambiguity(AmbiguityArgs& a) {
    if (a.seed_o->count()) a.p.noise.seed = a.seed;
    const AmbiguityResult r = ambiguity_demo(a.p);
    open_sink(a.output);
    std::ostream& os = g_sink.out();
    if (a.format == "json") {
        nlohmann::json j;
        j["press_eta_mm"] = r.press_eta_mm;
        j["signature_gap_pf"] = r.signature_gap_pf();
        j["collision"] = r.collision();
        j["resolved"] = r.resolved();
        j["mutual_a"] = report_to_json(r.mutual_a.report);
        j["mutual_b"] = report_to_json(r.mutual_b.report);
        j["augmented_a"] = report_to_json(r.augmented_a.report);
        j["augmented_b"] = report_to_json(r.augmented_b.report);
        os << j.dump(2) << '\n';
        return kExitOk;
    }
    auto row = [&](const char* mode, const char* which, const AmbiguityCase& c) {
        char buf[256];
        const auto& f = c.segment.frame.c_pf;
        std::snprintf(buf, sizeof buf, "%-12s %-18s t=%.3f  C=[%.3f %.3f %.3f %.3f] self=%s  -> %s\n", mode,
                      which, c.segment.t_s, f[0], f[1], f[2], f[3],
                      c.segment.self_cap_pf ? std::to_string(*c.segment.self_cap_pf).c_str() : "-",
                      c.segment.decoded.stimulus.label().c_str());
        os << buf;
    };
    row("mutual-only", "A hover", r.mutual_a);
    row("mutual-only", "B touch+press", r.mutual_b);
    row("ground+self", "A hover", r.augmented_a);
    row("ground+self", "B touch+press", r.augmented_b);
    os << "press depth " << r.press_eta_mm << " mm, mutual signature gap " << r.signature_gap_pf() << " pF\n";
    os << "collision (mutual-only): " << (r.collision() ? "yes" : "no") << '\n';
    os << "resolved (ground+self): " << (r.resolved() ? "yes" : "no") << '\n';
    return kExitOk;
}

void add_thresholds(CLI::App* app, ClassifierThresholds& th) {
    app->add_option("--epsilon", th.epsilon_rel, "Dead-band as a fraction of baseline");
    app->add_option("--band-min", th.proximity_band_min, "Average drop separating proximity from light touch");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft capacitive taxel simulator and decoder"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Forward-simulate readout frames (t,tag,code,value)");
    simulate->add_option("--scenario", sim.scenario_file, "Scenario JSON file")->check(CLI::ExistingFile);
    simulate->add_option("--builtin", sim.builtin, "Built-in scenario name");
    sim.eta_o = simulate->add_option("--eta", sim.eta, "Normal displacement, mm");
    sim.lx_o = simulate->add_option("--lambda-x", sim.lx, "Shear displacement X, mm");
    sim.ly_o = simulate->add_option("--lambda-y", sim.ly, "Shear displacement Y, mm");
    sim.fn_o = simulate->add_option("--normal-force", sim.fn, "Normal force, N");
    sim.fx_o = simulate->add_option("--shear-x", sim.fx, "Shear force X, N");
    sim.fy_o = simulate->add_option("--shear-y", sim.fy, "Shear force Y, N");
    simulate->add_option("--distance", sim.distance, "Object distance, mm (omit for none)");
    simulate->add_flag("--insulator", sim.insulator, "Object is an insulator rather than a finger");
    simulate->add_option("--cycles", sim.cycles, "Cycles for a static state")->capture_default_str();
    simulate->add_option("--format", sim.format, "frames | csv | json")
        ->check(CLI::IsMember({"frames", "csv", "json"}))
        ->capture_default_str();
    simulate->add_option("-o,--output", sim.output, "Output path (default stdout)");
    sim.sensor.add(simulate, true);

    DecodeArgs dec;
    auto* decode_cmd = app.add_subcommand("decode", "Decode a frame stream; the first complete frame is the baseline");
    decode_cmd->add_option("input", dec.input, "Frame file, '-' for stdin")->capture_default_str();
    decode_cmd->add_option("--format", dec.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    decode_cmd->add_option("-o,--output", dec.output, "Output path (default stdout)");
    dec.sensor.add(decode_cmd, false);
    add_thresholds(decode_cmd, dec.thresholds);

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Fit material/proximity data and write a parameter file");
    calibrate->add_option("--stress-strain", cal.stress_strain, "CSV strain,stress_kPa[,branch]; repeatable")
        ->check(CLI::ExistingFile);
    calibrate->add_option("--frequency", cal.frequency, "Drive frequency of cyclic stress-strain data, Hz");
    calibrate->add_option("--proximity", cal.proximity, "CSV z_mm,rel approach profile")->check(CLI::ExistingFile);
    calibrate->add_option("--sensitivity", cal.sensitivity, "headline | line_fit")->capture_default_str();
    calibrate->add_option("--base", cal.base, "Start from this parameter file")->check(CLI::ExistingFile);
    calibrate->add_option("--parasitics", cal.parasitics, "none | unshielded | shielded");
    calibrate->add_option("-o,--output", cal.output, "Output path (default stdout)");

    ClassifyArgs cls;
    auto* classify_cmd = app.add_subcommand("classify", "Classify one frame against a baseline");
    classify_cmd->add_option("--baseline", cls.baseline, "C1,C2,C3,C4 in pF")->required();
    classify_cmd->add_option("--current", cls.current, "C1,C2,C3,C4 in pF")->required();
    cls.self_b_o = classify_cmd->add_option("--self-baseline", cls.self_baseline, "SELF baseline, pF");
    cls.self_c_o = classify_cmd->add_option("--self", cls.self_current, "SELF reading, pF");
    classify_cmd->add_flag("-v,--verbose", cls.verbose, "Print decoded values too");
    cls.sensor.add(classify_cmd, false);
    add_thresholds(classify_cmd, cls.thresholds);

    auto* scenario = app.add_subcommand("scenario", "Scenario timelines");
    scenario->require_subcommand(1);
    ScenarioRunArgs srun;
    auto* scenario_run = scenario->add_subcommand("run", "Run scenarios and export the decoded timeline");
    scenario_run->add_option("files", srun.files, "Scenario JSON files")->check(CLI::ExistingFile);
    scenario_run->add_option("--builtin", srun.builtins, "Built-in scenario; repeatable");
    scenario_run->add_flag("--all-builtins", srun.all_builtins, "Run every built-in scenario");
    scenario_run->add_option("--step-dt", srun.step_dt, "Step in s (default one mux cycle)");
    scenario_run->add_option("--format", srun.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    scenario_run->add_option("-o,--output", srun.output, "Output path for a single scenario");
    scenario_run->add_option("--out-dir", srun.out_dir, "Directory for one file per scenario (created if missing)");
    srun.sensor.add(scenario_run, true);
    auto* scenario_list = scenario->add_subcommand("list", "List built-in scenarios");
    std::string show_name, show_out;
    auto* scenario_show = scenario->add_subcommand("show", "Print a built-in scenario as JSON");
    scenario_show->add_option("name", show_name, "Built-in scenario name")->required();
    scenario_show->add_option("-o,--output", show_out, "Output path (default stdout)");

    auto* demo = app.add_subcommand("demo", "Demonstration scenarios");
    demo->require_subcommand(1);
    GripperArgs grip;
    auto* gripper = demo->add_subcommand("gripper", "Cup filled while gripped; tracks the -Y shear");
    gripper->add_option("--ramp", grip.p.ramp_g_per_s, "Mass ramp, g/s")->capture_default_str();
    gripper->add_option("--mass", grip.p.final_mass_g, "Final mass, g")->capture_default_str();
    gripper->add_option("--friction", grip.p.friction, "Friction coefficient")->capture_default_str();
    gripper->add_option("--grip", grip.p.grip_force_n, "Grip normal force per taxel, N")->capture_default_str();
    gripper->add_option("--hold", grip.p.hold_s, "Hold after the ramp, s")->capture_default_str();
    gripper->add_option("--noise", grip.p.noise.sigma_pf, "Noise sigma, pF")->capture_default_str();
    grip.seed_o = gripper->add_option("--seed", grip.seed, "Noise seed");
    gripper->add_option("--format", grip.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    gripper->add_option("-o,--output", grip.output, "Output path (default stdout)");
    AmbiguityArgs amb;
    auto* ambiguity = demo->add_subcommand("ambiguity", "Hover versus light press, with and without the ground plane");
    ambiguity->add_option("--hover", amb.p.hover_mm, "Hover distance of case A, mm")->capture_default_str();
    ambiguity->add_option("--noise", amb.p.noise.sigma_pf, "Noise sigma, pF")->capture_default_str();
    amb.seed_o = ambiguity->add_option("--seed", amb.seed, "Noise seed");
    ambiguity->add_option("--format", amb.format, "text | json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    ambiguity->add_option("-o,--output", amb.output, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*decode_cmd) return cmd_decode(dec);
        if (*calibrate) return cmd_calibrate(cal);
        if (*classify_cmd) return cmd_classify(cls);
        if (*scenario_run) return cmd_scenario_run(srun);
        if (*scenario_list) return cmd_scenario_list();
        if (*scenario_show) return cmd_scenario_show(show_name, show_out);
        if (*gripper) return cmd_demo_gripper(grip);
        if (*ambiguity) return cmd_demo_ambiguity(amb);
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        const bool validation = dynamic_cast<const ValidationError*>(&e) ||
                                dynamic_cast<const FrameParseError*>(&e) ||
                                dynamic_cast<const DomainError*>(&e) ||
                                dynamic_cast<const OutOfRangeError*>(&e) ||
                                dynamic_cast<const DegenerateDataError*>(&e);
        if (g_sink.started) {
            *g_sink.os << "#ERROR: " << e.what() << '\n';
            g_sink.os->flush();
        }
        std::cerr << "error: " << e.what() << '\n';
        return validation ? kExitValidation : kExitRuntime;
    }
}
