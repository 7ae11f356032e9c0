// lzkit: command-line driver for the crossing toolkit.
//
//   lzkit simulate   --epsilon 3 --tau0 100 --samples 2001 --output traj.csv
//   lzkit compare    --epsilon 1 --tau0 5 --methods exact,numeric
//   lzkit figures    --which 4 --output figs/
//
// Any flag may also come from a JSON file given with --config; flags win.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lz/lz.hpp"

namespace {

struct Flags {
    double epsilon = 3.0;
    double tau0 = 100.0;
    std::string methods;
    std::size_t samples = 0;
    std::string grid;
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 0;
    std::string output;
    std::string format;
    std::string config_path;
    std::string which;
    std::string side;
    std::string form;
    std::string amplitude;
    std::string epsilons;
    std::string tau0s;
    unsigned threads = 1;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) throw lz::DomainError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

lz::GridKind parse_grid(const std::string& s) {
    if (s == "linear") return lz::GridKind::linear;
    if (s == "logsym" || s == "log_symmetric") return lz::GridKind::log_symmetric;
    throw lz::DomainError("--grid must be linear or logsym");
}

lz::Format parse_format(const std::string& s) {
    if (s == "csv") return lz::Format::csv;
    if (s == "json") return lz::Format::json;
    throw lz::DomainError("--format must be csv or json");
}

lz::Side parse_side(const std::string& s) {
    if (s == "negative") return lz::Side::negative;
    if (s == "positive") return lz::Side::positive;
    if (s == "both") return lz::Side::both;
    throw lz::DomainError("--side must be negative, positive or both");
}

lz::PositiveForm parse_form(const std::string& s) {
    if (s == "leading") return lz::PositiveForm::leading;
    if (s == "finite") return lz::PositiveForm::finite_tau0;
    throw lz::DomainError("--form must be leading or finite");
}

lz::WkbAmplitude parse_amplitude(const std::string& s) {
    if (s == "full") return lz::WkbAmplitude::full;
    if (s == "lowest") return lz::WkbAmplitude::lowest_order;
    throw lz::DomainError("--amplitude must be full or lowest");
}

// Flag names as used in both the command line and the JSON config file.
const std::vector<std::string> known_keys = {"epsilon", "tau0",   "methods", "method", "samples",   "grid",
                                             "rtol",    "atol",   "max_steps", "output", "format",  "which",
                                             "side",    "form",   "amplitude", "epsilons", "tau0s", "threads"};

std::string json_list_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (!v.is_array()) throw lz::DomainError("expected a string or an array");
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += ',';
        s += x.is_string() ? x.get<std::string>() : x.dump();
    }
    return s;
}

void apply_config_file(const std::string& path, Flags& f, std::set<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw lz::IoError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lz::DomainError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw lz::DomainError("config file must hold a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end())
                throw lz::DomainError("unknown config key '" + key + "'");
            if (given.count(key)) continue;  // command-line flag wins
            if (key == "epsilon") f.epsilon = v.get<double>();
            else if (key == "tau0") f.tau0 = v.get<double>();
            else if (key == "methods" || key == "method") f.methods = json_list_to_string(v);
            else if (key == "samples") f.samples = v.get<std::size_t>();
            else if (key == "grid") f.grid = v.get<std::string>();
            else if (key == "rtol") f.rtol = v.get<double>();
            else if (key == "atol") f.atol = v.get<double>();
            else if (key == "max_steps") f.max_steps = v.get<std::size_t>();
            else if (key == "output") f.output = v.get<std::string>();
            else if (key == "format") f.format = v.get<std::string>();
            else if (key == "which") f.which = v.is_string() ? v.get<std::string>() : v.dump();
            else if (key == "side") f.side = v.get<std::string>();
            else if (key == "form") f.form = v.get<std::string>();
            else if (key == "amplitude") f.amplitude = v.get<std::string>();
            else if (key == "epsilons") f.epsilons = json_list_to_string(v);
            else if (key == "tau0s") f.tau0s = json_list_to_string(v);
            else if (key == "threads") f.threads = v.get<unsigned>();
            given.insert(key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw lz::DomainError(std::string("bad value in config file: ") + e.what());
    }
}

lz::RunSpec build_spec(const std::string& command, const Flags& f, const std::set<std::string>& given) {
    lz::RunSpec s;
    if (command == "simulate") s.command = lz::Command::simulate;
    else if (command == "exact") s.command = lz::Command::exact;
    else if (command == "asymptotic") s.command = lz::Command::asymptotic;
    else if (command == "wkb") s.command = lz::Command::wkb;
    else if (command == "compare") s.command = lz::Command::compare;
    else if (command == "figures") s.command = lz::Command::figures;
    else s.command = lz::Command::sweep;

    s.config = {f.epsilon, f.tau0};
    s.opts.rtol = f.rtol;
    s.opts.atol = f.atol;
    if (given.count("max_steps")) s.opts.max_steps = f.max_steps;
    if (s.command == lz::Command::figures) s.grid = lz::figure_grid();
    if (given.count("grid")) s.grid.kind = parse_grid(f.grid);
    if (given.count("samples")) s.grid.count = f.samples;
    s.output_path = f.output;
    if (given.count("format")) s.format = parse_format(f.format);
    if (given.count("methods") || given.count("method")) {
        s.methods.clear();
        for (const auto& m : split_list(f.methods)) s.methods.push_back(lz::parse_method(m));
    }
    if (given.count("side")) s.side = parse_side(f.side);
    if (given.count("form")) s.form = parse_form(f.form);
    if (given.count("amplitude")) s.wkb_amplitude = parse_amplitude(f.amplitude);
    if (given.count("which")) s.which = f.which;
    if (given.count("epsilons")) s.sweep_epsilons = parse_doubles(f.epsilons);
    if (given.count("tau0s")) s.sweep_tau0s = parse_doubles(f.tau0s);
    s.threads = f.threads;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landau-Zener crossing toolkit: numeric, exact, asymptotic and WKB amplitudes"};
    app.require_subcommand(1);
    Flags f;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "integrate the equations of motion from -tau0 to tau0"},
        {"exact", "evaluate the parabolic-cylinder-function solution"},
        {"asymptotic", "evaluate the elementary-wave superpositions"},
        {"wkb", "positive-time superposition built from WKB waves"},
        {"compare", "compare two methods and report errors as JSON"},
        {"figures", "write the data behind the figures"},
        {"sweep", "final amplitudes for a set of (epsilon, tau0)"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--epsilon", f.epsilon, "dimensionless chirp");
        sub->add_option("--tau0", f.tau0, "start time is -tau0");
        sub->add_option("--samples", f.samples, "number of grid points");
        sub->add_option("--grid", f.grid, "linear or logsym");
        sub->add_option("--rtol", f.rtol, "relative tolerance of the integrator");
        sub->add_option("--atol", f.atol, "absolute tolerance of the integrator");
        sub->add_option("--max-steps", f.max_steps, "integrator step limit");
        sub->add_option("--output", f.output, "output file (directory for figures)");
        sub->add_option("--format", f.format, "csv or json");
        sub->add_option("--config", f.config_path, "JSON file with any of the flags");
        if (name == "compare") {
            sub->add_option("--methods,--method", f.methods, "reference,candidate (e.g. exact,numeric)");
        }
        if (name == "asymptotic") {
            sub->add_option("--side", f.side, "negative, positive or both");
            sub->add_option("--form", f.form, "leading or finite");
        }
        if (name == "wkb") sub->add_option("--amplitude", f.amplitude, "full or lowest");
        if (name == "figures") sub->add_option("--which", f.which, "1, 2, 3, 4 or all");
        if (name == "sweep") {
            sub->add_option("--epsilons", f.epsilons, "comma-separated chirps");
            sub->add_option("--tau0s", f.tau0s, "comma-separated start times");
            sub->add_option("--threads", f.threads, "worker threads");
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        lz::write_error_record(std::cerr, "usage_error", e.what(), 2);
        return 2;
    }

    CLI::App* sub = nullptr;
    for (CLI::App* s : subs)
        if (s->parsed()) sub = s;

    std::set<std::string> given;
    const std::pair<const char*, const char*> flag_keys[] = {
        {"--epsilon", "epsilon"}, {"--tau0", "tau0"},     {"--samples", "samples"},   {"--grid", "grid"},
        {"--rtol", "rtol"},       {"--atol", "atol"},     {"--max-steps", "max_steps"}, {"--output", "output"},
        {"--format", "format"},   {"--methods", "methods"}, {"--side", "side"},       {"--form", "form"},
        {"--amplitude", "amplitude"}, {"--which", "which"}, {"--epsilons", "epsilons"}, {"--tau0s", "tau0s"},
        {"--threads", "threads"},
    };
    for (const auto& [flag, key] : flag_keys) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option(flag);
        } catch (const CLI::OptionNotFound&) {
            continue;
        }
        if (opt->count() > 0) given.insert(key);
    }

    lz::RunSpec spec;
    try {
        if (!f.config_path.empty()) apply_config_file(f.config_path, f, given);
        spec = build_spec(sub->get_name(), f, given);
    } catch (const lz::Error& e) {
        const int code = lz::exit_code_for(e);
        lz::write_error_record(std::cerr, e.kind(), e.what(), code);
        return code;
    }
    return lz::run(spec, std::cout, std::cerr);
}
