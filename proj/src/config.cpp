#include "wigmd/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wigmd/md.hpp"
#include "wigmd/morse.hpp"
#include "wigmd/wigner.hpp"

namespace wigmd::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) fail(line, "trailing characters in number \"" + v + "\"");
        return x;
    } catch (const std::invalid_argument&) {
        fail(line, "not a number: \"" + v + "\"");
    } catch (const std::out_of_range&) {
        fail(line, "number out of range: \"" + v + "\"");
    }
}

long parse_long(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) fail(line, "trailing characters in integer \"" + v + "\"");
        return x;
    } catch (const std::invalid_argument&) {
        fail(line, "not an integer: \"" + v + "\"");
    } catch (const std::out_of_range&) {
        fail(line, "integer out of range: \"" + v + "\"");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(line, "not a boolean: \"" + v + "\"");
}

// bare number = reduced temperature; trailing K = Kelvin
double parse_temperature(const std::string& v, int line) {
    std::string t = v;
    bool kelvin = false;
    if (!t.empty() && (t.back() == 'K' || t.back() == 'k')) {
        kelvin = true;
        t = trim(t.substr(0, t.size() - 1));
    }
    const double x = parse_double(t, line);
    if (!(x > 0.0)) fail(line, "temperature must be positive");
    if (!kelvin) return x;
    const units::PhysicalConstants pc;
    return units::reduce(pc, x, units::Kind::temperature);
}

forcefield::BathMode parse_mode(const std::string& v, int line) {
    if (v == "liquid") return forcefield::BathMode::liquid;
    if (v == "ideal_gas" || v == "ideal-gas") return forcefield::BathMode::ideal_gas;
    fail(line, "unknown bath mode \"" + v + "\" (expected liquid or ideal_gas)");
}

} // namespace

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (superpositions.empty()) bad("no superpositions given");
    if (temperatures.empty()) bad("no temperatures given");
    if (modes.empty()) bad("no bath modes given");
    for (double t : temperatures)
        if (!(t > 0.0)) bad("temperature must be positive");
    if (!(alpha > 0.0) || alpha > 1.0) bad("alpha must be in (0, 1]");
    if (!(density > 0.0)) bad("density must be positive");
    if (particles < 2) bad("particles must be >= 2");
    if (trajectories < 2) bad("trajectories must be >= 2");
    if (!(dt > 0.0)) bad("dt must be positive");
    if (!(t_end > 0.0)) bad("t_end must be positive");
    if (record_stride < 1) bad("record_stride must be >= 1");
    if (pool_size < 1) bad("pool_size must be >= 1");
    if (pool_stride < 1) bad("pool_stride must be >= 1");
    if (workers < 0) bad("workers must be >= 0");
    if (bins < 2) bad("bins must be >= 2");
    if (!(lyapunov_delta0 > 0.0)) bad("lyapunov_delta0 must be positive");
    if (!(drift_tolerance > 0.0)) bad("drift_tolerance must be positive");
    if (equil_steps < 0 || settle_steps < 0) bad("equilibration step counts must be >= 0");
    if (directory.empty()) bad("output directory must not be empty");

    // each superposition must resolve against the I2 bound spectrum
    const units::PhysicalConstants pc;
    const auto rc = units::ReducedConstants::from(pc);
    const auto spec = morse::MorseSpec::i2(rc);
    const int bound = morse::bound_count(spec);
    for (const auto& s : superpositions) {
        const auto state = wigner::Superposition::parse(s);
        state.validate(bound);
    }

    md::IntegrationPlan plan{dt, long(t_end / dt + 0.5), record_stride};
    plan.validate(spec.period());
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream os;
    os.precision(17);
    os << "[system]\n";
    os << "superpositions = ";
    for (std::size_t i = 0; i < superpositions.size(); ++i)
        os << (i ? ", " : "") << superpositions[i];
    os << "\nalpha = " << alpha << "\n";
    os << "include_isolated = " << (include_isolated ? "true" : "false") << "\n\n";

    os << "[bath]\n";
    os << "temperatures = ";
    for (std::size_t i = 0; i < temperatures.size(); ++i) os << (i ? ", " : "") << temperatures[i];
    os << "\nmodes = ";
    for (std::size_t i = 0; i < modes.size(); ++i)
        os << (i ? ", " : "")
           << (modes[i] == forcefield::BathMode::liquid ? "liquid" : "ideal_gas");
    os << "\ndensity = " << density << "\n";
    os << "particles = " << particles << "\n\n";

    os << "[ensemble]\n";
    os << "trajectories = " << trajectories << "\n";
    os << "dt = " << dt << "\n";
    os << "t_end = " << t_end << "\n";
    os << "record_stride = " << record_stride << "\n";
    os << "seed = " << seed << "\n";
    os << "pool_size = " << pool_size << "\n";
    os << "pool_stride = " << pool_stride << "\n";
    os << "workers = " << workers << "\n";
    os << "checkpoint = " << (checkpoint ? "true" : "false") << "\n";
    os << "bins = " << bins << "\n";
    os << "lyapunov_delta0 = " << lyapunov_delta0 << "\n";
    os << "drift_tolerance = " << drift_tolerance << "\n";
    os << "equil_steps = " << equil_steps << "\n";
    os << "settle_steps = " << settle_steps << "\n\n";

    os << "[output]\n";
    os << "directory = " << directory << "\n";
    os << "write_wigner = " << (write_wigner ? "true" : "false") << "\n";
    os << "write_trajectories = " << (write_trajectories ? "true" : "false") << "\n";
    return os.str();
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;  // defaults are the desk preset
    if (name == "desk") return cfg;
    if (name == "paper") {
        cfg.particles = 512;
        cfg.trajectories = 2000000;
        return cfg;
    }
    throw std::invalid_argument("unknown preset \"" + name + "\" (expected desk or paper)");
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;

    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "system" && section != "bath" && section != "ensemble" &&
                section != "output")
                fail(line, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (value.empty()) fail(line, "empty value for key \"" + key + "\"");
        if (section.empty()) fail(line, "key \"" + key + "\" outside any section");

        if (section == "system") {
            if (key == "superpositions") {
                cfg.superpositions = split_list(value);
                if (cfg.superpositions.empty()) fail(line, "empty superposition list");
                for (const auto& sp : cfg.superpositions) {
                    try {
                        wigner::Superposition::parse(sp);
                    } catch (const std::exception& e) {
                        fail(line, e.what());
                    }
                }
            } else if (key == "alpha") {
                cfg.alpha = parse_double(value, line);
            } else if (key == "include_isolated") {
                cfg.include_isolated = parse_bool(value, line);
            } else {
                fail(line, "unknown key \"" + key + "\" in [system]");
            }
        } else if (section == "bath") {
            if (key == "temperatures") {
                cfg.temperatures.clear();
                for (const auto& t : split_list(value))
                    cfg.temperatures.push_back(parse_temperature(t, line));
                if (cfg.temperatures.empty()) fail(line, "empty temperature list");
            } else if (key == "modes") {
                cfg.modes.clear();
                for (const auto& m : split_list(value)) cfg.modes.push_back(parse_mode(m, line));
                if (cfg.modes.empty()) fail(line, "empty mode list");
            } else if (key == "density") {
                cfg.density = parse_double(value, line);
            } else if (key == "particles") {
                cfg.particles = int(parse_long(value, line));
            } else {
                fail(line, "unknown key \"" + key + "\" in [bath]");
            }
        } else if (section == "ensemble") {
            if (key == "trajectories") cfg.trajectories = parse_long(value, line);
            else if (key == "dt") cfg.dt = parse_double(value, line);
            else if (key == "t_end") cfg.t_end = parse_double(value, line);
            else if (key == "record_stride") cfg.record_stride = parse_long(value, line);
            else if (key == "seed") cfg.seed = std::uint64_t(parse_long(value, line));
            else if (key == "pool_size") cfg.pool_size = int(parse_long(value, line));
            else if (key == "pool_stride") cfg.pool_stride = parse_long(value, line);
            else if (key == "workers") cfg.workers = int(parse_long(value, line));
            else if (key == "checkpoint") cfg.checkpoint = parse_bool(value, line);
            else if (key == "bins") cfg.bins = int(parse_long(value, line));
            else if (key == "lyapunov_delta0") cfg.lyapunov_delta0 = parse_double(value, line);
            else if (key == "drift_tolerance") cfg.drift_tolerance = parse_double(value, line);
            else if (key == "equil_steps") cfg.equil_steps = parse_long(value, line);
            else if (key == "settle_steps") cfg.settle_steps = parse_long(value, line);
            else fail(line, "unknown key \"" + key + "\" in [ensemble]");
        } else {  // output
            if (key == "directory") cfg.directory = value;
            else if (key == "write_wigner") cfg.write_wigner = parse_bool(value, line);
            else if (key == "write_trajectories") cfg.write_trajectories = parse_bool(value, line);
            else fail(line, "unknown key \"" + key + "\" in [output]");
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, const ExperimentConfig& base) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str(), base);
}

} // namespace wigmd::config
