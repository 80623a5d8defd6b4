#include "stopgame/config.hpp"

#include "stopgame/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace stopgame {

BoundaryMode RunConfig::boundary_mode() const {
    if (mode == "martingale") return BoundaryMode::martingale;
    if (mode == "ode") return BoundaryMode::ode;
    if (mode == "asym") return BoundaryMode::asym;
    throw Error(Errc::bad_config, "unknown mode: " + mode);
}

GameSpec RunConfig::to_game() const {
    const ModelParams params = validate(mu, sigma, r);
    const auto consolation = [](double strike) {
        return strike > 0.0 ? call_payoff(strike) : zero_payoff();
    };
    PlayerSpec pl1{call_payoff(k1), consolation(l1), p1};
    PlayerSpec pl2{call_payoff(k2), consolation(l2), p2};
    return make_game(params, x0, pl1, pl2);
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    double out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw Error(Errc::bad_config, "bad numeric value for " + key + ": " + value);
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw Error(Errc::bad_config, "bad integer value for " + key + ": " + value);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::bad_config, "config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "mu") cfg.mu = parse_double(key, value);
        else if (key == "sigma") cfg.sigma = parse_double(key, value);
        else if (key == "r") cfg.r = parse_double(key, value);
        else if (key == "x0") cfg.x0 = parse_double(key, value);
        else if (key == "mode") cfg.mode = value;
        else if (key == "k1") cfg.k1 = parse_double(key, value);
        else if (key == "l1") cfg.l1 = parse_double(key, value);
        else if (key == "k2") cfg.k2 = parse_double(key, value);
        else if (key == "l2") cfg.l2 = parse_double(key, value);
        else if (key == "p1") cfg.p1 = parse_double(key, value);
        else if (key == "p2") cfg.p2 = parse_double(key, value);
        else if (key == "dt") cfg.dt = parse_double(key, value);
        else if (key == "horizon") cfg.horizon = parse_double(key, value);
        else if (key == "paths") cfg.paths = parse_u64(key, value);
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "x_min") cfg.x_min = parse_double(key, value);
        else if (key == "x_max") cfg.x_max = parse_double(key, value);
        else if (key == "x_points") cfg.x_points = parse_u64(key, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else throw Error(Errc::bad_config, "unknown config key: " + key);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::bad_config, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "mu=" << csv::format(cfg.mu) << '\n'
        << "sigma=" << csv::format(cfg.sigma) << '\n'
        << "r=" << csv::format(cfg.r) << '\n'
        << "x0=" << csv::format(cfg.x0) << '\n'
        << "mode=" << cfg.mode << '\n'
        << "k1=" << csv::format(cfg.k1) << '\n'
        << "l1=" << csv::format(cfg.l1) << '\n'
        << "k2=" << csv::format(cfg.k2) << '\n'
        << "l2=" << csv::format(cfg.l2) << '\n'
        << "p1=" << csv::format(cfg.p1) << '\n'
        << "p2=" << csv::format(cfg.p2) << '\n'
        << "dt=" << csv::format(cfg.dt) << '\n'
        << "horizon=" << csv::format(cfg.horizon) << '\n'
        << "paths=" << cfg.paths << '\n'
        << "seed=" << cfg.seed << '\n'
        << "x_min=" << csv::format(cfg.x_min) << '\n'
        << "x_max=" << csv::format(cfg.x_max) << '\n'
        << "x_points=" << cfg.x_points << '\n'
        << "out_dir=" << cfg.out_dir << '\n';
    return out.str();
}

} // namespace stopgame
