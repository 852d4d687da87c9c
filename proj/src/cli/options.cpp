#include "pathwise/cli/options.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/cli/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

namespace pathwise::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw validation_error("invalid number for " + what + ": '" + text + "'");
    }
    return value;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    std::int64_t value = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw validation_error("invalid integer for " + what + ": '" + text + "'");
    }
    return value;
}

// "k1=v1,k2=v2" -> map; list-valued entries use '|' separators.
std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    if (trim(text).empty()) return kv;
    for (const auto& part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) {
            throw validation_error("expected key=value, got '" + part + "'");
        }
        kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
    return kv;
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                         std::initializer_list<const char*> known, const std::string& kind) {
    for (const auto& [k, v] : kv) {
        if (std::find_if(known.begin(), known.end(),
                         [&k](const char* s) { return k == s; }) == known.end()) {
            throw validation_error("unknown " + kind + " parameter '" + k + "'");
        }
    }
}

std::vector<Rational> parse_rational_list(const std::string& text, const std::string& what) {
    std::vector<Rational> out;
    for (const auto& item : split(text, '|')) {
        const std::string t = trim(item);
        if (t.empty()) throw validation_error("empty entry in " + what);
        out.push_back(parse_rational(t));
    }
    return out;
}

} // namespace

ProcessSpec parse_process(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = trim(colon == std::string::npos ? text : text.substr(0, colon));
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    const auto kv = parse_kv(args);

    auto get = [&kv](const char* key, double dflt) {
        const auto it = kv.find(key);
        return it == kv.end() ? dflt : parse_double(it->second, key);
    };

    if (kind == "gaussian") {
        reject_unknown_keys(kv, {"mu", "sigma"}, "gaussian");
        return ProcessSpec::gaussian(get("mu", 0.0), get("sigma", 1.0));
    }
    if (kind == "studentt") {
        reject_unknown_keys(kv, {"mu", "scale", "nu"}, "studentt");
        return ProcessSpec::student_t(get("mu", 0.0), get("scale", 1.0), get("nu", 3.0));
    }
    if (kind == "ar1") {
        reject_unknown_keys(kv, {"mu", "sigma", "phi"}, "ar1");
        return ProcessSpec::ar1(get("mu", 0.0), get("sigma", 1.0), get("phi", 0.0));
    }
    if (kind == "die") {
        reject_unknown_keys(kv, {}, "die");
        return ProcessSpec::fair_die();
    }
    if (kind == "coin") {
        reject_unknown_keys(kv, {}, "coin");
        return ProcessSpec::coin();
    }
    if (kind == "discrete") {
        reject_unknown_keys(kv, {"values", "probs"}, "discrete");
        const auto vit = kv.find("values");
        const auto pit = kv.find("probs");
        if (vit == kv.end() || pit == kv.end()) {
            throw validation_error("discrete process needs values=... and probs=...");
        }
        return ProcessSpec::discrete(parse_rational_list(vit->second, "values"),
                                     parse_rational_list(pit->second, "probs"));
    }
    throw validation_error("unknown process kind '" + kind + "'");
}

namespace {

Schedule check_leverage(Schedule s, bool allow_leverage) {
    if (!allow_leverage && s.max_a() > 1.0 + 1e-12) {
        throw validation_error("schedule has a_j > 1 (leverage); pass --allow-leverage to permit");
    }
    return s;
}

} // namespace

Schedule schedule_for_horizon(const std::string& name, int t, bool allow_leverage) {
    if (name == "lump") return check_leverage(lump_sum(t), allow_leverage);
    if (name == "dca") return check_leverage(dca(t), allow_leverage);
    if (name == "unit") return check_leverage(uniform_exposure(t), allow_leverage);
    if (name == "last") return check_leverage(last_period(t), allow_leverage);
    if (name.rfind("custom:", 0) == 0) {
        return check_leverage(parse_schedule(name, allow_leverage), allow_leverage);
    }
    throw validation_error("unknown schedule '" + name + "'");
}

Schedule parse_schedule(const std::string& text, bool allow_leverage) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw validation_error("schedule needs a parameter, e.g. 'lump:6' or 'custom:0.5,0.5'");
    }
    const std::string kind = trim(text.substr(0, colon));
    const std::string arg = text.substr(colon + 1);

    if (kind == "custom") {
        const char sep = arg.find(';') != std::string::npos ? ';' : ',';
        std::vector<Rational> w;
        for (const auto& item : split(arg, sep)) {
            const std::string s = trim(item);
            if (s.empty()) throw validation_error("empty weight in custom schedule");
            const Rational r = parse_rational(s);
            if (r < 0) throw validation_error("custom schedule weights must be >= 0");
            w.push_back(r);
        }
        return check_leverage(custom_exact(std::move(w)), allow_leverage);
    }

    const std::int64_t t = parse_int(arg, "schedule horizon");
    if (t < 1) throw validation_error("schedule horizon must be >= 1");
    return schedule_for_horizon(kind, static_cast<int>(t), allow_leverage);
}

std::vector<std::int64_t> parse_horizon_range(const std::string& text) {
    std::string body = trim(text);
    std::int64_t step = 1;
    const auto colon = body.find(':');
    if (colon != std::string::npos) {
        step = parse_int(body.substr(colon + 1), "horizon step");
        if (step < 1) throw validation_error("horizon step must be >= 1");
        body = body.substr(0, colon);
    }
    const auto dots = body.find("..");
    std::int64_t lo;
    std::int64_t hi;
    if (dots == std::string::npos) {
        lo = hi = parse_int(body, "horizon");
    } else {
        lo = parse_int(body.substr(0, dots), "horizon range start");
        hi = parse_int(body.substr(dots + 2), "horizon range end");
    }
    if (lo < 1 || hi < lo) throw validation_error("invalid horizon range '" + text + "'");
    std::vector<std::int64_t> out;
    for (std::int64_t t = lo; t <= hi; t += step) out.push_back(t);
    return out;
}

nlohmann::json canonical_config(const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["process"] = parse_process(cfg.process).describe(); // canonicalized
    if (!cfg.schedule.empty()) j["schedule"] = cfg.schedule;
    if (!cfg.schedules.empty()) j["schedules"] = cfg.schedules;
    if (!cfg.horizon_range.empty()) j["t"] = cfg.horizon_range;
    j["paths"] = cfg.paths;
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    j["z_max"] = cfg.z_max;
    j["exact"] = cfg.exact;
    j["allow_leverage"] = cfg.allow_leverage;
    j["rational"] = cfg.rational;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.command = j.at("command").get<std::string>();
    cfg.process = j.at("process").get<std::string>();
    if (j.contains("schedule")) cfg.schedule = j["schedule"].get<std::string>();
    if (j.contains("schedules")) cfg.schedules = j["schedules"].get<std::vector<std::string>>();
    if (j.contains("t")) cfg.horizon_range = j["t"].get<std::string>();
    cfg.paths = j.at("paths").get<std::uint64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.output = j.at("output").get<std::string>();
    cfg.z_max = j.at("z_max").get<double>();
    cfg.exact = j.at("exact").get<bool>();
    cfg.allow_leverage = j.at("allow_leverage").get<bool>();
    cfg.rational = j.at("rational").get<bool>();
    return cfg;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);

    // Process parameters may be given piecewise (kind=..., mu=..., ...).
    std::map<std::string, std::string> process_parts;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw validation_error("config file line " + std::to_string(lineno) +
                                   ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '-', '_');
        const std::string value = trim(line.substr(eq + 1));

        if (key == "process") {
            cfg.process = value;
        } else if (key == "schedule") {
            cfg.schedule = value;
        } else if (key == "schedules") {
            cfg.schedules.clear();
            for (const auto& s : split(value, ',')) cfg.schedules.push_back(trim(s));
        } else if (key == "t") {
            cfg.horizon_range = value;
        } else if (key == "paths") {
            cfg.paths = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_int(value, key));
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "out") {
            cfg.out_file = value;
        } else if (key == "z_max") {
            cfg.z_max = parse_double(value, key);
        } else if (key == "exact") {
            cfg.exact = value == "true" || value == "1";
        } else if (key == "allow_leverage") {
            cfg.allow_leverage = value == "true" || value == "1";
        } else if (key == "rational") {
            cfg.rational = value == "true" || value == "1";
        } else if (key == "dump_paths") {
            cfg.dump_paths_file = value;
        } else if (key == "kind" || key == "mu" || key == "sigma" || key == "scale" ||
                   key == "nu" || key == "phi" || key == "values" || key == "probs") {
            process_parts[key] = value;
        } else {
            throw validation_error("config file: unknown key '" + key + "'");
        }
    }

    if (!process_parts.empty()) {
        const auto kind_it = process_parts.find("kind");
        if (kind_it == process_parts.end()) {
            throw validation_error("config file: process parameters need a 'kind' key");
        }
        std::string text = kind_it->second;
        char sep = ':';
        for (const auto& [k, v] : process_parts) {
            if (k == "kind") continue;
            std::string value = v;
            if (k == "values" || k == "probs") {
                // comma lists in the file; '|' in the compact form
                std::string joined;
                for (const auto& item : split(value, ',')) {
                    if (!joined.empty()) joined += '|';
                    joined += trim(item);
                }
                value = joined;
            }
            text += sep;
            sep = ',';
            text += k + "=" + value;
        }
        cfg.process = text;
    }
}

} // namespace pathwise::cli
