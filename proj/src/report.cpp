#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "pyramid/bench.hpp"

namespace pyramid::bench {

double censored_value(Family family) { return family == Family::nurse ? 100.0 : 0.0; }

Sense sense_of(Family family) { return family == Family::nurse ? Sense::minimize : Sense::maximize; }

std::vector<InstanceSummary> summarize_instances(const ResultSet& results) {
    const Sense sense = sense_of(results.family);
    std::vector<InstanceSummary> out;
    std::map<std::pair<std::string, int>, std::size_t> index;
    for (const auto& c : results.cells) {
        const auto key = std::pair{c.strategy, c.instance};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            InstanceSummary s;
            s.strategy = c.strategy;
            s.instance = c.instance;
            out.push_back(s);
        }
        auto& s = out[it->second];
        ++s.runs;
        if (c.failed) ++s.failed_runs;
        if (c.feasible && !c.failed) {
            ++s.feasible_runs;
            if (!s.best_feasible || better(sense, c.raw, *s.best_feasible)) s.best_feasible = c.raw;
        }
    }
    for (auto& s : out) s.value = s.best_feasible ? *s.best_feasible : censored_value(results.family);
    return out;
}

std::vector<StrategySummary> summarize(const ResultSet& results) {
    std::vector<StrategySummary> out;
    std::map<std::string, std::size_t> index;
    for (const auto& s : summarize_instances(results)) {
        auto it = index.find(s.strategy);
        if (it == index.end()) {
            it = index.emplace(s.strategy, out.size()).first;
            out.push_back({s.strategy});
        }
        auto& row = out[it->second];
        ++row.instances;
        row.feasibility += static_cast<double>(s.feasible_runs) / s.runs;
        row.mean_objective += s.value;
        if (!s.best_feasible) ++row.censored_instances;
        row.failed_cells += s.failed_runs;
    }
    for (auto& row : out) {
        row.feasibility /= row.instances;
        row.mean_objective /= row.instances;
    }
    return out;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

constexpr const char* kCsvHeader =
    "family,config,strategy,instance,run,seed,feasible,raw,violation,penalized,generations,hillclimb_moves,"
    "time_limited,failed";

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T number(const std::string& s, const char* what) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw ConfigurationError(std::string("bad ") + what + " field in results: '" + s + "'");
    }
    return v;
}

bool flag(const std::string& s) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ConfigurationError("bad flag field in results: '" + s + "'");
}

} // namespace

std::string emit_report(const ResultSet& results, ReportFormat format) {
    const auto rows = summarize(results);
    const bool nurse = results.family == Family::nurse;
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "strategy,instances,feasibility,mean_objective,censored_instances,failed_cells\n";
        if (results.bound_objective || results.bound_feasibility) {
            out << "Bound,," << (results.bound_feasibility ? shortest(*results.bound_feasibility) : "") << ","
                << (results.bound_objective ? shortest(*results.bound_objective) : "") << ",,\n";
        }
        for (const auto& r : rows) {
            out << r.strategy << ',' << r.instances << ',' << shortest(r.feasibility) << ',' << shortest(r.mean_objective)
                << ',' << r.censored_instances << ',' << r.failed_cells << '\n';
        }
        return out.str();
    }
    const std::string obj = nurse ? "N Cost" : "M Rent";
    const std::string fea = nurse ? "N Feasibility" : "M Feasibility";
    std::size_t width = 10;
    for (const auto& r : rows) width = std::max(width, r.strategy.size() + 2);
    out << "# " << token(results.family) << " config " << (results.config_digest.empty() ? "-" : results.config_digest)
        << '\n';
    out << pad("Strategy", width) << lpad(obj, 10) << lpad(fea, 16) << lpad("Censored", 10) << lpad("Failed", 8) << '\n';
    if (results.bound_objective || results.bound_feasibility) {
        out << pad("Bound", width) << lpad(results.bound_objective ? fixed(*results.bound_objective, 1) : "-", 10)
            << lpad(results.bound_feasibility ? fixed(100.0 * *results.bound_feasibility, 1) + "%" : "-", 16)
            << lpad("-", 10) << lpad("-", 8) << '\n';
    }
    for (const auto& r : rows) {
        out << pad(r.strategy, width) << lpad(fixed(r.mean_objective, 1), 10)
            << lpad(fixed(100.0 * r.feasibility, 1) + "%", 16) << lpad(std::to_string(r.censored_instances), 10)
            << lpad(std::to_string(r.failed_cells), 8) << '\n';
    }
    return out.str();
}

std::string results_to_csv(const ResultSet& results) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& c : results.cells) {
        out << token(results.family) << ',' << results.config_digest << ',' << c.strategy << ',' << c.instance << ','
            << c.run << ',' << c.seed << ',' << int(c.feasible) << ',' << shortest(c.raw) << ',' << shortest(c.violation)
            << ',' << shortest(c.penalized) << ',' << c.generations << ',' << c.hillclimb_moves << ','
            << int(c.time_limited) << ',' << int(c.failed) << '\n';
    }
    return out.str();
}

ResultSet results_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ConfigurationError("results file lacks the expected header");
    ResultSet rs;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 14) throw ConfigurationError("results row has " + std::to_string(f.size()) + " fields, expected 14");
        const auto family = parse_family(f[0]);
        if (!family) throw ConfigurationError("unknown problem family in results: '" + f[0] + "'");
        if (first) {
            rs.family = *family;
            rs.config_digest = f[1];
            first = false;
        } else if (*family != rs.family) {
            throw ConfigurationError("results mix problem families");
        }
        CellResult c;
        c.strategy = f[2];
        c.instance = number<int>(f[3], "instance");
        c.run = number<int>(f[4], "run");
        c.seed = number<std::uint64_t>(f[5], "seed");
        c.feasible = flag(f[6]);
        c.raw = number<double>(f[7], "raw");
        c.violation = number<double>(f[8], "violation");
        c.penalized = number<double>(f[9], "penalized");
        c.generations = number<int>(f[10], "generations");
        c.hillclimb_moves = number<int>(f[11], "hillclimb_moves");
        c.time_limited = flag(f[12]);
        c.failed = flag(f[13]);
        rs.cells.push_back(std::move(c));
    }
    return rs;
}

std::string_view token(Verdict verdict) {
    switch (verdict) {
    case Verdict::better: return "better";
    case Verdict::worse: return "worse";
    case Verdict::tied: return "tied";
    case Verdict::missing: return "missing";
    }
    return "?";
}

OrderingCheck compare(const std::vector<StrategySummary>& rows, const std::string& a, const std::string& b, Sense sense,
                      double feasibility_margin, double objective_margin) {
    OrderingCheck check{a, b};
    const auto find = [&](const std::string& name) -> const StrategySummary* {
        for (const auto& r : rows) if (r.strategy == name) return &r;
        return nullptr;
    };
    const auto* ra = find(a);
    const auto* rb = find(b);
    if (!ra || !rb) return check;
    const auto verdict = [](double diff, double margin) {
        if (diff > margin) return Verdict::better;
        if (diff < -margin) return Verdict::worse;
        return Verdict::tied;
    };
    check.feasibility = verdict(ra->feasibility - rb->feasibility, feasibility_margin);
    const double gain = sense == Sense::minimize ? rb->mean_objective - ra->mean_objective : ra->mean_objective - rb->mean_objective;
    check.objective = verdict(gain, objective_margin);
    return check;
}

std::vector<OrderingCheck> compare_orderings(const std::vector<StrategySummary>& rows,
                                             const std::vector<std::pair<std::string, std::string>>& pairs, Sense sense,
                                             double feasibility_margin, double objective_margin) {
    std::vector<OrderingCheck> out;
    for (const auto& [a, b] : pairs) out.push_back(compare(rows, a, b, sense, feasibility_margin, objective_margin));
    return out;
}

} // namespace pyramid::bench
