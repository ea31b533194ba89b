#include "aoisched/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace aoi {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ParseError, path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
    return *it;
}

std::vector<double> number_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

NetworkSpec parse_network_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "line " << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": " << e.what();
        throw Error(ErrorCode::ParseError, os.str());
    }
    if (!doc.is_object()) fail("$", "expected an object");

    NetworkSpec net;
    const json& m = field(doc, "M", "$");
    if (!m.is_number_integer()) fail("M", "expected an integer");
    net.bandwidth = m.get<int>();

    const json& sensors = field(doc, "sensors", "$");
    if (!sensors.is_array() || sensors.empty()) fail("sensors", "expected a non-empty array");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string path = "sensors[" + std::to_string(i) + "]";
        const json& s = sensors[i];
        if (!s.is_object()) fail(path, "expected an object");
        SensorSpec spec;
        spec.channel.eta = number_array(field(s, "eta", path), path + ".eta");
        spec.channel.eps = number_array(field(s, "eps", path), path + ".eps");
        spec.channel.omega = number_array(field(s, "omega", path), path + ".omega");
        const json& e = field(s, "power_budget", path);
        if (!e.is_number()) fail(path + ".power_budget", "expected a number");
        spec.power_budget = e.get<double>();
        if (auto err = validate_sensor(spec)) fail(path, err->message);
        net.sensors.push_back(std::move(spec));
    }
    if (auto err = validate_network(net)) fail("$", err->message);
    return net;
}

NetworkSpec load_network_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_network_spec(ss.str());
    } catch (const Error& e) {
        std::string what = e.what();
        const std::string prefix = std::string(to_string(e.code())) + ": ";
        if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
        throw Error(ErrorCode::ParseError, path + ": " + what);
    }
}

json network_to_json(const NetworkSpec& network) {
    json sensors = json::array();
    for (const auto& s : network.sensors) {
        sensors.push_back({{"eta", s.channel.eta},
                           {"eps", s.channel.eps},
                           {"omega", s.channel.omega},
                           {"power_budget", s.power_budget}});
    }
    return {{"M", network.bandwidth}, {"sensors", sensors}};
}

void write_policy_csv(std::ostream& os, const OccupancyMeasure& occ, const ThresholdPolicy& policy) {
    os << "x,q,mu,y,p\n";
    const int X = occ.truncation();
    for (int x = 1; x <= X; ++x) {
        for (int q = 1; q <= occ.num_states(); ++q) {
            os << x << ',' << q << ',' << fmt(occ.mu(x)) << ',' << (x < X ? fmt(occ.y(x, q)) : "") << ','
               << fmt(policy.at(x, q)) << '\n';
        }
    }
}

json policy_to_json(const OccupancyMeasure& occ, const ThresholdPolicy& policy) {
    const int X = occ.truncation();
    json mu = std::vector<double>(occ.mu_values().begin(), occ.mu_values().end());
    json y = json::array();
    json p = json::array();
    for (int x = 1; x <= X; ++x) {
        json yr = json::array();
        json pr = json::array();
        for (int q = 1; q <= occ.num_states(); ++q) {
            if (x < X) yr.push_back(occ.y(x, q));
            pr.push_back(policy.at(x, q));
        }
        if (x < X) y.push_back(yr);
        p.push_back(pr);
    }
    return {{"truncation", X}, {"num_states", occ.num_states()}, {"mu", mu}, {"y", y}, {"p", p}};
}

void write_metrics_csv_header(std::ostream& os) {
    os << "replication,seed,slots,avg_aoi,avg_aoi_hw,mean_bandwidth,max_scheduled,violations\n";
}

void write_metrics_csv_row(std::ostream& os, int replication, const SimMetrics& m) {
    os << replication << ',' << m.seed << ',' << m.measured_slots << ',' << fmt(m.avg_aoi) << ','
       << fmt(m.avg_aoi_half_width) << ',' << fmt(m.mean_bandwidth) << ',' << m.max_scheduled << ','
       << m.bandwidth_violations << '\n';
}

json metrics_to_json(const SimMetrics& m) {
    json hist = json::array();
    for (std::size_t n = 0; n < m.aoi_histogram.size(); ++n) {
        const auto& h = m.aoi_histogram[n];
        std::size_t last = h.size();
        while (last > 0 && h[last - 1] == 0) --last;
        hist.push_back({{"counts", std::vector<std::uint64_t>(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(last))},
                        {"overflow", m.aoi_overflow[n]}});
    }
    return {{"seed", m.seed},
            {"measured_slots", m.measured_slots},
            {"avg_aoi", m.avg_aoi},
            {"avg_aoi_half_width", m.avg_aoi_half_width},
            {"per_sensor_aoi", m.per_sensor_aoi},
            {"per_sensor_power", m.per_sensor_power},
            {"per_sensor_power_se", m.per_sensor_power_se},
            {"per_sensor_sched", m.per_sensor_sched},
            {"bandwidth_histogram", m.bandwidth_histogram},
            {"mean_bandwidth", m.mean_bandwidth},
            {"bandwidth_violations", m.bandwidth_violations},
            {"max_scheduled", m.max_scheduled},
            {"aoi_histogram", hist}};
}

}  // namespace aoi
