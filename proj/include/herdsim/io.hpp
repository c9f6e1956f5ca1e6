#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "herdsim/analysis.hpp"
#include "herdsim/config.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/montecarlo.hpp"

namespace herdsim {

// RFC 4180: quote a field when it contains a comma, quote, or newline;
// embedded quotes are doubled.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string trial_class_label(const TrialOutcome& t) {
    return t.failed ? "failed" : to_string(t.cls);
}

inline void write_trials_csv(std::ostream& out, std::span<const TrialOutcome> trials) {
    out << "trial_id,seed,class,steps,q0,q_final\n";
    for (const auto& t : trials) {
        out << t.trial_id << ',' << t.seed << ',' << csv_field(trial_class_label(t))
            << ',' << t.steps_to_resolution << ',' << detail::format_g17(t.q0) << ','
            << detail::format_g17(t.q_final) << '\n';
    }
}

inline std::string trials_csv_string(std::span<const TrialOutcome> trials) {
    std::ostringstream out;
    write_trials_csv(out, trials);
    return out.str();
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "p0,mean_final,var_final,herd1_freq,ci\n";
    for (const auto& r : rows) {
        out << detail::format_g17(r.p0) << ',' << detail::format_g17(r.mean_final)
            << ',' << detail::format_g17(r.var_final) << ','
            << detail::format_g17(r.herd1_freq) << ','
            << detail::format_g17(r.ci_halfwidth) << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 std::uint64_t trial_id) {
    out << "trial_id,t,agent,x\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        for (std::size_t agent = 0; agent < traj.states[i].size(); ++agent)
            out << trial_id << ',' << traj.times[i] << ',' << agent << ','
                << detail::format_g17(traj.states[i][agent]) << '\n';
}

// FNV-1a over the canonical config text; stable across platforms.
inline std::string config_digest(const std::string& canonical) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::ordered_json summary_to_json(const ExperimentSummary& s,
                                              std::uint64_t trials,
                                              const std::string& digest) {
    nlohmann::ordered_json j;
    j["herd1_freq"] = s.herd1_freq;
    j["ci_halfwidth"] = s.ci_halfwidth;
    j["mean_final_belief"] = s.mean_final_belief;
    j["var_final_belief"] = s.var_final_belief;
    j["mean_q0"] = s.mean_q0;
    j["unresolved_count"] = s.unresolved_count;
    j["failed_count"] = s.failed_count;
    j["trials"] = trials;
    j["config_digest"] = digest;
    return j;
}

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json manifest_json(const ConfigDocument& doc,
                                            const std::string& version,
                                            const std::string& started,
                                            const std::string& finished,
                                            const std::vector<std::string>& outputs) {
    const std::string canonical = serialize_config(doc);
    nlohmann::ordered_json j;
    j["version"] = version;
    j["master_seed"] = doc.experiment.master_seed;
    j["config"] = canonical;
    j["config_digest"] = config_digest(canonical);
    j["started"] = started;
    j["finished"] = finished;
    j["outputs"] = outputs;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw ValidationError("write to '" + path + "' failed");
}

} // namespace herdsim
