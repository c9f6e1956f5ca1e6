#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/montecarlo.hpp"

namespace herdsim {

inline std::string to_string(Rule r) {
    switch (r) {
        case Rule::Consensus: return "consensus";
        case Rule::RandomInteractions: return "random_interactions";
        case Rule::BoundedConfidence: return "bounded_confidence";
        case Rule::Reinforcement: return "reinforcement";
    }
    throw ValidationError("unknown rule");
}

inline Rule rule_from_string(const std::string& s) {
    if (s == "consensus") return Rule::Consensus;
    if (s == "random_interactions") return Rule::RandomInteractions;
    if (s == "bounded_confidence") return Rule::BoundedConfidence;
    if (s == "reinforcement") return Rule::Reinforcement;
    throw ValidationError("rule: unknown value '" + s + "'");
}

inline std::string to_string(InteractionScheme s) {
    return s == InteractionScheme::PairwiseGossip ? "pairwise_gossip" : "edge_sampling";
}

inline InteractionScheme scheme_from_string(const std::string& s) {
    if (s == "pairwise_gossip") return InteractionScheme::PairwiseGossip;
    if (s == "edge_sampling") return InteractionScheme::EdgeSampling;
    throw ValidationError("scheme: unknown value '" + s + "'");
}

inline std::string to_string(PairSelection p) {
    return p == PairSelection::WeightProportional ? "weight_proportional"
                                                  : "uniform_neighbors";
}

inline PairSelection pair_selection_from_string(const std::string& s) {
    if (s == "weight_proportional") return PairSelection::WeightProportional;
    if (s == "uniform_neighbors") return PairSelection::UniformNeighbors;
    throw ValidationError("pair_selection: unknown value '" + s + "'");
}

inline std::string to_string(InitMode m) {
    switch (m) {
        case InitMode::Constant: return "constant";
        case InitMode::IidUniformMean: return "iid_uniform_mean";
        case InitMode::Explicit: return "explicit";
    }
    throw ValidationError("unknown init mode");
}

inline InitMode init_mode_from_string(const std::string& s) {
    if (s == "constant") return InitMode::Constant;
    if (s == "iid_uniform_mean") return InitMode::IidUniformMean;
    if (s == "explicit") return InitMode::Explicit;
    throw ValidationError("init: unknown value '" + s + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

inline std::string line_msg(int line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

inline double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    const double value = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ParseError(line_msg(line, "expected a number, got '" + v + "'"));
    return value;
}

inline std::uint64_t parse_count(const std::string& v, int line) {
    if (v.empty() || v[0] == '-' || v[0] == '+')
        throw ParseError(line_msg(line, "expected a nonnegative integer, got '" + v + "'"));
    char* end = nullptr;
    const std::uint64_t value = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size())
        throw ParseError(line_msg(line, "expected a nonnegative integer, got '" + v + "'"));
    return value;
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError(line_msg(line, "expected true or false, got '" + v + "'"));
}

inline std::vector<double> parse_double_list(const std::string& v, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ','))
        out.push_back(parse_double(trim(item), line));
    if (out.empty()) throw ParseError(line_msg(line, "expected a number list"));
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

} // namespace detail

// Graph generator spec: er:<n>:<p>, ring:<n>:<k>, or complete:<n>.
inline std::pair<std::size_t, GraphModel> parse_graph_model(const std::string& spec) {
    const auto parts = detail::split(spec, ':');
    const auto count_at = [&](std::size_t i) {
        return static_cast<std::size_t>(detail::parse_count(parts[i], 0));
    };
    if (parts.empty()) throw ValidationError("graph.model: empty spec");
    const std::string& name = parts[0];
    if ((name == "er" || name == "erdos_renyi") && parts.size() == 3)
        return {count_at(1), GraphModel::erdos_renyi(detail::parse_double(parts[2], 0))};
    if (name == "ring" && parts.size() == 3)
        return {count_at(1), GraphModel::ring(static_cast<int>(count_at(2)))};
    if (name == "complete" && parts.size() == 2)
        return {count_at(1), GraphModel::complete()};
    throw ValidationError("graph.model: bad spec '" + spec +
                          "' (want er:<n>:<p>, ring:<n>:<k>, or complete:<n>)");
}

inline std::string format_graph_model(std::size_t n, const GraphModel& m);

// Everything a config file can say: the experiment itself plus CLI-level
// output switches.
struct ConfigDocument {
    ExperimentConfig experiment;
    bool record_trajectory = false;

    bool operator==(const ConfigDocument&) const = default;
};

// Flat key=value format, one pair per line, '#' comments. Unknown keys are
// rejected. Defaults: epsilon 1e-6, max_steps 10^6, sample_every 100,
// init constant(0.5), seed 0.
inline ConfigDocument parse_config_text(const std::string& text) {
    ConfigDocument doc;
    ExperimentConfig& cfg = doc.experiment;

    bool have_graph_file = false;
    bool have_graph_model = false;
    bool have_rule = false;
    std::uint64_t graph_seed = 1;
    bool have_graph_seed = false;
    std::vector<double> x0;
    bool have_x0 = false;
    bool have_p0 = false;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string stripped = detail::trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError(detail::line_msg(line, "expected key = value"));
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty()) throw ParseError(detail::line_msg(line, "missing key"));
        if (value.empty())
            throw ParseError(detail::line_msg(line, "missing value for '" + key + "'"));

        if (key == "graph.file") {
            cfg.graph = GraphSource::from_file(value);
            have_graph_file = true;
        } else if (key == "graph.model") {
            const auto [n, model] = parse_graph_model(value);
            cfg.graph.source_kind = GraphSourceKind::Generated;
            cfg.graph.n = n;
            cfg.graph.model = model;
            have_graph_model = true;
        } else if (key == "graph.seed") {
            graph_seed = detail::parse_count(value, line);
            have_graph_seed = true;
        } else if (key == "rule") {
            cfg.dynamics.rule = rule_from_string(value);
            have_rule = true;
        } else if (key == "alpha") {
            cfg.dynamics.alpha = detail::parse_double_list(value, line);
        } else if (key == "tau") {
            cfg.dynamics.tau = detail::parse_double(value, line);
        } else if (key == "scheme") {
            cfg.dynamics.scheme = scheme_from_string(value);
        } else if (key == "edge_keep_p") {
            cfg.dynamics.edge_keep_p = detail::parse_double(value, line);
        } else if (key == "frozen_bystanders") {
            cfg.dynamics.frozen_bystanders = detail::parse_bool(value, line);
        } else if (key == "pair_selection") {
            cfg.dynamics.pair_selection = pair_selection_from_string(value);
        } else if (key == "init") {
            cfg.init.mode = init_mode_from_string(value);
        } else if (key == "p0") {
            cfg.init.p0 = detail::parse_double(value, line);
            have_p0 = true;
        } else if (key == "x0") {
            x0 = detail::parse_double_list(value, line);
            have_x0 = true;
        } else if (key == "trials") {
            cfg.trials = detail::parse_count(value, line);
        } else if (key == "max_steps") {
            cfg.max_steps = detail::parse_count(value, line);
        } else if (key == "epsilon") {
            cfg.epsilon = detail::parse_double(value, line);
        } else if (key == "seed") {
            cfg.master_seed = detail::parse_count(value, line);
        } else if (key == "sample_every") {
            cfg.sample_every = detail::parse_count(value, line);
        } else if (key == "record_trajectory") {
            doc.record_trajectory = detail::parse_bool(value, line);
        } else {
            throw UnknownKeyError(detail::line_msg(line, "unknown key '" + key + "'"));
        }
    }

    if (have_graph_file && (have_graph_model || have_graph_seed))
        throw ValidationError("graph.file excludes graph.model and graph.seed");
    if (!have_graph_file && !have_graph_model)
        throw ValidationError("config needs graph.file or graph.model");
    if (have_graph_model) cfg.graph.seed = graph_seed;
    if (!have_rule) throw ValidationError("config needs a rule");

    if (cfg.init.mode == InitMode::Explicit) {
        if (!have_x0) throw ValidationError("init explicit needs x0");
        if (have_p0) throw ValidationError("p0 requires a non-explicit init");
        cfg.init.p0 = 0.0;
        cfg.init.values = std::move(x0);
        for (const double v : cfg.init.values)
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("x0 value outside [0,1]");
    } else {
        if (have_x0) throw ValidationError("x0 requires init = explicit");
        if (!(cfg.init.p0 >= 0.0 && cfg.init.p0 <= 1.0))
            throw ValidationError("p0 outside [0,1]");
    }

    cfg.validate();
    cfg.dynamics.validate(static_cast<int>(cfg.dynamics.alpha.size()));
    return doc;
}

inline ConfigDocument parse_config_document(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

inline ExperimentConfig parse_config(const std::string& path) {
    return parse_config_document(path).experiment;
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string join_g17(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += format_g17(vs[i]);
    }
    return out;
}

} // namespace detail

inline std::string format_graph_model(std::size_t n, const GraphModel& m) {
    switch (m.type) {
        case GraphModel::Type::ErdosRenyi:
            return "er:" + std::to_string(n) + ":" + detail::format_g17(m.p);
        case GraphModel::Type::Ring:
            return "ring:" + std::to_string(n) + ":" + std::to_string(m.k);
        case GraphModel::Type::Complete:
            return "complete:" + std::to_string(n);
    }
    throw ValidationError("unknown graph model");
}

// Canonical round-trippable echo of a parsed config: emits every field, so
// parse_config_text(serialize_config(doc)) == doc.
inline std::string serialize_config(const ConfigDocument& doc) {
    const ExperimentConfig& cfg = doc.experiment;
    std::ostringstream out;
    if (cfg.graph.source_kind == GraphSourceKind::File) {
        out << "graph.file = " << cfg.graph.path << "\n";
    } else {
        out << "graph.model = " << format_graph_model(cfg.graph.n, cfg.graph.model)
            << "\n";
        out << "graph.seed = " << cfg.graph.seed << "\n";
    }
    out << "rule = " << to_string(cfg.dynamics.rule) << "\n";
    out << "alpha = " << detail::join_g17(cfg.dynamics.alpha) << "\n";
    out << "tau = " << detail::format_g17(cfg.dynamics.tau) << "\n";
    out << "scheme = " << to_string(cfg.dynamics.scheme) << "\n";
    out << "edge_keep_p = " << detail::format_g17(cfg.dynamics.edge_keep_p) << "\n";
    out << "frozen_bystanders = " << (cfg.dynamics.frozen_bystanders ? "true" : "false")
        << "\n";
    out << "pair_selection = " << to_string(cfg.dynamics.pair_selection) << "\n";
    out << "init = " << to_string(cfg.init.mode) << "\n";
    if (cfg.init.mode == InitMode::Explicit)
        out << "x0 = " << detail::join_g17(cfg.init.values) << "\n";
    else
        out << "p0 = " << detail::format_g17(cfg.init.p0) << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "max_steps = " << cfg.max_steps << "\n";
    out << "epsilon = " << detail::format_g17(cfg.epsilon) << "\n";
    out << "seed = " << cfg.master_seed << "\n";
    out << "sample_every = " << cfg.sample_every << "\n";
    out << "record_trajectory = " << (doc.record_trajectory ? "true" : "false") << "\n";
    return out.str();
}

} // namespace herdsim
