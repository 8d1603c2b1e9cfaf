#include "rmdp/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rmdp::io {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

long parse_long(const std::string& text, const std::string& what) {
    long value = 0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error("cannot parse " + what + ": '" + text + "'");
    return value;
}

prec_t parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const prec_t value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + ": '" + text + "'");
    }
}

}  // namespace

std::string format_number(prec_t value) {
    char buffer[64];
    const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, res.ptr);
}

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
    return nlohmann::json{{"num_states", mdp.num_states},
                          {"num_actions", mdp.num_actions},
                          {"discount", mdp.discount},
                          {"rewards", mdp.rewards},
                          {"transitions", mdp.transitions},
                          {"initial_dist", mdp.initial_dist}};
}

TabularMdp mdp_from_json(const nlohmann::json& j) {
    TabularMdp mdp;
    try {
        mdp.num_states = j.at("num_states").get<long>();
        mdp.num_actions = j.at("num_actions").get<long>();
        mdp.discount = j.at("discount").get<prec_t>();
        mdp.rewards = j.at("rewards").get<std::vector<numvec>>();
        mdp.transitions = j.at("transitions").get<std::vector<std::vector<numvec>>>();
        mdp.initial_dist = j.at("initial_dist").get<numvec>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("mdp json: ") + e.what());
    }
    mdp.validate();
    return mdp;
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
    open_output(path) << mdp_to_json(mdp).dump(2) << '\n';
}

TabularMdp load_mdp(const std::string& path) {
    nlohmann::json j;
    try {
        open_input(path) >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return mdp_from_json(j);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "s,a,sprime\n";
    for (const TransitionSample& t : dataset.samples)
        out << t.s << ',' << t.a << ',' << t.sprime << '\n';
}

Dataset load_dataset(const std::string& path, long num_states, long num_actions) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "s,a,sprime")
        throw std::runtime_error(path + ": expected header 's,a,sprime'");
    std::vector<TransitionSample> samples;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 fields");
        samples.push_back({parse_long(fields[0], "s"), parse_long(fields[1], "a"),
                           parse_long(fields[2], "sprime")});
    }
    return Dataset::from_samples(std::move(samples), num_states, num_actions);
}

Dataset load_dataset(const std::string& path) {
    // first pass to size the index space
    std::ifstream in = open_input(path);
    std::string line;
    std::getline(in, line);
    long max_state = 0, max_action = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) continue;
        max_state = std::max({max_state, parse_long(fields[0], "s"),
                              parse_long(fields[2], "sprime")});
        max_action = std::max(max_action, parse_long(fields[1], "a"));
    }
    return load_dataset(path, max_state + 1, max_action + 1);
}

nlohmann::json ambiguity_to_json(const AmbiguitySet& sets) {
    nlohmann::json j{{"nominal", sets.nominal}, {"psi", sets.psi}};
    if (sets.has_support()) {
        std::vector<std::vector<std::vector<bool>>> mask(sets.num_states);
        for (long s = 0; s < sets.num_states; ++s) {
            mask[s].resize(sets.num_actions);
            for (long a = 0; a < sets.num_actions; ++a)
                mask[s][a].assign(sets.support[s][a].begin(),
                                  sets.support[s][a].end());
        }
        j["support_mask"] = mask;
    }
    return j;
}

AmbiguitySet ambiguity_from_json(const nlohmann::json& j) {
    try {
        auto nominal = j.at("nominal").get<std::vector<std::vector<numvec>>>();
        auto psi = j.at("psi").get<std::vector<numvec>>();
        std::vector<std::vector<supportvec>> support;
        if (j.contains("support_mask")) {
            const auto mask =
                j.at("support_mask")
                    .get<std::vector<std::vector<std::vector<bool>>>>();
            support.resize(mask.size());
            for (std::size_t s = 0; s < mask.size(); ++s) {
                support[s].resize(mask[s].size());
                for (std::size_t a = 0; a < mask[s].size(); ++a)
                    support[s][a].assign(mask[s][a].begin(), mask[s][a].end());
            }
        }
        return AmbiguitySet::create(std::move(nominal), std::move(psi),
                                    std::move(support));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("ambiguity json: ") + e.what());
    }
}

nlohmann::json diagnostics_to_json(const RsvfDiagnostics& diagnostics) {
    std::vector<std::pair<long, long>> fallback;
    for (long s = 0; s < long(diagnostics.fallback_pairs.size()); ++s)
        for (long a = 0; a < long(diagnostics.fallback_pairs[s].size()); ++a)
            if (diagnostics.fallback_pairs[s][a]) fallback.emplace_back(s, a);
    return nlohmann::json{{"iterations", diagnostics.iterations},
                          {"terminated", diagnostics.terminated},
                          {"fallback_used", diagnostics.fallback_used},
                          {"objective_trace", diagnostics.objective_trace},
                          {"psi", diagnostics.psi},
                          {"theta", diagnostics.theta},
                          {"termination_status", diagnostics.termination_status},
                          {"fallback_pairs", fallback}};
}

void save_posterior_samples(const PosteriorSamples& samples,
                            const std::string& path) {
    samples.validate();
    std::ofstream out = open_output(path);
    out << "s,a,sample_index";
    for (long sp = 0; sp < samples.num_states; ++sp) out << ",p" << sp;
    out << '\n';
    for (long s = 0; s < samples.num_states; ++s) {
        for (long a = 0; a < samples.num_actions; ++a) {
            const auto& rows = samples.at(s, a);
            for (long i = 0; i < samples.num_samples; ++i) {
                out << s << ',' << a << ',' << i;
                for (prec_t p : rows[i]) out << ',' << format_number(p);
                out << '\n';
            }
        }
    }
}

PosteriorSamples ingest_posterior_samples(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty posterior sample file");
    const auto header = split_csv_line(strip_cr(line));
    if (header.size() < 4 || header[0] != "s" || header[1] != "a" ||
        header[2] != "sample_index")
        throw std::runtime_error(path + ": expected header s,a,sample_index,p0,...");
    const long dim = long(header.size()) - 3;
    for (long i = 0; i < dim; ++i)
        if (header[3 + i] != "p" + std::to_string(i))
            throw std::runtime_error(path + ": malformed probability columns");

    std::map<std::pair<long, long>, std::map<long, numvec>> table;
    long max_action = 0;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (long(fields.size()) != 3 + dim)
            throw std::runtime_error(where + ": wrong field count");
        const long s = parse_long(fields[0], "s");
        const long a = parse_long(fields[1], "a");
        const long index = parse_long(fields[2], "sample_index");
        if (s < 0 || s >= dim || a < 0 || index < 0)
            throw std::runtime_error(where + ": index out of range");
        max_action = std::max(max_action, a);
        numvec row(dim);
        for (long i = 0; i < dim; ++i)
            row[i] = parse_double(fields[3 + i], "p" + std::to_string(i));
        if (!is_probability_vector(row, 1e-6))
            throw std::runtime_error(where + ": row is off the simplex by more "
                                             "than 1e-6; bad external sampler?");
        if (!table[{s, a}].emplace(index, std::move(row)).second)
            throw std::runtime_error(where + ": duplicate sample_index");
    }
    if (table.empty()) throw std::runtime_error(path + ": no sample rows");

    const long num_actions = max_action + 1;
    const long m = long(table.begin()->second.size());
    PosteriorSamples samples = PosteriorSamples::allocate(dim, num_actions, m);
    for (long s = 0; s < dim; ++s) {
        for (long a = 0; a < num_actions; ++a) {
            const auto it = table.find({s, a});
            if (it == table.end() || long(it->second.size()) != m)
                throw std::runtime_error(
                    path + ": pair (" + std::to_string(s) + "," +
                    std::to_string(a) + ") has an inconsistent sample count");
            auto& rows = samples.at(s, a);
            rows.reserve(m);
            for (auto& [index, row] : it->second) {
                if (index >= m)
                    throw std::runtime_error(path + ": sample_index gap at pair (" +
                                             std::to_string(s) + "," +
                                             std::to_string(a) + ")");
                rows.push_back(std::move(row));
            }
        }
    }
    samples.validate(1e-6);
    return samples;
}

void write_replication_csv(const std::vector<ReplicationRow>& rows,
                           std::ostream& out) {
    out << "method,sample_size,replication,seed,safe_return,true_return,"
           "true_opt,regret,violation\n";
    for (const ReplicationRow& r : rows) {
        out << to_string(r.method) << ',' << r.sample_size << ',' << r.replication
            << ',' << r.seed << ',' << format_number(r.safe_return) << ','
            << format_number(r.true_return) << ',' << format_number(r.true_opt)
            << ',' << format_number(r.regret) << ',' << (r.violation ? 1 : 0)
            << '\n';
    }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << "method,sample_size,count,mean_regret,violation_rate,wilson_low,"
           "wilson_high\n";
    for (const AggregateRow& r : rows) {
        out << to_string(r.method) << ',' << r.sample_size << ',' << r.count << ','
            << format_number(r.mean_regret) << ','
            << format_number(r.violation_rate) << ','
            << format_number(r.wilson_low) << ',' << format_number(r.wilson_high)
            << '\n';
    }
}

void save_replication_csv(const std::vector<ReplicationRow>& rows,
                          const std::string& path) {
    std::ofstream out = open_output(path);
    write_replication_csv(rows, out);
}

void save_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::string& path) {
    std::ofstream out = open_output(path);
    write_aggregate_csv(rows, out);
}

}  // namespace rmdp::io
