#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/experiments.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/posterior.hpp"
#include "rmdp/rsvf.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace rmdp::io {

/// Shortest decimal representation that round-trips back to the same
/// double; used for every number written to CSV or JSON output.
std::string format_number(prec_t value);

// --- MDP files: JSON ---------------------------------------------------
nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& j);
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

// --- Datasets: CSV with header s,a,sprime ------------------------------
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path, long num_states, long num_actions);
/// Dimensions inferred as the largest index plus one.
Dataset load_dataset(const std::string& path);

// --- Ambiguity sets: JSON ----------------------------------------------
nlohmann::json ambiguity_to_json(const AmbiguitySet& sets);
AmbiguitySet ambiguity_from_json(const nlohmann::json& j);

// --- Adapted-set solve diagnostics: JSON ---------------------------------
nlohmann::json diagnostics_to_json(const RsvfDiagnostics& diagnostics);

// --- Posterior samples: CSV with header s,a,sample_index,p0,p1,... -----
void save_posterior_samples(const PosteriorSamples& samples,
                            const std::string& path);
/// Loads and validates external posterior draws. Rows more than 1e-6 off
/// the simplex, uneven draw counts across pairs, or malformed rows are
/// rejected with a diagnostic.
PosteriorSamples ingest_posterior_samples(const std::string& path);

// --- Experiment results: CSV --------------------------------------------
void write_replication_csv(const std::vector<ReplicationRow>& rows,
                           std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void save_replication_csv(const std::vector<ReplicationRow>& rows,
                          const std::string& path);
void save_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::string& path);

}  // namespace rmdp::io
