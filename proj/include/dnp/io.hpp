#pragma once

#include <string>
#include <vector>

#include "dnp/diagnostics.hpp"
#include "dnp/scenario.hpp"
#include "dnp/stationary.hpp"
#include "json.hpp"

namespace dnp::io {

using Json = nlohmann::json;

/// Columns i,t,energy,phi,w_int,dissipation,newton_iters,residual,min_u,max_u,
/// sup_|du/dt|; %.17g, LF endings.
std::string ledger_csv(const std::vector<LedgerEntry>& ledger);
std::string snapshot_csv(const Grid& g, const Eigen::VectorXd& u);
std::string series_csv(const std::string& header, const std::vector<std::vector<double>>& cols);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
std::string file_sha256(const std::string& path);

/// Non-finite values become null so the manifest parses back.
Json number(double v);
/// dump(2) plus a trailing newline; parse + json_text reproduces the bytes.
std::string json_text(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const UniformBoundReport& r);
Json to_json(const SeparationReport& r);
Json to_json(const StationaryReport& r, bool with_state = false);
Json to_json(const OmegaReport& r);
Json to_json(const DecayFit& f);
Json to_json(const LojProbe& p);
Json to_json(const ContinuationReport& r);
Json to_json(const DependenceReport& r);
Json ledger_summary(const Trajectory& tr);

}  // namespace dnp::io
