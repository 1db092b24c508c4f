#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

#include "pmf/bounds.hpp"
#include "pmf/constants.hpp"
#include "pmf/harness.hpp"

namespace pmf {

// 12 significant digits, %g style.
std::string format_double(double v);
// v rounded to 12 significant digits, so JSON dumps are stable.
double round12(double v);

// Columns: t (1-based), I, J, s (0-based indices), reward.
inline constexpr const char* kTranscriptCsvHeader = "t,I,J,s,reward";
void write_transcript_csv(const Transcript& transcript, std::ostream& out);

nlohmann::json to_json(const GameConstants& c);
nlohmann::json to_json(const ForecasterParams& p);
nlohmann::json to_json(const BoundReport& b);
nlohmann::json to_json(const RegretReport& r);
nlohmann::json to_json(const EstimatorDiagnostics& d);
nlohmann::json to_json(const RateReport& r);
// Metadata sidecar of a transcript (no per-round data).
nlohmann::json transcript_metadata(const Transcript& t);

// Pretty-printed with 2-space indent and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace pmf
