#pragma once

#include <string>

#include "json.hpp"

#include "degen/classify.hpp"
#include "degen/decompose.hpp"
#include "degen/evolve.hpp"
#include "degen/krein.hpp"
#include "degen/mesh.hpp"
#include "degen/shoot.hpp"

namespace degen {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "degen.report/1";
inline constexpr const char* kVersion = "0.1.0";

/// Numbers that JSON cannot carry (±inf, NaN) become strings.
Json number(double v);

Json to_json(const HarmonicProfile& h);
Json to_json(const ClassificationReport& r);
Json to_json(const Mesh& m);
Json to_json(const DeficiencyResult& d);
Json to_json(const EtaProperties& e);
Json to_json(const BlowupResult& b);
Json to_json(const SnapshotMetrics& m);
Json to_json(const Conservation& c);
Json to_json(const KreinDiagnostics& k);
Json to_json(const Decomposition& d);

/// UTC time as an ISO 8601 string.
std::string timestamp_now();

}  // namespace degen
