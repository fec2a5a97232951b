#pragma once

// Serialization: matrices as nested [re, im] arrays, statistics as CSV with
// 17 significant digits, and schema-tagged JSON reports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergodix/compactness.hpp"
#include "ergodix/lattice.hpp"
#include "ergodix/mixing.hpp"
#include "ergodix/operator.hpp"
#include "ergodix/spectral.hpp"
#include "ergodix/vdc.hpp"

namespace ergodix {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "ergodix/1";

/// "%.17g"; round-trips every finite double.
std::string format_double(double x);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json element_to_json(const GroupElement& g);
GroupElement element_from_json(const Json& j, std::size_t q);

/// Header "n,window_size,value".
std::string statistic_csv(const std::vector<StatisticPoint>& points);
/// Arbitrary columns; doubles rendered with format_double.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// A JSON object that starts with "schema": "ergodix/1".
Json report_object();
Json to_json(const MixingStatistic& s);
Json to_json(const VdcReport& r);
Json to_json(const EpsilonNetCertificate& c);
Json to_json(const ReturnSet& r);
Json to_json(const CompactSzemerediReport& r);
Json to_json(const DichotomyVerdict& v);
Json to_json(const SzemerediDriverReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ergodix
