#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "captive/captivity.hpp"
#include "captive/genericity.hpp"

namespace captive {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

Json words_json(const std::vector<Word>& words);
Json to_json(const CaptivityReport& report);
Json to_json(const FeketeRoots& roots);
Json to_json(const ProofConstants& constants);
Json to_json(const Witness& witness);
Json to_json(const ScanReport& report);
Json to_json(const JacSurvey& survey);

/// Columns: n,ncal,root,m,n_weighted,chi
inline constexpr const char* kCaptivityCsvHeader = "n,ncal,root,m,n_weighted,chi";
void write_csv(std::ostream& os, const CaptivityReport& report);

/// Columns: n,threshold,exceed,samples,fraction,std_error
inline constexpr const char* kScanCsvHeader = "n,threshold,exceed,samples,fraction,std_error";
void write_csv(std::ostream& os, const ScanReport& report);

/// Round-trip decimal formatting used in CSV output.
std::string format_number(double v);

}  // namespace captive
