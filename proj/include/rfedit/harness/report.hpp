#pragma once

#include <string>
#include <vector>

#include "rfedit/harness/experiment.hpp"

namespace rfedit::harness {

/// runs.csv columns, in order:
///   fingerprint,label,sample,seed,mse,psnr,consistency,alignment,roundtrip,nfe,expected_nfe,guidance_norms
/// Reals use %.17g; psnr of an exact reproduction is written "inf"; guidance_norms is a
/// ';'-separated list (empty for methods without guidance).
inline constexpr const char* runs_csv_header =
    "fingerprint,label,sample,seed,mse,psnr,consistency,alignment,roundtrip,nfe,expected_nfe,guidance_norms";

std::string rows_csv(const std::vector<RunRow>& rows);

/// Same data as rows_csv as a JSON array of objects; psnr +inf becomes the string "inf".
std::string rows_json(const std::vector<RunRow>& rows);

/// fingerprint,label,sample,wall_ms. Kept apart from runs.csv because wall time is not
/// reproducible.
std::string timing_csv(const std::vector<RunRow>& rows);

/// param,value,fingerprint,samples,mean_mse,mean_consistency,mean_alignment,mean_roundtrip,nfe
/// followed by one `# check <metric> <direction> <holds|VIOLATED>` line per direction check.
std::string sweep_csv(const SweepResult& sweep);

/// Writes `content` to dir/name, creating dir when needed.
void write_text(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace rfedit::harness
