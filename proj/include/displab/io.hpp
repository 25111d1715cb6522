#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "displab/field.hpp"
#include "displab/gsa.hpp"
#include "displab/problems.hpp"

namespace displab {

/// Shortest decimal that reads back to the same double; "nan" for NaN and
/// "inf" / "-inf" for infinities.
std::string format_double(double v);

/// Header: nc,kh,gmag,phase_ratio,vg_ratio,singular (1D) or
/// kxhx,kyhy,gmag,phase_ratio,vgx_ratio,vgy_ratio,singular (2D).
std::string map_csv(const PropertyMap& map);

/// Header: x,u (1D) or x,y,u (2D); one row per stored sample.
std::string field_csv(const SolutionField& field);

/// Header: N,linf_error,rate; the rate of the first row is empty.
std::string table_csv(const std::vector<ErrorReport>& rows);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace displab
