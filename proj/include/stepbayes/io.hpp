#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "stepbayes/model.hpp"

namespace stepbayes {

/// CSV with header "x,y"; lines starting with '#' are skipped.
/// Throws ParseError naming the offending line.
DataSet read_dataset(std::istream& in);
DataSet load_dataset(const std::filesystem::path& path);
/// 17 significant digits, so reloading reproduces every double exactly.
void write_dataset(std::ostream& out, const DataSet& data);
void save_dataset(const DataSet& data, const std::filesystem::path& path);

/// {"breakpoints":[..],"levels":[..]} or {"grid":[..]}.
RegressionFunction parse_function_json(std::string_view text);
RegressionFunction load_function(const std::filesystem::path& path);
void write_function_json(std::ostream& out, const RegressionFunction& f);

/// "const:P", "step:u1,u2;w0,w1,w2", or a path to a JSON function file.
RegressionFunction parse_truth(std::string_view spec);

}  // namespace stepbayes
