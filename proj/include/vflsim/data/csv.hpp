#pragma once

#include <string>

#include "vflsim/data/dataset.hpp"

namespace vflsim {

// Reads a delimited text file against the schema.  Fields are trimmed of
// whitespace and surrounding double quotes.  Unknown categories, malformed
// numbers, out-of-range values and wrong field counts raise ConfigError
// naming the row and column.
RawDataset load_dataset(const std::string& path, const Schema& schema);

void write_dataset(const RawDataset& data, const std::string& path);

}  // namespace vflsim
