#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spillover/model.hpp"

namespace spillover {

// Long form, one row per focal unit: id, y, d, d1, r, n_i, optional a1,
// optional d_peer_1..K and a_peer_1..K (blank beyond n_i).
NetworkDataset read_network_csv(std::istream& in);
NetworkDataset read_network_csv_file(const std::string& path);

void write_network_csv(std::ostream& out, const NetworkDataset& data);
void write_network_csv_file(const std::string& path, const NetworkDataset& data);

// Minimal CSV row splitter (double quotes allowed around fields, no embedded newlines).
std::vector<std::string> split_csv_row(const std::string& line);

// Formats doubles with enough digits to round-trip.
std::string format_double(double v);

}  // namespace spillover
