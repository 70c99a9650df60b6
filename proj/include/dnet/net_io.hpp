#pragma once

// Text formats.
//
// Net file: '#' starts a comment. Header "b s n m", then m blocks of s lines
// with n digits each; the first digit of a line is the b^-1 digit.
//
// Generator-matrix file (external convention): same header, then s blocks of
// n lines with m digits each. Block i is the n x m generator matrix C_i of
// coordinate i; line j holds digit j+1 and column k belongs to generator k,
// so point number sum_k c_k b^k has coordinate-i digits C_i c.

#include <iosfwd>
#include <optional>
#include <string>

#include "dnet/net.hpp"

namespace dnet {

DigitalNet read_net(std::istream& in);
DigitalNet read_net_file(const std::string& path);
void write_net(std::ostream& out, const DigitalNet& net, const std::string& comment = {});
void write_net_file(const std::string& path, const DigitalNet& net, const std::string& comment = {});

// Reads a generator-matrix file and converts it to a net. `keep_m` keeps the
// first columns only (the first b^keep_m points); `keep_n` keeps the leading
// digit rows.
DigitalNet ingest_generator_matrices(std::istream& in, std::optional<int> keep_m = std::nullopt,
                                     std::optional<int> keep_n = std::nullopt);
DigitalNet ingest_generator_file(const std::string& path, std::optional<int> keep_m = std::nullopt,
                                 std::optional<int> keep_n = std::nullopt);

// Inverse of the adapter: writes the net in the generator-matrix convention.
void write_generator_matrices(std::ostream& out, const DigitalNet& net);

}  // namespace dnet
