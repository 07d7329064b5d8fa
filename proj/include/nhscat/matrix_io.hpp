// Plain-text complex matrix dump: a "rows cols" header line,
// then one line per row of space-separated "re,im" pairs (17 significant digits).

#pragma once

#include "nhscat/lattice.hpp"

#include <iosfwd>

namespace nhscat {

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

}  // namespace nhscat
