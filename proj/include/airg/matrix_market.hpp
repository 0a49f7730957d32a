#ifndef AIRG_MATRIX_MARKET_HPP
#define AIRG_MATRIX_MARKET_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "airg/sparse_matrix.hpp"

namespace airg {

class MatrixMarketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coordinate format only. Reading accepts real/integer values with general or
// symmetric storage (duplicates summed); writing always emits
// "coordinate real general" with 17 significant digits so values round-trip.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::string& path);

void write_matrix_market(std::ostream& out, const CsrMatrix& A);
void write_matrix_market(const std::string& path, const CsrMatrix& A);

} // namespace airg

#endif
