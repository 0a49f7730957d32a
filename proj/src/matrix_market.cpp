#include "airg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace airg {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw MatrixMarketError("empty Matrix Market stream");

    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") throw MatrixMarketError("missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate")
        throw MatrixMarketError("only 'matrix coordinate' files are supported");
    if (field != "real" && field != "integer" && field != "double")
        throw MatrixMarketError("unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw MatrixMarketError("unsupported symmetry '" + symmetry + "'");
    const bool symmetric = symmetry == "symmetric";

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    long long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            throw MatrixMarketError("malformed size line: '" + line + "'");
    }

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    for (long long k = 0; k < entries; ++k) {
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v))
            throw MatrixMarketError("expected " + std::to_string(entries) + " entries, read " +
                                    std::to_string(k));
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw MatrixMarketError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") out of range");
        trips.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) trips.push_back({j - 1, i - 1, v});
    }
    return from_triplets(rows, cols, std::move(trips));
}

CsrMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open '" + path + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& A) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.nrows << ' ' << A.ncols << ' ' << A.nnz() << '\n';
    char buf[64];
    for (index_t i = 0; i < A.nrows; ++i) {
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", A.values[k]);
            out << i + 1 << ' ' << A.col_indices[k] + 1 << ' ' << buf << '\n';
        }
    }
}

void write_matrix_market(const std::string& path, const CsrMatrix& A) {
    std::ofstream out(path);
    if (!out) throw MatrixMarketError("cannot write '" + path + "'");
    write_matrix_market(out, A);
    if (!out) throw MatrixMarketError("write failed for '" + path + "'");
}

} // namespace airg
