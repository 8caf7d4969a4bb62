#include "dsp/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dsp {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("matrix market: empty stream");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix")
        throw IoError("matrix market: bad banner: " + line);
    if (lower(format) != "coordinate")
        throw IoError("matrix market: only coordinate format is supported");
    if (lower(field) != "real" && lower(field) != "integer")
        throw IoError("matrix market: only real-valued matrices are supported");
    const std::string sym = lower(symmetry);
    if (sym != "general" && sym != "symmetric")
        throw IoError("matrix market: unsupported symmetry '" + symmetry + "'");

    // skip comments / blank lines
    index_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sizes(line);
        if (!(sizes >> rows >> cols >> nnz)) throw IoError("matrix market: bad size line");
        break;
    }

    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(sym == "symmetric" ? 2 * nnz : nnz));
    index_t seen = 0;
    while (seen < nnz && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream entry(line);
        index_t i, j;
        double v;
        if (!(entry >> i >> j >> v)) throw IoError("matrix market: malformed entry line");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw IoError("matrix market: entry index out of range");
        ts.push_back({i - 1, j - 1, v});
        if (sym == "symmetric" && i != j) ts.push_back({j - 1, i - 1, v});
        ++seen;
    }
    if (seen < nnz) throw IoError("matrix market: truncated entry list");
    return SparseMatrix::from_triplets(rows, cols, std::move(ts));
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m, MmSymmetry sym) {
    out << "%%MatrixMarket matrix coordinate real "
        << (sym == MmSymmetry::symmetric ? "symmetric" : "general") << "\n";
    out.precision(17);
    if (sym == MmSymmetry::general) {
        out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
        for (index_t i = 0; i < m.rows(); ++i)
            for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
                 k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
                out << i + 1 << " " << m.col_idx()[static_cast<std::size_t>(k)] + 1 << " "
                    << m.values()[static_cast<std::size_t>(k)] << "\n";
        return;
    }
    if (m.rows() != m.cols())
        throw IoError("matrix market: symmetric output requires a square matrix");
    index_t lower_nnz = 0;
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
             k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            if (m.col_idx()[static_cast<std::size_t>(k)] <= i) ++lower_nnz;
    out << m.rows() << " " << m.cols() << " " << lower_nnz << "\n";
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
             k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = m.col_idx()[static_cast<std::size_t>(k)];
            if (j <= i)
                out << i + 1 << " " << j + 1 << " "
                    << m.values()[static_cast<std::size_t>(k)] << "\n";
        }
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& m,
                              MmSymmetry sym) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_matrix_market(out, m, sym);
    if (!out) throw IoError("write failed for '" + path + "'");
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Vector v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof()) throw IoError("malformed vector file '" + path + "'");
    return v;
}

void write_vector_file(const std::string& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.precision(17);
    for (double x : v) out << x << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_vector_csv(const std::string& path, const Vector& v,
                      const std::string& value_header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.precision(17);
    out << "index," << value_header << "\n";
    for (std::size_t i = 0; i < v.size(); ++i) out << i << "," << v[i] << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace dsp
