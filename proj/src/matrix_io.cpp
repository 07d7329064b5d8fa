#include "nhscat/matrix_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace nhscat {

void write_matrix(std::ostream& os, const Matrix& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j).real() << ',' << m(i, j).imag();
        }
        os << '\n';
    }
}

Matrix read_matrix(std::istream& is) {
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw std::runtime_error("matrix header: expected 'rows cols'");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::string tok;
            if (!(is >> tok)) throw std::runtime_error("matrix body truncated");
            const auto comma = tok.find(',');
            if (comma == std::string::npos) throw std::runtime_error("matrix entry '" + tok + "' is not 're,im'");
            std::size_t used_re = 0, used_im = 0;
            const std::string re = tok.substr(0, comma), im = tok.substr(comma + 1);
            double vr = std::stod(re, &used_re);
            double vi = std::stod(im, &used_im);
            if (used_re != re.size() || used_im != im.size()) throw std::runtime_error("bad matrix entry '" + tok + "'");
            m(i, j) = cplx(vr, vi);
        }
    }
    return m;
}

}  // namespace nhscat
