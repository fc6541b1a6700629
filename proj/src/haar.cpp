#include "dqml/haar.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace dqml {

GateMatrix haar_unitary(int dimension, Rng& rng) {
    if (dimension < 2) throw std::invalid_argument("haar_unitary needs dimension >= 2");
    Eigen::MatrixXcd g(dimension, dimension);
    const double s = M_SQRT1_2;
    for (int r = 0; r < dimension; ++r) {
        for (int c = 0; c < dimension; ++c) {
            double re = rng.normal();
            double im = rng.normal();
            g(r, c) = cd{s * re, s * im};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dimension; ++c) {
        cd d = r(c, c);
        double m = std::abs(d);
        cd phase = (m > 0) ? d / m : cd{1, 0};
        q.col(c) *= phase;
    }
    GateMatrix out{dimension, std::vector<cd>(static_cast<std::size_t>(dimension) * dimension)};
    for (int rr = 0; rr < dimension; ++rr)
        for (int cc = 0; cc < dimension; ++cc) out.at(rr, cc) = q(rr, cc);
    return out;
}

}  // namespace dqml
