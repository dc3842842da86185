#include "imc/refcase.hpp"

namespace imc::refcase {

Eigen::Matrix2d published_P() {
    Eigen::Matrix2d p;
    p << 22.9454, 3.1623, //
        3.1623, 3.6280;
    return p;
}

Eigen::RowVector2d published_K() {
    Eigen::RowVector2d k;
    k << 18.9737, 21.7679;
    return k;
}

Graph fixture_graph() {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    b[0] = 2.0;
    return Graph::from_edges(4,
                             {{1, 2, 0.5}, {2, 3, 0.5}, {3, 4, 0.5}, {4, 1, 0.5}},
                             std::move(b));
}

} // namespace imc::refcase
