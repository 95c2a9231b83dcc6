#include "bvx/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <stdexcept>

namespace bvx {
namespace {

template <unsigned N>
GaussRule expand() {
    using Rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    GaussRule r;
    // Boost stores the non-negative half; index 0 is the center node when N is odd.
    for (std::size_t i = x.size(); i-- > 0;) {
        if (x[i] == 0.0) continue;
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.nodes.push_back(x[i]);
        r.weights.push_back(w[i]);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
    static const GaussRule r2 = expand<2>();
    static const GaussRule r3 = expand<3>();
    static const GaussRule r4 = expand<4>();
    static const GaussRule r6 = expand<6>();
    static const GaussRule r8 = expand<8>();
    static const GaussRule r16 = expand<16>();
    switch (order) {
        case 2: return r2;
        case 3: return r3;
        case 4: return r4;
        case 6: return r6;
        case 8: return r8;
        case 16: return r16;
        default: throw std::invalid_argument("unsupported Gauss-Legendre order");
    }
}

}  // namespace bvx
