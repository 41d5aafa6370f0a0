#include "cliffpoint/random.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>

namespace cliffpoint {

double Rng::gaussian(double mu, double sigma) {
    // Phi^-1(u) = -sqrt(2) * erfc^-1(2u)
    const double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform());
    return mu + sigma * z;
}

}  // namespace cliffpoint
