#ifndef GPGOMEA_FITNESS_HPP
#define GPGOMEA_FITNESS_HPP

#include <cstdint>
#include <limits>

namespace gpgomea {

// Mean squared error after linear scaling, together with the scaling
// coefficients (prediction = scale_a + scale_b * f). `batch_id` stamps the
// data batch the value was measured on; values with different stamps are
// not comparable.
struct FitnessInfo {
    static constexpr double worst = std::numeric_limits<double>::infinity();
    static constexpr std::int64_t full_set = -1;

    double mse { worst };
    double scale_a { 0.0 };
    double scale_b { 0.0 };
    std::int64_t batch_id { full_set };

    [[nodiscard]] bool is_worst() const noexcept { return !(mse < worst); }
};

} // namespace gpgomea

#endif
