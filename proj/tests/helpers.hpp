#pragma once

#include <random>

#include "rbsn/tensor.hpp"

namespace testutil {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240917);
    return gen;
}

inline double uniform(double a = -1.0, double b = 1.0)
{
    return std::uniform_real_distribution<double>(a, b)(rng());
}

template <int Order>
rbsn::Tensor<Order> random_tensor(int dim)
{
    rbsn::Tensor<Order> t(dim);
    t.for_each_index([&](const std::array<int, Order>& i) { t.at(i) = uniform(); });
    return t;
}

inline rbsn::Tensor2 random_symmetric(int dim)
{
    return rbsn::symmetrize(random_tensor<2>(dim));
}

inline rbsn::Vector random_unit(int dim)
{
    auto v = random_tensor<1>(dim);
    return v / rbsn::norm(v);
}

}  // namespace testutil
