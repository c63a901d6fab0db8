#include "exactq/rng.hpp"

namespace exactq {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t stream) {
    std::uint64_t z = splitmix64(master ^ splitmix64(replication + 1));
    return splitmix64(z ^ splitmix64((stream + 1) * 0xD1B54A32D192ED03ull));
}

}  // namespace exactq
