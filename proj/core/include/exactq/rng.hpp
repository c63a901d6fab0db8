#pragma once

#include <cstdint>
#include <random>

namespace exactq {

// One splitmix64 step; used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t x);

// Stable seed derivation: replication r, stream i of a run with the given
// master seed always produce the same engine seed, on every machine.
// stream ids 0..c are the renewal streams; higher ids are auxiliary draws.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t stream);

// Deterministic seeded random stream. All samplers in this project consume
// uniforms through this class only; no std::*_distribution adapters, so the
// byte stream of results is identical across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t master, std::uint64_t replication, std::uint64_t stream)
        : engine_(derive_seed(master, replication, stream)) {}

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Raw 64-bit words consumed so far (diagnostic).
    std::uint64_t draws() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace exactq
