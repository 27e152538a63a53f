#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sbd {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ErrorKind {
    CapExceeded,
    BadWord,
    NotHermitian,
    OddDimension,
    Singular,
    SeedDegenerate,
    IterationSingular,
    ZeroMatrix,
    DepthTooLarge,
    NegativeRadicand,
    DomainError,
    NoConvergence,
    NotPowerOfTwo,
    IncompleteGrid,
    DegenerateFit,
    ParseError,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so they can branch (e.g. Singular -> det' fallback).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline bool is_power_of_two(std::uint64_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

/// Smallest power of two >= v (v >= 1).
inline std::uint64_t next_power_of_two(std::uint64_t v) noexcept
{
    std::uint64_t p = 1;
    while (p < v)
        p <<= 1;
    return p;
}

inline int log2_exact(std::uint64_t v) noexcept
{
    int k = 0;
    while ((std::uint64_t{1} << k) < v)
        ++k;
    return k;
}

}  // namespace sbd
