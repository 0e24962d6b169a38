#pragma once

#include <array>
#include <concepts>
#include <cstddef>

namespace dper {

/// Streaming sum: plain accumulation inside blocks of kBlock terms, blocks
/// combined pairwise like a binary counter. Up to kBlock terms the result is
/// bit-identical to naive left-to-right summation.
template <std::floating_point Scalar>
class PairwiseSum {
public:
    static constexpr std::size_t kBlock = 4096;

    void add(Scalar x) noexcept {
        block_ += x;
        if (++in_block_ == kBlock) flush();
    }

    [[nodiscard]] Scalar result() const noexcept {
        Scalar total = block_;
        // Lowest level first so small partials meet before the large ones.
        for (std::size_t level = 0; level < kLevels; ++level)
            if (occupied_[level]) total = levels_[level] + total;
        return total;
    }

private:
    static constexpr std::size_t kLevels = 48;

    void flush() noexcept {
        Scalar carry = block_;
        std::size_t level = 0;
        while (level + 1 < kLevels && occupied_[level]) {
            carry = levels_[level] + carry;
            occupied_[level] = false;
            ++level;
        }
        levels_[level] = occupied_[level] ? levels_[level] + carry : carry;
        occupied_[level] = true;
        block_ = 0;
        in_block_ = 0;
    }

    Scalar block_ = 0;
    std::size_t in_block_ = 0;
    std::array<Scalar, kLevels> levels_{};
    std::array<bool, kLevels> occupied_{};
};

}  // namespace dper
