#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vmatch/errors.hpp"

namespace vmatch {

// Fixed-length bit vector packed 64 bits per word.  Bit i lives in
// words()[i / 64] at bit position i % 64 (LSB first), so the on-disk cache
// format can dump the words verbatim on any little-endian layout.
class BitSeq {
public:
    BitSeq() = default;

    explicit BitSeq(std::size_t n_bits)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

    std::size_t size() const { return n_bits_; }
    bool empty() const { return n_bits_ == 0; }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    std::uint64_t popcount() const { return popcount_range(0, n_bits_); }

    // Number of set bits in [begin, end).
    std::uint64_t popcount_range(std::size_t begin, std::size_t end) const {
        if (begin >= end) return 0;
        const std::size_t wb = begin >> 6, we = (end - 1) >> 6;
        const std::uint64_t head = ~std::uint64_t{0} << (begin & 63);
        const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((end - 1) & 63));
        if (wb == we) return std::popcount(words_[wb] & head & tail);
        std::uint64_t n = std::popcount(words_[wb] & head);
        for (std::size_t w = wb + 1; w < we; ++w) n += std::popcount(words_[w]);
        return n + std::popcount(words_[we] & tail);
    }

    // popcount(a AND b) over [begin, end).  Sizes may differ; the range must
    // be valid for both.
    static std::uint64_t and_popcount_range(const BitSeq& a, const BitSeq& b,
                                            std::size_t begin, std::size_t end) {
        if (begin >= end) return 0;
        const std::size_t wb = begin >> 6, we = (end - 1) >> 6;
        const std::uint64_t head = ~std::uint64_t{0} << (begin & 63);
        const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((end - 1) & 63));
        if (wb == we) return std::popcount(a.words_[wb] & b.words_[wb] & head & tail);
        std::uint64_t n = std::popcount(a.words_[wb] & b.words_[wb] & head);
        for (std::size_t w = wb + 1; w < we; ++w)
            n += std::popcount(a.words_[w] & b.words_[w]);
        return n + std::popcount(a.words_[we] & b.words_[we] & tail);
    }

private:
    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace vmatch
