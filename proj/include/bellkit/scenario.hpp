#pragma once

// Bell scenarios and the global vector layout.
//
// A behavior P(x1..xn | u1..un) is stored as a flat vector. Inputs vary in the
// outer loops and outputs in the inner loops:
//
//     index(u, x) = flat(u) * prod(o_k) + flat(x)
//
// where flat() is lexicographic with party 1 the most significant digit.
// Parties are 0-based in code; files and labels print them 1-based. Output 0
// is the distinguished "first" outcome of the CG notation.

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellkit {

/// Shape mismatches and malformed objects; distinct from validation failures.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Digits = std::vector<std::size_t>;

/// Mixed-radix helpers; the first digit is the most significant.
inline std::size_t flatten(const Digits& digits, const std::vector<std::size_t>& radices) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < radices.size(); ++k) flat = flat * radices[k] + digits[k];
    return flat;
}

inline Digits unflatten(std::size_t flat, const std::vector<std::size_t>& radices) {
    Digits digits(radices.size());
    for (std::size_t k = radices.size(); k-- > 0;) {
        digits[k] = flat % radices[k];
        flat /= radices[k];
    }
    return digits;
}

inline std::size_t product(const std::vector<std::size_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{1}, std::multiplies<>());
}

class PartySubset;

class Scenario {
public:
    Scenario(std::vector<std::size_t> inputs, std::vector<std::size_t> outputs)
        : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
        if (inputs_.empty()) throw StructuralError("scenario needs at least one party");
        if (inputs_.size() != outputs_.size())
            throw StructuralError("scenario: input and output count lists differ in length");
        for (auto m : inputs_)
            if (m < 1) throw StructuralError("scenario: every party needs at least one input");
        for (auto o : outputs_)
            if (o < 2) throw StructuralError("scenario: every party needs at least two outputs");
        input_blocks_ = product(inputs_);
        output_block_ = product(outputs_);
    }

    /// n parties with identical input and output counts.
    static Scenario uniform(std::size_t parties, std::size_t inputs, std::size_t outputs) {
        return Scenario(std::vector<std::size_t>(parties, inputs), std::vector<std::size_t>(parties, outputs));
    }

    std::size_t parties() const { return inputs_.size(); }
    const std::vector<std::size_t>& inputs() const { return inputs_; }
    const std::vector<std::size_t>& outputs() const { return outputs_; }

    std::size_t input_blocks() const { return input_blocks_; }
    std::size_t output_block() const { return output_block_; }
    std::size_t dimension() const { return input_blocks_ * output_block_; }

    std::size_t index(const Digits& joint_inputs, const Digits& joint_outputs) const {
        return flatten(joint_inputs, inputs_) * output_block_ + flatten(joint_outputs, outputs_);
    }
    std::size_t index(std::size_t input_block, std::size_t output_flat) const {
        return input_block * output_block_ + output_flat;
    }
    Digits input_digits(std::size_t input_block) const { return unflatten(input_block, inputs_); }
    Digits output_digits(std::size_t output_flat) const { return unflatten(output_flat, outputs_); }

    Scenario restrict_to(const PartySubset& subset) const;

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_;
    }

    std::string describe() const {
        std::string s = std::to_string(parties()) + " parties, inputs [";
        for (std::size_t k = 0; k < parties(); ++k) s += (k ? "," : "") + std::to_string(inputs_[k]);
        s += "], outputs [";
        for (std::size_t k = 0; k < parties(); ++k) s += (k ? "," : "") + std::to_string(outputs_[k]);
        return s + "]";
    }

private:
    std::vector<std::size_t> inputs_;
    std::vector<std::size_t> outputs_;
    std::size_t input_blocks_ = 1;
    std::size_t output_block_ = 1;
};

/// Strictly increasing list of 0-based party indices.
class PartySubset {
public:
    PartySubset() = default;
    explicit PartySubset(std::vector<std::size_t> parties) : parties_(std::move(parties)) {
        for (std::size_t i = 1; i < parties_.size(); ++i)
            if (parties_[i] <= parties_[i - 1])
                throw StructuralError("party subset must be strictly increasing and duplicate-free");
    }

    static PartySubset from_mask(std::uint64_t mask, std::size_t parties) {
        std::vector<std::size_t> p;
        for (std::size_t k = 0; k < parties; ++k)
            if (mask >> k & 1U) p.push_back(k);
        return PartySubset(std::move(p));
    }

    const std::vector<std::size_t>& parties() const { return parties_; }
    std::size_t size() const { return parties_.size(); }
    bool empty() const { return parties_.empty(); }
    std::size_t operator[](std::size_t i) const { return parties_[i]; }

    bool contains(std::size_t party) const {
        for (auto p : parties_)
            if (p == party) return true;
        return false;
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (auto p : parties_) m |= std::uint64_t{1} << p;
        return m;
    }

    /// Parties of {0..n-1} not in this subset.
    PartySubset complement(std::size_t n) const {
        std::vector<std::size_t> rest;
        for (std::size_t k = 0; k < n; ++k)
            if (!contains(k)) rest.push_back(k);
        return PartySubset(std::move(rest));
    }

    /// Maps positions of `inner` (a subset of the sub-scenario on *this) back to
    /// party indices of the enclosing scenario.
    PartySubset compose(const PartySubset& inner) const {
        std::vector<std::size_t> p;
        for (auto i : inner.parties_) {
            if (i >= parties_.size()) throw StructuralError("nested subset refers to a party outside the outer subset");
            p.push_back(parties_[i]);
        }
        return PartySubset(std::move(p));
    }

    void check_within(std::size_t n) const {
        if (parties_.empty()) throw StructuralError("party subset is empty");
        if (parties_.back() >= n)
            throw StructuralError("party " + std::to_string(parties_.back() + 1) + " does not exist in a " +
                                  std::to_string(n) + "-party scenario");
    }

    std::string describe() const {
        std::string s = "{";
        for (std::size_t i = 0; i < parties_.size(); ++i) s += (i ? "," : "") + std::to_string(parties_[i] + 1);
        return s + "}";
    }

    friend bool operator==(const PartySubset&, const PartySubset&) = default;

private:
    std::vector<std::size_t> parties_;
};

inline Scenario Scenario::restrict_to(const PartySubset& subset) const {
    subset.check_within(parties());
    std::vector<std::size_t> in, out;
    for (auto p : subset.parties()) {
        in.push_back(inputs_[p]);
        out.push_back(outputs_[p]);
    }
    return Scenario(std::move(in), std::move(out));
}

/// Picks the digits of `subset` out of a full joint tuple.
inline Digits select(const Digits& joint, const PartySubset& subset) {
    Digits d;
    d.reserve(subset.size());
    for (auto p : subset.parties()) d.push_back(joint[p]);
    return d;
}

inline std::string describe_digits(const Digits& d) {
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i] + 1);
    return s + ")";
}

} // namespace bellkit
