#pragma once

// Binary event sequences on a uniform time grid, lag-window encodings and the
// bundle of situation/emotion sequences the learners consume.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace acnet {

struct TimeGrid {
    int step_minutes = 10;
    std::size_t horizon = 0;  // T, number of timestamps

    /// Number of grid steps in one day.
    double steps_per_day() const { return 1440.0 / static_cast<double>(step_minutes); }

    bool operator==(const TimeGrid&) const = default;
};

enum class SequenceKind { Situation, Emotion };

inline const char* to_string(SequenceKind k) { return k == SequenceKind::Situation ? "situation" : "emotion"; }

/// A 0/1 occurrence indicator per timestamp. Values are stored as bytes so that a
/// freshly parsed (not yet validated) sequence can hold out-of-range entries for
/// `validate_bundle` to report.
struct BinaryEventSequence {
    std::string name;
    SequenceKind kind = SequenceKind::Situation;
    std::vector<std::uint8_t> values;

    std::size_t size() const { return values.size(); }
    std::uint8_t operator[](std::size_t t) const { return values[t]; }
    std::span<const std::uint8_t> view() const { return values; }

    bool operator==(const BinaryEventSequence&) const = default;
};

/// Largest lag depth a window may encode; the composite state must fit in 32 bits
/// and conditioning tables grow as 2^eta.
inline constexpr int kMaxWindowDepth = 16;

/// Encodes (A(t-1), ..., A(t-eta)) as sum_k A(t-k) * 2^(k-1).
inline std::uint32_t encode_window(std::span<const std::uint8_t> values, int eta, std::size_t t) {
    if (eta < 1 || eta > kMaxWindowDepth) throw std::out_of_range("encode_window: eta must be in [1, 16]");
    if (t < static_cast<std::size_t>(eta) || t > values.size())
        throw std::out_of_range("encode_window: timestamp " + std::to_string(t) + " outside valid range [" +
                                std::to_string(eta) + ", " + std::to_string(values.size()) + "]");
    std::uint32_t state = 0;
    for (int k = 1; k <= eta; ++k) state |= static_cast<std::uint32_t>(values[t - k] & 1U) << (k - 1);
    return state;
}

inline std::uint32_t encode_window(const BinaryEventSequence& seq, int eta, std::size_t t) {
    return encode_window(seq.view(), eta, t);
}

/// Inverse of encode_window: element k-1 of the result is A(t-k).
inline std::vector<std::uint8_t> decode_window(std::uint32_t state, int eta) {
    std::vector<std::uint8_t> lags(static_cast<std::size_t>(eta));
    for (int k = 0; k < eta; ++k) lags[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((state >> k) & 1U);
    return lags;
}

/// The single value at lag one, A(t-1).
inline std::uint8_t lag1(std::span<const std::uint8_t> values, std::size_t t) {
    if (t == 0 || t > values.size())
        throw std::out_of_range("lag1: timestamp " + std::to_string(t) + " has no lag-1 value");
    return values[t - 1];
}

inline std::uint8_t lag1(const BinaryEventSequence& seq, std::size_t t) { return lag1(seq.view(), t); }

struct SequenceBundle {
    TimeGrid grid;
    std::vector<BinaryEventSequence> situations;
    std::vector<BinaryEventSequence> emotions;

    std::size_t size() const { return situations.size() + emotions.size(); }
    bool empty() const { return situations.empty() && emotions.empty(); }

    /// All sequences, situations first.
    std::vector<const BinaryEventSequence*> all() const {
        std::vector<const BinaryEventSequence*> out;
        out.reserve(size());
        for (const auto& s : situations) out.push_back(&s);
        for (const auto& e : emotions) out.push_back(&e);
        return out;
    }

    const BinaryEventSequence* find(const std::string& name) const {
        for (const auto* s : all())
            if (s->name == name) return s;
        return nullptr;
    }

    bool operator==(const SequenceBundle&) const = default;
};

struct ValidationIssue {
    std::string sequence;
    std::optional<std::size_t> index;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    std::string summary() const {
        std::string out;
        for (const auto& i : issues) {
            if (!out.empty()) out += "; ";
            out += i.sequence.empty() ? i.message : i.sequence + ": " + i.message;
        }
        return out;
    }
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report)
        : std::runtime_error("invalid sequence bundle: " + report.summary()), report_(std::move(report)) {}
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

inline ValidationReport validate_bundle(const SequenceBundle& bundle) {
    ValidationReport report;
    auto add = [&](std::string seq, std::optional<std::size_t> idx, std::string msg) {
        report.issues.push_back({std::move(seq), idx, std::move(msg)});
    };
    if (bundle.grid.step_minutes <= 0) add("", std::nullopt, "grid step_minutes must be positive");
    if (!bundle.empty() && bundle.grid.horizon < 2) add("", std::nullopt, "grid horizon T must be at least 2");

    std::unordered_set<std::string> names;
    auto check = [&](const BinaryEventSequence& s, SequenceKind expected) {
        if (s.name.empty()) add(s.name, std::nullopt, "empty sequence name");
        if (!names.insert(s.name).second) add(s.name, std::nullopt, "duplicate sequence name");
        if (s.kind != expected) add(s.name, std::nullopt, std::string("listed as ") + to_string(expected) +
                                                             " but tagged " + to_string(s.kind));
        if (s.values.size() != bundle.grid.horizon)
            add(s.name, std::nullopt,
                "length " + std::to_string(s.values.size()) + " does not match grid T " +
                    std::to_string(bundle.grid.horizon));
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            if (s.values[t] > 1) {
                add(s.name, t, "non-binary value " + std::to_string(s.values[t]) + " at index " + std::to_string(t));
                break;
            }
        }
    };
    for (const auto& s : bundle.situations) check(s, SequenceKind::Situation);
    for (const auto& e : bundle.emotions) check(e, SequenceKind::Emotion);
    return report;
}

inline void require_valid(const SequenceBundle& bundle) {
    auto report = validate_bundle(bundle);
    if (!report.ok()) throw ValidationError(std::move(report));
}

}  // namespace acnet
