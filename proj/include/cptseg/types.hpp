#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cptseg {

/// Thrown when inputs violate a documented precondition (bad data, bad
/// arguments, incompatible method/model/penalty combinations).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an algorithm cannot produce a result (degenerate fits,
/// optimizer failure, search-space guards).
struct algorithm_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an output artifact cannot be written.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Labels sort numerically when both parse as integers (epochs), otherwise
// lexicographically (ISO-8601 dates compare correctly as strings).
inline bool label_less(const std::string& a, const std::string& b) {
    auto parse = [](const std::string& s, long long& out) {
        if (s.empty()) return false;
        std::size_t pos = 0;
        try {
            out = std::stoll(s, &pos);
        } catch (...) {
            return false;
        }
        return pos == s.size();
    };
    long long x = 0, y = 0;
    if (parse(a, x) && parse(b, y)) return x < y;
    return a < b;
}

} // namespace detail

/// An ordered series of real observations with optional time labels.
/// Indices are 1-based on the public surface.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values,
                        std::vector<std::string> labels = {})
        : values_(std::move(values)), labels_(std::move(labels)) {
        if (values_.empty()) throw invalid_input("TimeSeries requires n >= 1");
        for (double v : values_) {
            if (!std::isfinite(v))
                throw invalid_input("TimeSeries values must be finite (no NaN/missing)");
        }
        if (!labels_.empty()) {
            if (labels_.size() != values_.size())
                throw invalid_input("time labels must have length n");
            for (std::size_t i = 1; i < labels_.size(); ++i) {
                if (!detail::label_less(labels_[i - 1], labels_[i]))
                    throw invalid_input("time labels must be strictly increasing");
            }
        }
    }

    int n() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double value(int i) const { return values_[static_cast<std::size_t>(i - 1)]; }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<std::string>& labels() const { return labels_; }
    /// Label of the observation at 1-based index i.
    const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i - 1)]; }

    double mean() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s / static_cast<double>(values_.size());
    }

private:
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

/// A sorted set of m distinct interior changepoint indices tau, with the
/// implicit boundaries tau_0 = 1 and tau_{m+1} = n+1.  Every interior
/// index satisfies 2 <= tau_j <= n.
class ChangepointSet {
public:
    ChangepointSet(std::vector<int> tau, int n) : tau_(std::move(tau)), n_(n) {
        if (n_ < 1) throw invalid_input("ChangepointSet requires n >= 1");
        if (static_cast<int>(tau_.size()) > n_ - 1)
            throw invalid_input("too many changepoints: m must satisfy m <= n-1");
        for (std::size_t j = 0; j < tau_.size(); ++j) {
            if (tau_[j] < 2 || tau_[j] > n_)
                throw invalid_input("changepoint indices must satisfy 2 <= tau <= n");
            if (j > 0 && tau_[j] <= tau_[j - 1])
                throw invalid_input("changepoint indices must be strictly increasing");
        }
    }

    static ChangepointSet empty(int n) { return ChangepointSet({}, n); }

    int m() const { return static_cast<int>(tau_.size()); }
    int n() const { return n_; }
    const std::vector<int>& tau() const { return tau_; }

    /// Boundary sequence 1, tau_1, ..., tau_m, n+1 (length m+2).
    std::vector<int> boundaries() const {
        std::vector<int> b;
        b.reserve(tau_.size() + 2);
        b.push_back(1);
        b.insert(b.end(), tau_.begin(), tau_.end());
        b.push_back(n_ + 1);
        return b;
    }

    /// 0-based region index of the 1-based observation index i.
    int region_of(int i) const {
        int j = 0;
        for (int t : tau_) {
            if (i >= t) ++j; else break;
        }
        return j;
    }

    bool operator==(const ChangepointSet& other) const {
        return n_ == other.n_ && tau_ == other.tau_;
    }

private:
    std::vector<int> tau_;
    int n_;
};

/// Lengths of the m+1 regions: ell_j = tau_{j+1} - tau_j for j = 0..m.
/// Guaranteed positive and summing to n.
inline std::vector<int> region_lengths(const ChangepointSet& cpts) {
    const auto b = cpts.boundaries();
    std::vector<int> lengths(b.size() - 1);
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
        lengths[j] = b[j + 1] - b[j];
    return lengths;
}

/// Half-open interval labels "[a,b)" for the m+1 regions.
inline std::vector<std::string> regions(const ChangepointSet& cpts) {
    const auto b = cpts.boundaries();
    std::vector<std::string> out;
    out.reserve(b.size() - 1);
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
        out.push_back("[" + std::to_string(b[j]) + "," + std::to_string(b[j + 1]) + ")");
    return out;
}

} // namespace cptseg
