#include "banachkit/fvec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "banachkit/errors.hpp"

namespace banachkit {

namespace {

void check_entry(Index i, double v) {
    if (i < 1) throw std::invalid_argument("FVec: index must be >= 1, got " + std::to_string(i));
    if (!std::isfinite(v)) throw std::invalid_argument("FVec: non-finite coefficient at index " + std::to_string(i));
}

}  // namespace

FVec FVec::from_pairs(std::vector<std::pair<Index, double>> entries) {
    std::erase_if(entries, [](const auto& e) { return e.second == 0.0; });
    for (const auto& [i, v] : entries) check_entry(i, v);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < entries.size(); ++k)
        if (entries[k].first == entries[k - 1].first)
            throw std::invalid_argument("FVec: duplicate index " + std::to_string(entries[k].first));
    FVec x;
    x.entries_ = std::move(entries);
    return x;
}

FVec FVec::from_dense(const std::vector<double>& values) {
    std::vector<std::pair<Index, double>> entries;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0) entries.emplace_back(static_cast<Index>(i) + 1, values[i]);
    return from_pairs(std::move(entries));
}

FVec FVec::flat(double value, Index from, Index to) {
    if (value == 0.0) return FVec{};
    check_entry(from, value);
    if (to < from) throw std::invalid_argument("FVec::flat: empty interval");
    FVec x;
    x.flat_ = Flat{value, from, to};
    return x;
}

FVec FVec::unit(Index i, double coeff) { return from_pairs({{i, coeff}}); }

bool FVec::empty() const { return !flat_ && entries_.empty(); }

std::int64_t FVec::support_size() const {
    if (flat_) return flat_->to - flat_->from + 1;
    return static_cast<std::int64_t>(entries_.size());
}

IndexSet FVec::support() const {
    IndexSet s;
    if (flat_) {
        s.reserve(static_cast<std::size_t>(support_size()));
        for (Index i = flat_->from; i <= flat_->to; ++i) s.push_back(i);
        return s;
    }
    s.reserve(entries_.size());
    for (const auto& [i, v] : entries_) s.push_back(i);
    return s;
}

Index FVec::min_index() const {
    if (flat_) return flat_->from;
    return entries_.empty() ? 0 : entries_.front().first;
}

Index FVec::max_index() const {
    if (flat_) return flat_->to;
    return entries_.empty() ? 0 : entries_.back().first;
}

double FVec::at(Index i) const {
    if (flat_) return (i >= flat_->from && i <= flat_->to) ? flat_->value : 0.0;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const auto& e, Index j) { return e.first < j; });
    return (it != entries_.end() && it->first == i) ? it->second : 0.0;
}

double FVec::max_abs() const {
    if (flat_) return std::abs(flat_->value);
    double m = 0.0;
    for (const auto& [i, v] : entries_) m = std::max(m, std::abs(v));
    return m;
}

double FVec::min_abs() const {
    if (flat_) return std::abs(flat_->value);
    double m = kInf;
    for (const auto& [i, v] : entries_) m = std::min(m, std::abs(v));
    return m;
}

void FVec::materialize() const {
    if (!flat_) return;
    if (support_size() > materialize_cap)
        throw SizeError("FVec: flat vector of length " + std::to_string(support_size()) +
                        " exceeds the materialization cap");
    entries_.reserve(static_cast<std::size_t>(support_size()));
    for (Index i = flat_->from; i <= flat_->to; ++i) entries_.emplace_back(i, flat_->value);
    flat_.reset();
}

const std::vector<std::pair<Index, double>>& FVec::entries() const {
    materialize();
    return entries_;
}

FVec FVec::scaled(double c) const {
    if (c == 0.0) return FVec{};
    if (!std::isfinite(c)) throw std::invalid_argument("FVec::scaled: non-finite factor");
    if (flat_) return flat(flat_->value * c, flat_->from, flat_->to);
    FVec out;
    out.entries_.reserve(entries_.size());
    for (const auto& [i, v] : entries_) out.entries_.emplace_back(i, v * c);
    return out;
}

FVec operator+(const FVec& a, const FVec& b) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::vector<std::pair<Index, double>> merged;
    merged.reserve(ea.size() + eb.size());
    std::size_t i = 0, j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
            merged.push_back(ea[i++]);
        } else if (i == ea.size() || eb[j].first < ea[i].first) {
            merged.push_back(eb[j++]);
        } else {
            double s = ea[i].second + eb[j].second;
            if (s != 0.0) merged.emplace_back(ea[i].first, s);
            ++i, ++j;
        }
    }
    FVec out;
    out.entries_ = std::move(merged);
    return out;
}

FVec operator-(const FVec& a, const FVec& b) { return a + b.scaled(-1.0); }

bool FVec::operator==(const FVec& other) const {
    if (flat_ && other.flat_)
        return flat_->value == other.flat_->value && flat_->from == other.flat_->from &&
               flat_->to == other.flat_->to;
    if (flat_ || other.flat_) {
        if (support_size() != other.support_size()) return false;
        return entries() == other.entries();
    }
    return entries_ == other.entries_;
}

std::uint64_t FVec::hash() const {
    // FNV-1a over (index, value-bits) pairs; flat vectors hash their
    // descriptor so huge supports never materialize.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    auto value_bits = [](double v) {
        if (v == 0.0) v = 0.0;  // normalize -0.0
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        return bits;
    };
    if (flat_ && support_size() > 64) {
        mix(0xf1a7f1a7f1a7f1a7ull);
        mix(static_cast<std::uint64_t>(flat_->from));
        mix(static_cast<std::uint64_t>(flat_->to));
        mix(value_bits(flat_->value));
        return h;
    }
    for (const auto& [i, v] : entries()) {
        mix(static_cast<std::uint64_t>(i));
        mix(value_bits(v));
    }
    return h;
}

double lp_norm(const FVec& x, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must satisfy p >= 1");
    if (x.empty()) return 0.0;
    if (p == kInf) return x.max_abs();
    if (const auto& f = x.flat_desc()) {
        double n = static_cast<double>(x.support_size());
        return std::abs(f->value) * std::pow(n, 1.0 / p);
    }
    std::vector<double> mags;
    mags.reserve(x.entries().size());
    for (const auto& [i, v] : x.entries()) mags.push_back(std::abs(v));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double s = 0.0;
    if (p == 1.0) {
        for (double m : mags) s += m;
        return s;
    }
    if (p == 2.0) {
        for (double m : mags) s += m * m;
        return std::sqrt(s);
    }
    for (double m : mags) s += std::pow(m, p);
    return std::pow(s, 1.0 / p);
}

FVec restrict_to(const FVec& x, const IndexSet& F) {
    std::vector<std::pair<Index, double>> kept;
    const auto& e = x.entries();
    std::size_t i = 0, j = 0;
    while (i < e.size() && j < F.size()) {
        if (e[i].first < F[j]) ++i;
        else if (F[j] < e[i].first) ++j;
        else kept.push_back(e[i]), ++i, ++j;
    }
    return FVec::from_pairs(std::move(kept));
}

FVec rearrange_dec(const FVec& x) {
    if (x.empty()) return FVec{};
    if (const auto& f = x.flat_desc())
        return FVec::flat(std::abs(f->value), 1, x.support_size());
    std::vector<double> mags;
    mags.reserve(x.entries().size());
    for (const auto& [i, v] : x.entries()) mags.push_back(std::abs(v));
    // stable w.r.t. original index order on ties
    std::stable_sort(mags.begin(), mags.end(), std::greater<>());
    std::vector<std::pair<Index, double>> entries;
    entries.reserve(mags.size());
    for (std::size_t k = 0; k < mags.size(); ++k)
        entries.emplace_back(static_cast<Index>(k) + 1, mags[k]);
    return FVec::from_pairs(std::move(entries));
}

std::pair<FVec, FVec> threshold_split(const FVec& x, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("threshold_split: delta must be positive");
    std::vector<std::pair<Index, double>> big, small;
    for (const auto& [i, v] : x.entries())
        (std::abs(v) >= delta ? big : small).emplace_back(i, v);
    return {FVec::from_pairs(std::move(big)), FVec::from_pairs(std::move(small))};
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

FVec fvec_from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        std::vector<double> values;
        values.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number()) throw std::invalid_argument("vector literal: dense array entries must be numbers");
            values.push_back(v.get<double>());
        }
        return FVec::from_dense(values);
    }
    if (j.is_object()) {
        if (j.contains("flat")) {
            const auto& f = j.at("flat");
            return FVec::flat(f.at("value").get<double>(), f.at("from").get<Index>(),
                              f.at("to").get<Index>());
        }
        std::vector<std::pair<Index, double>> entries;
        for (const auto& [key, v] : j.items()) {
            Index i = 0;
            auto res = std::from_chars(key.data(), key.data() + key.size(), i);
            if (res.ec != std::errc{} || res.ptr != key.data() + key.size())
                throw std::invalid_argument("vector literal: key '" + key + "' is not an index");
            entries.emplace_back(i, v.get<double>());
        }
        return FVec::from_pairs(std::move(entries));
    }
    throw std::invalid_argument("vector literal: expected array, object, or flat form");
}

}  // namespace

FVec fvec_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return fvec_from_json(j);
}

std::string fvec_to_json_text(const FVec& x) {
    nlohmann::json j;
    if (const auto& f = x.flat_desc()) {
        j["flat"] = {{"value", f->value}, {"from", f->from}, {"to", f->to}};
    } else {
        j = nlohmann::json::object();
        for (const auto& [i, v] : x.entries()) j[std::to_string(i)] = v;
    }
    return j.dump();
}

}  // namespace banachkit
