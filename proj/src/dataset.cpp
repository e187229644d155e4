#include "crisp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "crisp/errors.hpp"
#include "crisp/rng.hpp"

namespace crisp {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
    throw ParseError("parse error at line " + std::to_string(line_no) + ": " + msg);
}

// Strict unsigned integer parse; rejects empty, sign and trailing junk.
bool parse_index(const std::string& tok, std::size_t& out) {
    if (tok.empty()) return false;
    std::size_t value = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') return false;
        value = value * 10 + static_cast<std::size_t>(ch - '0');
    }
    out = value;
    return true;
}

bool parse_real(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size();
}

struct ParsedLine {
    std::vector<std::size_t> label_ids;            // 0-based
    std::vector<std::pair<std::size_t, double>> feats;  // 0-based
};

// Shared between the full and single-positive formats; `first_is_gamma`
// selects how the leading token is interpreted.
ParsedLine parse_line(const std::string& line, std::size_t line_no, std::size_t c,
                      std::size_t q, bool first_is_gamma) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) fail_line(line_no, "empty record");

    ParsedLine parsed;
    if (first_is_gamma) {
        std::size_t gamma = 0;
        if (!parse_index(tok, gamma)) fail_line(line_no, "malformed label token '" + tok + "'");
        if (gamma < 1 || gamma > c)
            fail_line(line_no, "label index " + std::to_string(gamma) + " out of range");
        parsed.label_ids.push_back(gamma - 1);
    } else {
        // Comma-separated label list; empty segments are ignored so a lone
        // comma denotes "no labels".
        std::string seg;
        std::istringstream labels(tok);
        while (std::getline(labels, seg, ',')) {
            if (seg.empty()) continue;
            std::size_t id = 0;
            if (!parse_index(seg, id)) fail_line(line_no, "malformed label token '" + seg + "'");
            if (id < 1 || id > c)
                fail_line(line_no, "label index " + std::to_string(id) + " out of range");
            parsed.label_ids.push_back(id - 1);
        }
    }

    std::vector<bool> seen(q, false);
    while (ls >> tok) {
        const std::size_t colon = tok.find(':');
        if (colon == std::string::npos || colon == 0 || colon == tok.size() - 1)
            fail_line(line_no, "malformed feature token '" + tok + "'");
        std::size_t idx = 0;
        double val = 0.0;
        if (!parse_index(tok.substr(0, colon), idx))
            fail_line(line_no, "malformed feature token '" + tok + "'");
        if (!parse_real(tok.substr(colon + 1), val))
            fail_line(line_no, "malformed feature token '" + tok + "'");
        if (idx < 1 || idx > q)
            fail_line(line_no, "feature index " + std::to_string(idx) + " out of range");
        if (!std::isfinite(val)) fail_line(line_no, "non-finite feature value");
        if (seen[idx - 1])
            fail_line(line_no, "duplicate feature index " + std::to_string(idx));
        seen[idx - 1] = true;
        parsed.feats.emplace_back(idx - 1, val);
    }
    return parsed;
}

std::vector<ParsedLine> parse_stream(std::istream& in, std::size_t c, std::size_t q,
                                     bool first_is_gamma) {
    if (c < 1 || q < 1) throw ParseError("class and feature counts must be >= 1");
    std::vector<ParsedLine> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_line(line, line_no, c, q, first_is_gamma));
    }
    return rows;
}

void format_value(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

void write_features(std::ostream& out, const Matrix& features, std::size_t r) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
        const double v = features(r, j);
        if (v == 0.0) continue;
        out << ' ' << (j + 1) << ':';
        format_value(out, v);
    }
}

}  // namespace

void SplitSpec::validate() const {
    const bool in_range = train_frac > 0.0 && train_frac < 1.0 && val_frac > 0.0 &&
                          val_frac < 1.0 && test_frac > 0.0 && test_frac < 1.0;
    if (!in_range || std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw ParseError("split fractions must lie in (0,1) and sum to 1");
}

MultiLabelDataset parse_dataset(std::istream& in, std::size_t c, std::size_t q) {
    const auto rows = parse_stream(in, c, q, /*first_is_gamma=*/false);
    if (rows.empty()) throw ParseError("dataset is empty");
    MultiLabelDataset data;
    data.features = Matrix(rows.size(), q);
    data.labels = Matrix(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t id : rows[i].label_ids) data.labels(i, id) = 1.0;
        for (const auto& [idx, val] : rows[i].feats) data.features(i, idx) = val;
    }
    return data;
}

void write_dataset(const MultiLabelDataset& data, std::ostream& out) {
    for (std::size_t i = 0; i < data.n(); ++i) {
        bool first = true;
        for (std::size_t j = 0; j < data.c(); ++j) {
            if (data.labels(i, j) == 0.0) continue;
            if (!first) out << ',';
            out << (j + 1);
            first = false;
        }
        if (first) out << ',';
        write_features(out, data.features, i);
        out << '\n';
    }
}

SinglePositiveDataset parse_single_positive(std::istream& in, std::size_t c, std::size_t q) {
    const auto rows = parse_stream(in, c, q, /*first_is_gamma=*/true);
    if (rows.empty()) throw ParseError("dataset is empty");
    SinglePositiveDataset data;
    data.features = Matrix(rows.size(), q);
    data.num_classes = c;
    data.observed.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.observed[i] = rows[i].label_ids.front();
        for (const auto& [idx, val] : rows[i].feats) data.features(i, idx) = val;
    }
    return data;
}

void write_single_positive(const SinglePositiveDataset& data, std::ostream& out) {
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << (data.observed[i] + 1);
        write_features(out, data.features, i);
        out << '\n';
    }
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n < 3) throw DataError("empty split: need at least 3 instances");
    const auto val_n = static_cast<std::size_t>(std::lround(spec.val_frac * double(n)));
    const auto test_n = static_cast<std::size_t>(std::lround(spec.test_frac * double(n)));
    if (val_n == 0 || test_n == 0 || val_n + test_n >= n) throw DataError("empty split");
    const std::size_t train_n = n - val_n - test_n;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(order);

    std::array<std::vector<std::size_t>, 3> parts;
    parts[0].assign(order.begin(), order.begin() + train_n);
    parts[1].assign(order.begin() + train_n, order.begin() + train_n + val_n);
    parts[2].assign(order.begin() + train_n + val_n, order.end());
    for (auto& p : parts) std::sort(p.begin(), p.end());
    return parts;
}

namespace {

MultiLabelDataset take_rows(const MultiLabelDataset& data, const std::vector<std::size_t>& idx) {
    MultiLabelDataset out;
    out.features = Matrix(idx.size(), data.q());
    out.labels = Matrix(idx.size(), data.c());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t j = 0; j < data.q(); ++j) out.features(r, j) = data.features(idx[r], j);
        for (std::size_t j = 0; j < data.c(); ++j) out.labels(r, j) = data.labels(idx[r], j);
    }
    return out;
}

}  // namespace

Splits split(const MultiLabelDataset& data, const SplitSpec& spec) {
    const auto parts = split_indices(data.n(), spec);
    return Splits{take_rows(data, parts[0]), take_rows(data, parts[1]), take_rows(data, parts[2])};
}

MaskResult mask_single_positive(const MultiLabelDataset& data, std::uint64_t seed) {
    Rng rng(seed);
    MaskResult result;
    std::vector<std::size_t> kept;
    std::vector<std::size_t> gamma;
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < data.n(); ++i) {
        positives.clear();
        for (std::size_t j = 0; j < data.c(); ++j)
            if (data.labels(i, j) != 0.0) positives.push_back(j);
        if (positives.empty()) {
            ++result.dropped;
            continue;
        }
        kept.push_back(i);
        gamma.push_back(positives[rng.uniform_below(positives.size())]);
    }
    if (kept.empty()) throw DataError("no positive labels in dataset");

    result.data.features = Matrix(kept.size(), data.q());
    result.data.observed = std::move(gamma);
    result.data.num_classes = data.c();
    for (std::size_t r = 0; r < kept.size(); ++r)
        for (std::size_t j = 0; j < data.q(); ++j)
            result.data.features(r, j) = data.features(kept[r], j);
    return result;
}

std::vector<std::size_t> positive_set(const SinglePositiveDataset& sp, std::size_t label) {
    if (label >= sp.c()) throw std::invalid_argument("positive_set: label out of range");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sp.n(); ++i)
        if (sp.observed[i] == label) out.push_back(i);
    return out;
}

Matrix one_hot_observed(const SinglePositiveDataset& sp) {
    Matrix l(sp.n(), sp.c());
    for (std::size_t i = 0; i < sp.n(); ++i) l(i, sp.observed[i]) = 1.0;
    return l;
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return in;
}

}  // namespace

MultiLabelDataset load_dataset_file(const std::string& path, std::size_t c, std::size_t q) {
    auto in = open_or_throw(path);
    return parse_dataset(in, c, q);
}

SinglePositiveDataset load_single_positive_file(const std::string& path, std::size_t c,
                                                std::size_t q) {
    auto in = open_or_throw(path);
    return parse_single_positive(in, c, q);
}

}  // namespace crisp
