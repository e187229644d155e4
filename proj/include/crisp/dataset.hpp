#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "crisp/matrix.hpp"

namespace crisp {

// Fully labeled multi-label dataset: n x q features, n x c binary labels.
struct MultiLabelDataset {
    Matrix features;  // finite reals
    Matrix labels;    // 0/1

    std::size_t n() const { return features.rows(); }
    std::size_t q() const { return features.cols(); }
    std::size_t c() const { return labels.cols(); }
};

// Weakly labeled view: each instance reveals exactly one of its positive
// labels (the observed class index).
struct SinglePositiveDataset {
    Matrix features;
    std::vector<std::size_t> observed;  // one class index per row, < num_classes
    std::size_t num_classes = 0;

    std::size_t n() const { return features.rows(); }
    std::size_t q() const { return features.cols(); }
    std::size_t c() const { return num_classes; }
};

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Splits {
    MultiLabelDataset train, val, test;
};

struct MaskResult {
    SinglePositiveDataset data;
    std::size_t dropped = 0;  // instances with no positive label
};

// Text format, one instance per line:
//   <labels> <idx>:<val> <idx>:<val> ...
// <labels> is a comma-separated list of 1-based class indices; an empty list
// is written as a lone comma. Feature indices are 1-based; absent features
// are zero. Throws ParseError with the offending line number.
MultiLabelDataset parse_dataset(std::istream& in, std::size_t c, std::size_t q);
void write_dataset(const MultiLabelDataset& data, std::ostream& out);

// Single-positive file: <gamma> <idx>:<val> ... with gamma 1-based.
SinglePositiveDataset parse_single_positive(std::istream& in, std::size_t c, std::size_t q);
void write_single_positive(const SinglePositiveDataset& data, std::ostream& out);

// Seeded shuffle-then-slice partition. Val/test sizes are round(n * frac);
// the remainder goes to train. Throws DataError if any split is empty.
Splits split(const MultiLabelDataset& data, const SplitSpec& spec);
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitSpec& spec);

// For each instance, draw the observed positive uniformly from its positive
// set. Instances with no positive label are dropped and counted.
MaskResult mask_single_positive(const MultiLabelDataset& data, std::uint64_t seed);

// {i : observed_i == label}
std::vector<std::size_t> positive_set(const SinglePositiveDataset& sp, std::size_t label);

// Observed labels as an n x c one-hot matrix.
Matrix one_hot_observed(const SinglePositiveDataset& sp);

MultiLabelDataset load_dataset_file(const std::string& path, std::size_t c, std::size_t q);
SinglePositiveDataset load_single_positive_file(const std::string& path, std::size_t c,
                                                std::size_t q);

}  // namespace crisp
