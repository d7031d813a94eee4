#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "olpsynth/tensor.hpp"

namespace olpsynth {

struct LabeledRecord {
    Tensor input;  // row-major
    std::uint32_t label = 0;
};

struct LabeledDataset {
    TensorShape shape{};
    std::vector<LabeledRecord> records;

    /// One past the largest label.
    std::size_t class_count() const noexcept;
};

/// CPPD: magic, u32 version, u32 count, u32 C, H, W, then per record a u32
/// label followed by C*H*W row-major floats. All little-endian.
LabeledDataset parse_dataset(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_dataset(const LabeledDataset& ds);

LabeledDataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const LabeledDataset& ds);

/// Single-tensor files are CPPD with one record, label 0.
Tensor load_tensor(const std::string& path);
void save_tensor(const std::string& path, const Tensor& t);

}  // namespace olpsynth
