#include "olpsynth/dataset.hpp"

#include <algorithm>

#include "binary_io.hpp"
#include "olpsynth/error.hpp"

namespace olpsynth {

std::size_t LabeledDataset::class_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : records) n = std::max<std::size_t>(n, r.label + 1);
    return n;
}

LabeledDataset parse_dataset(std::span<const std::uint8_t> bytes) {
    detail::ByteReader in(bytes, "CPPD");
    in.expect_magic("CPPD");
    const std::uint32_t version = in.u32("version");
    if (version != 1) throw FormatError("unsupported dataset version " + std::to_string(version));
    const std::uint32_t count = in.u32("record count");
    LabeledDataset ds;
    ds.shape.channels = in.u32("C");
    ds.shape.height = in.u32("H");
    ds.shape.width = in.u32("W");
    check_shape(ds.shape);
    if (count > in.remaining() / (4 + 4 * ds.shape.elements()))
        throw FormatError("CPPD: truncated stream, header announces " + std::to_string(count) + " records");
    ds.records.reserve(count);
    for (std::uint32_t r = 0; r < count; ++r) {
        LabeledRecord rec;
        rec.label = in.u32("label");
        std::vector<float> values;
        in.floats(values, ds.shape.elements(), "record values");
        rec.input = Tensor(ds.shape, Layout::row_major(), std::move(values));
        ds.records.push_back(std::move(rec));
    }
    if (!in.at_end()) throw FormatError("CPPD: trailing bytes after the last record");
    return ds;
}

std::vector<std::uint8_t> write_dataset(const LabeledDataset& ds) {
    detail::ByteWriter out;
    out.magic("CPPD");
    out.u32(1);
    out.u32(static_cast<std::uint32_t>(ds.records.size()));
    out.u32(static_cast<std::uint32_t>(ds.shape.channels));
    out.u32(static_cast<std::uint32_t>(ds.shape.height));
    out.u32(static_cast<std::uint32_t>(ds.shape.width));
    for (const auto& r : ds.records) {
        if (r.input.shape() != ds.shape || r.input.layout() != Layout::row_major())
            throw ShapeError("dataset record must be row-major " + to_string(ds.shape));
        out.u32(r.label);
        out.floats(r.input.data());
    }
    return out.take();
}

LabeledDataset load_dataset(const std::string& path) { return parse_dataset(detail::read_file(path)); }

void save_dataset(const std::string& path, const LabeledDataset& ds) { detail::write_file(path, write_dataset(ds)); }

Tensor load_tensor(const std::string& path) {
    LabeledDataset ds = load_dataset(path);
    if (ds.records.size() != 1)
        throw FormatError("tensor file '" + path + "' must hold exactly one record, found " +
                          std::to_string(ds.records.size()));
    return std::move(ds.records.front().input);
}

void save_tensor(const std::string& path, const Tensor& t) {
    LabeledDataset ds;
    ds.shape = t.shape();
    ds.records.push_back({t, 0});
    save_dataset(path, ds);
}

}  // namespace olpsynth
