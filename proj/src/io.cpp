#include "lightdic/io.hpp"

#include "lightdic/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace lightdic::io {

namespace {

// Explicit little-endian scalar IO; payload arrays go through the same
// helpers so the formats stay byte-stable on any host.

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw InputError("cannot open for writing: " + path);
        path_ = path;
    }

    void magic(const char tag[9]) { out_.write(tag, 8); }

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

    void u64(std::uint64_t v) {
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(buf, 8);
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void f64_array(const double* data, std::size_t count) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
        } else {
            for (std::size_t i = 0; i < count; ++i) f64(data[i]);
        }
    }

    void u64_array(const std::uint64_t* data, std::size_t count) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
        } else {
            for (std::size_t i = 0; i < count; ++i) u64(data[i]);
        }
    }

    void close() {
        out_.flush();
        if (!out_) throw InputError("write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw FormatError("cannot open: " + path);
    }

    void expect_magic(const char tag[9]) {
        char buf[8];
        in_.read(buf, 8);
        if (!in_ || std::memcmp(buf, tag, 8) != 0) {
            throw FormatError(path_ + ": bad magic, expected " + std::string(tag, 8));
        }
    }

    std::uint8_t u8() {
        const int c = in_.get();
        if (c == std::char_traits<char>::eof()) truncated();
        return static_cast<std::uint8_t>(c);
    }

    std::uint64_t u64() {
        char buf[8];
        in_.read(buf, 8);
        if (!in_) truncated();
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    void f64_array(double* data, std::size_t count) {
        if constexpr (std::endian::native == std::endian::little) {
            in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
            if (!in_) truncated();
        } else {
            for (std::size_t i = 0; i < count; ++i) data[i] = f64();
        }
    }

    void u64_array(std::uint64_t* data, std::size_t count) {
        if constexpr (std::endian::native == std::endian::little) {
            in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
            if (!in_) truncated();
        } else {
            for (std::size_t i = 0; i < count; ++i) data[i] = u64();
        }
    }

    [[noreturn]] void truncated() { throw FormatError(path_ + ": truncated file"); }

private:
    std::ifstream in_;
    std::string path_;
};

constexpr char kMagicFeatures[9] = "LDCFv001";
constexpr char kMagicMatrix[9] = "LDCMv001";
constexpr char kMagicCache[9] = "LDCPv001";
constexpr char kMagicModel[9] = "LDCWv001";

} // namespace

void write_features(const FeatureMatrix& m, const std::string& path, DType dtype) {
    Writer w(path);
    w.magic(kMagicFeatures);
    w.u64(m.rows);
    w.u64(m.cols);
    w.u8(static_cast<std::uint8_t>(dtype));
    switch (dtype) {
        case DType::F64:
            w.f64_array(m.values.data(), m.values.size());
            break;
        case DType::F32: {
            for (double v : m.values) {
                const auto f = static_cast<float>(v);
                const auto bits = std::bit_cast<std::uint32_t>(f);
                w.u8(static_cast<std::uint8_t>(bits & 0xff));
                w.u8(static_cast<std::uint8_t>((bits >> 8) & 0xff));
                w.u8(static_cast<std::uint8_t>((bits >> 16) & 0xff));
                w.u8(static_cast<std::uint8_t>((bits >> 24) & 0xff));
            }
            break;
        }
        case DType::I64:
            throw InputError("write_features: integer dtype is for labels");
    }
    w.close();
}

FeatureMatrix read_features(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicFeatures);
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    const auto dtype = static_cast<DType>(r.u8());
    FeatureMatrix m(rows, cols);
    switch (dtype) {
        case DType::F64:
            r.f64_array(m.values.data(), m.values.size());
            break;
        case DType::F32: {
            for (double& v : m.values) {
                std::uint32_t bits = 0;
                for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(r.u8()) << (8 * i);
                v = static_cast<double>(std::bit_cast<float>(bits));
            }
            break;
        }
        case DType::I64:
            throw FormatError(path + ": label payload where features expected");
        default:
            throw FormatError(path + ": unknown dtype tag");
    }
    return m;
}

void write_labels(const std::vector<std::int64_t>& labels, const std::string& path) {
    Writer w(path);
    w.magic(kMagicFeatures);
    w.u64(labels.size());
    w.u64(1);
    w.u8(static_cast<std::uint8_t>(DType::I64));
    for (std::int64_t v : labels) w.u64(static_cast<std::uint64_t>(v));
    w.close();
}

std::vector<std::int64_t> read_labels(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicFeatures);
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    const auto dtype = static_cast<DType>(r.u8());
    if (dtype != DType::I64 || cols != 1) {
        throw FormatError(path + ": expected an i64 label column");
    }
    std::vector<std::int64_t> labels(rows);
    for (auto& v : labels) v = static_cast<std::int64_t>(r.u64());
    return labels;
}

void write_matrix(const ComplexSparseMatrix& m, const std::string& path) {
    Writer w(path);
    w.magic(kMagicMatrix);
    w.u64(m.n);
    w.u64(m.nnz());
    w.u64_array(m.row_ptr.data(), m.row_ptr.size());
    for (NodeId c : m.col_idx) w.u64(c);
    w.f64_array(m.re.data(), m.re.size());
    w.f64_array(m.im.data(), m.im.size());
    w.close();
}

ComplexSparseMatrix read_matrix(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicMatrix);
    ComplexSparseMatrix m;
    m.n = r.u64();
    const std::uint64_t nnz = r.u64();
    m.row_ptr.resize(m.n + 1);
    r.u64_array(m.row_ptr.data(), m.row_ptr.size());
    m.col_idx.resize(nnz);
    for (auto& c : m.col_idx) c = static_cast<NodeId>(r.u64());
    m.re.resize(nnz);
    m.im.resize(nnz);
    r.f64_array(m.re.data(), nnz);
    r.f64_array(m.im.data(), nnz);
    if (m.row_ptr.back() != nnz) throw FormatError(path + ": row pointer / nnz mismatch");
    return m;
}

void write_cache(const AggregatedFeatures& agg, const std::string& path) {
    Writer w(path);
    w.magic(kMagicCache);
    w.u64(agg.n);
    w.u64(agg.width);
    w.f64(agg.config.q);
    w.u64(agg.config.steps);
    w.u8(static_cast<std::uint8_t>(agg.config.aggregation));
    w.u64(agg.graph_fingerprint);
    w.f64_array(agg.real.values.data(), agg.real.values.size());
    w.f64_array(agg.imag.values.data(), agg.imag.values.size());
    w.close();
}

CacheHeader read_cache_header(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicCache);
    CacheHeader h;
    h.n = r.u64();
    h.width = r.u64();
    h.q = r.f64();
    h.steps = r.u64();
    h.aggregation = static_cast<Aggregation>(r.u8());
    h.graph_fingerprint = r.u64();
    return h;
}

AggregatedFeatures read_cache(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicCache);
    AggregatedFeatures agg;
    agg.n = r.u64();
    agg.width = r.u64();
    agg.config.q = r.f64();
    agg.config.steps = r.u64();
    agg.config.aggregation = static_cast<Aggregation>(r.u8());
    agg.graph_fingerprint = r.u64();
    agg.real = FeatureMatrix(agg.n, agg.width);
    agg.imag = FeatureMatrix(agg.n, agg.width);
    r.f64_array(agg.real.values.data(), agg.real.values.size());
    r.f64_array(agg.imag.values.data(), agg.imag.values.size());
    return agg;
}

AggregatedFeatures read_cache_checked(const std::string& path,
                                      std::uint64_t expected_fingerprint) {
    AggregatedFeatures agg = read_cache(path);
    if (agg.graph_fingerprint != expected_fingerprint) {
        throw StaleCacheError(path + ": cache was built from a different graph");
    }
    return agg;
}

void write_model(const LinearModel& model, const std::string& path) {
    Writer w(path);
    w.magic(kMagicModel);
    w.u64(model.d_in);
    w.u64(model.num_classes);
    w.u8(model.has_bias ? 1 : 0);
    // on-disk layout is d_in-major
    for (std::size_t j = 0; j < model.d_in; ++j) {
        for (std::size_t c = 0; c < model.num_classes; ++c) {
            w.f64(model.weights[c * model.d_in + j]);
        }
    }
    w.f64_array(model.bias.data(), model.bias.size());
    w.close();
}

LinearModel read_model(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMagicModel);
    const std::uint64_t d_in = r.u64();
    const std::uint64_t classes = r.u64();
    const std::uint8_t has_bias = r.u8();
    LinearModel model = LinearModel::zeros(d_in, classes, has_bias != 0);
    for (std::size_t j = 0; j < d_in; ++j) {
        for (std::size_t c = 0; c < classes; ++c) {
            model.weights[c * d_in + j] = r.f64();
        }
    }
    r.f64_array(model.bias.data(), model.bias.size());
    return model;
}

} // namespace lightdic::io
