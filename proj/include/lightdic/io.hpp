#pragma once

#include "lightdic/feature_matrix.hpp"
#include "lightdic/magnetic.hpp"
#include "lightdic/model.hpp"
#include "lightdic/propagation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lightdic::io {

/// LDCF dtype tags.
enum class DType : std::uint8_t { F64 = 0, F32 = 1, I64 = 2 };

// --- LDCF: dense feature / label container ---------------------------------
// magic "LDCFv001", u64 rows, u64 cols, u8 dtype, raw row-major payload (LE).

void write_features(const FeatureMatrix& m, const std::string& path, DType dtype = DType::F64);
FeatureMatrix read_features(const std::string& path); // f32 payloads widen to f64

void write_labels(const std::vector<std::int64_t>& labels, const std::string& path);
std::vector<std::int64_t> read_labels(const std::string& path);

// --- LDCM: Hermitian sparse matrix dump -------------------------------------
// magic "LDCMv001", u64 n, u64 nnz, row-ptr (u64 x n+1), col-idx (u64 x nnz),
// re (f64 x nnz), im (f64 x nnz).

void write_matrix(const ComplexSparseMatrix& m, const std::string& path);
ComplexSparseMatrix read_matrix(const std::string& path);

// --- LDCP: propagated-feature cache ------------------------------------------
// magic "LDCPv001", u64 n, u64 f', f64 q, u64 K, u8 aggregation tag,
// u64 graph fingerprint, real plane, imaginary plane (f64 row-major).

void write_cache(const AggregatedFeatures& agg, const std::string& path);
AggregatedFeatures read_cache(const std::string& path);

/// Read + fingerprint guard; throws StaleCacheError on mismatch.
AggregatedFeatures read_cache_checked(const std::string& path, std::uint64_t expected_fingerprint);

/// Header-only peek (no payload read).
struct CacheHeader {
    std::uint64_t n = 0;
    std::uint64_t width = 0;
    double q = 0.0;
    std::uint64_t steps = 0;
    Aggregation aggregation = Aggregation::Last;
    std::uint64_t graph_fingerprint = 0;
};
CacheHeader read_cache_header(const std::string& path);

// --- LDCW: model checkpoint --------------------------------------------------
// magic "LDCWv001", u64 d_in, u64 classes, u8 has_bias, W row-major
// (d_in x classes, f64), bias (classes x f64).

void write_model(const LinearModel& model, const std::string& path);
LinearModel read_model(const std::string& path);

} // namespace lightdic::io
