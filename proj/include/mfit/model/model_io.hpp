/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/model/model_io.hpp
 *
 * Copyright 2026 The mfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MFIT_MODEL_MODEL_IO_HPP
#define MFIT_MODEL_MODEL_IO_HPP

#include "mfit/core/types.hpp"
#include "mfit/model/model_basis.hpp"

#include "json.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mfit {
namespace model {

/*
 * Binary model container, all integers and floats little-endian:
 *
 *   char[4]  magic "MFIT"
 *   u32      version (1)
 *   u32      V, N_alpha, N_beta
 *   sections, each a u64 element count followed by the elements:
 *     mean               f64[3V]
 *     shape_basis        f64[3V * N_alpha], column-major
 *     expr_basis         f64[3V * N_beta], column-major
 *     shape_eigenvalues  f64[N_alpha]
 *     expr_eigenvalues   f64[N_beta]
 *     landmark_indices   u32[68]
 *     triangles          u32[3T]
 *     nose_tip_index     u32[1]
 */
inline constexpr char model_magic[4] = {'M', 'F', 'I', 'T'};
inline constexpr std::uint32_t model_format_version = 1;

namespace detail {

class ByteWriter
{
public:
    void raw(const char* data, std::size_t size) { bytes_.insert(bytes_.end(), data, data + size); }

    void u32(std::uint32_t value)
    {
        for (int i = 0; i < 4; ++i)
            bytes_.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
    }

    void u64(std::uint64_t value)
    {
        for (int i = 0; i < 8; ++i)
            bytes_.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
    }

    void f64(double value) { u64(std::bit_cast<std::uint64_t>(value)); }

    std::vector<char> take() { return std::move(bytes_); }

private:
    std::vector<char> bytes_;
};

class ByteReader
{
public:
    explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

    void raw(char* out, std::size_t size, const char* section)
    {
        require(size, section);
        std::memcpy(out, bytes_.data() + pos_, size);
        pos_ += size;
    }

    std::uint32_t u32(const char* section)
    {
        require(4, section);
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i)
            value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return value;
    }

    std::uint64_t u64(const char* section)
    {
        require(8, section);
        std::uint64_t value = 0;
        for (int i = 0; i < 8; ++i)
            value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return value;
    }

    double f64(const char* section) { return std::bit_cast<double>(u64(section)); }

    bool at_end() const { return pos_ == bytes_.size(); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void require(std::size_t size, const char* section) const
    {
        if (bytes_.size() - pos_ < size)
            throw FormatError(std::string("model file truncated: missing data in section '") + section + "'");
    }

    std::span<const char> bytes_;
    std::size_t pos_ = 0;
};

inline std::uint64_t read_count(ByteReader& in, const char* section, std::uint64_t expected, const char* what,
                                std::size_t element_size)
{
    const std::uint64_t count = in.u64(section);
    if (count != expected)
    {
        throw FormatError(std::string("model file section '") + section + "' has " + std::to_string(count) +
                          " entries, expected " + std::to_string(expected) + " (" + what + ")");
    }
    if (count > in.remaining() / element_size)
        throw FormatError(std::string("model file truncated: missing data in section '") + section + "'");
    return count;
}

inline void write_doubles(ByteWriter& out, const double* data, std::size_t count)
{
    out.u64(count);
    for (std::size_t i = 0; i < count; ++i)
        out.f64(data[i]);
}

inline void read_doubles(ByteReader& in, double* data, std::uint64_t count, const char* section)
{
    for (std::uint64_t i = 0; i < count; ++i)
        data[i] = in.f64(section);
}

inline std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const char> bytes)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "' for writing");
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file)
        throw FormatError("failed writing '" + path.string() + "'");
}

inline std::uint32_t checked_u32(std::uint64_t value, const char* what)
{
    if (value > std::numeric_limits<std::uint32_t>::max())
        throw InvalidInput(std::string(what) + " does not fit the model format");
    return static_cast<std::uint32_t>(value);
}

} /* namespace detail */

/// Serialises \p basis into the binary container described above.
inline std::vector<char> encode_model(const ModelBasis& basis)
{
    validate(basis);
    detail::ByteWriter out;
    out.raw(model_magic, 4);
    out.u32(model_format_version);
    out.u32(detail::checked_u32(basis.num_vertices(), "vertex count"));
    out.u32(detail::checked_u32(basis.num_shape(), "shape component count"));
    out.u32(detail::checked_u32(basis.num_expr(), "expression component count"));
    detail::write_doubles(out, basis.mean.data(), basis.mean.size());
    detail::write_doubles(out, basis.shape_basis.data(), basis.shape_basis.size());
    detail::write_doubles(out, basis.expr_basis.data(), basis.expr_basis.size());
    detail::write_doubles(out, basis.shape_eigenvalues.data(), basis.shape_eigenvalues.size());
    detail::write_doubles(out, basis.expr_eigenvalues.data(), basis.expr_eigenvalues.size());
    out.u64(basis.landmark_indices.size());
    for (int index : basis.landmark_indices)
        out.u32(static_cast<std::uint32_t>(index));
    out.u64(3 * basis.triangles.size());
    for (const auto& tri : basis.triangles)
    {
        for (int v : tri)
            out.u32(static_cast<std::uint32_t>(v));
    }
    out.u64(1);
    out.u32(static_cast<std::uint32_t>(basis.nose_tip_index));
    return out.take();
}

/// Parses the binary container. Throws FormatError naming the offending section.
inline ModelBasis decode_model(std::span<const char> bytes)
{
    detail::ByteReader in(bytes);
    char magic[4];
    in.raw(magic, 4, "header");
    if (std::memcmp(magic, model_magic, 4) != 0)
        throw FormatError("not a model file: bad magic");
    const std::uint32_t version = in.u32("header");
    if (version != model_format_version)
        throw FormatError("unsupported model format version " + std::to_string(version));
    const std::uint64_t v = in.u32("header");
    const std::uint64_t na = in.u32("header");
    const std::uint64_t nb = in.u32("header");
    if (v == 0)
        throw FormatError("model file declares zero vertices");

    // Every f64 section must fit in the file, which also bounds the products below.
    const auto fits = [&](std::uint64_t n, const char* section) {
        if (n > bytes.size())
            throw FormatError(std::string("model file truncated: missing data in section '") + section + "'");
    };
    fits(v, "mean");
    fits(na, "shape_basis");
    fits(nb, "expr_basis");

    ModelBasis basis;
    detail::read_count(in, "mean", 3 * v, "3*V", 8);
    basis.mean.resize(static_cast<Eigen::Index>(3 * v));
    detail::read_doubles(in, basis.mean.data(), 3 * v, "mean");

    detail::read_count(in, "shape_basis", 3 * v * na, "3*V*N_alpha", 8);
    basis.shape_basis.resize(static_cast<Eigen::Index>(3 * v), static_cast<Eigen::Index>(na));
    detail::read_doubles(in, basis.shape_basis.data(), 3 * v * na, "shape_basis");

    detail::read_count(in, "expr_basis", 3 * v * nb, "3*V*N_beta", 8);
    basis.expr_basis.resize(static_cast<Eigen::Index>(3 * v), static_cast<Eigen::Index>(nb));
    detail::read_doubles(in, basis.expr_basis.data(), 3 * v * nb, "expr_basis");

    detail::read_count(in, "shape_eigenvalues", na, "N_alpha", 8);
    basis.shape_eigenvalues.resize(static_cast<Eigen::Index>(na));
    detail::read_doubles(in, basis.shape_eigenvalues.data(), na, "shape_eigenvalues");

    detail::read_count(in, "expr_eigenvalues", nb, "N_beta", 8);
    basis.expr_eigenvalues.resize(static_cast<Eigen::Index>(nb));
    detail::read_doubles(in, basis.expr_eigenvalues.data(), nb, "expr_eigenvalues");

    detail::read_count(in, "landmark_indices", num_landmarks, "landmark count", 4);
    basis.landmark_indices.resize(num_landmarks);
    for (auto& index : basis.landmark_indices)
        index = static_cast<int>(in.u32("landmark_indices"));

    const std::uint64_t triangle_entries = in.u64("triangles");
    if (triangle_entries % 3 != 0)
        throw FormatError("model file section 'triangles' length is not a multiple of 3");
    if (triangle_entries > in.remaining() / 4)
        throw FormatError("model file truncated: missing data in section 'triangles'");
    basis.triangles.resize(triangle_entries / 3);
    for (auto& tri : basis.triangles)
    {
        for (int& vertex : tri)
            vertex = static_cast<int>(in.u32("triangles"));
    }

    detail::read_count(in, "nose_tip_index", 1, "single index", 4);
    basis.nose_tip_index = static_cast<int>(in.u32("nose_tip_index"));
    if (!in.at_end())
        throw FormatError("trailing bytes after model data");

    try
    {
        validate(basis);
    } catch (const InvalidInput& e)
    {
        throw FormatError(e.what());
    }
    return basis;
}

/// JSON mirror of the binary container, meant for small hand-written fixtures.
inline nlohmann::json model_to_json(const ModelBasis& basis)
{
    validate(basis);
    const auto vector = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    const auto columns = [&](const Eigen::MatrixXd& m) {
        nlohmann::json cols = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            cols.push_back(vector(m.col(c)));
        return cols;
    };
    nlohmann::json j;
    j["format"] = "mfit-model";
    j["format_version"] = model_format_version;
    j["num_vertices"] = basis.num_vertices();
    j["mean"] = vector(basis.mean);
    j["shape_basis"] = columns(basis.shape_basis);
    j["expr_basis"] = columns(basis.expr_basis);
    j["shape_eigenvalues"] = vector(basis.shape_eigenvalues);
    j["expr_eigenvalues"] = vector(basis.expr_eigenvalues);
    j["landmark_indices"] = basis.landmark_indices;
    j["triangles"] = basis.triangles;
    j["nose_tip_index"] = basis.nose_tip_index;
    return j;
}

inline ModelBasis model_from_json(const nlohmann::json& j)
{
    const auto field = [&](const char* name) -> const nlohmann::json& {
        if (!j.contains(name))
            throw FormatError(std::string("model JSON is missing field '") + name + "'");
        return j.at(name);
    };
    try
    {
        if (field("format_version").get<std::uint32_t>() != model_format_version)
            throw FormatError("unsupported model format version");
        const auto num_vertices = field("num_vertices").get<Eigen::Index>();
        const auto vector = [](const nlohmann::json& a) {
            const auto values = a.get<std::vector<double>>();
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
        };
        const auto columns = [&](const char* name) {
            const auto& cols = field(name);
            Eigen::MatrixXd m(3 * num_vertices, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c)
            {
                const Eigen::VectorXd col = vector(cols[c]);
                if (col.size() != 3 * num_vertices)
                    throw FormatError(std::string("model JSON '") + name + "' column " + std::to_string(c) + " has " +
                                      std::to_string(col.size()) + " entries, expected 3*V");
                m.col(static_cast<Eigen::Index>(c)) = col;
            }
            return m;
        };
        ModelBasis basis;
        basis.mean = vector(field("mean"));
        if (basis.mean.size() != 3 * num_vertices)
            throw FormatError("model JSON 'mean' has " + std::to_string(basis.mean.size()) + " entries, expected 3*V");
        basis.shape_basis = columns("shape_basis");
        basis.expr_basis = columns("expr_basis");
        basis.shape_eigenvalues = vector(field("shape_eigenvalues"));
        basis.expr_eigenvalues = vector(field("expr_eigenvalues"));
        basis.landmark_indices = field("landmark_indices").get<std::vector<int>>();
        basis.triangles = field("triangles").get<std::vector<Triangle>>();
        basis.nose_tip_index = field("nose_tip_index").get<int>();
        validate(basis);
        return basis;
    } catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("malformed model JSON: ") + e.what());
    } catch (const InvalidInput& e)
    {
        throw FormatError(e.what());
    }
}

/**
 * Loads a model from \p path. Files starting with the "MFIT" magic are read as
 * the binary container, anything else as the JSON mirror.
 */
inline ModelBasis load_model(const std::filesystem::path& path)
{
    const std::vector<char> bytes = detail::read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), model_magic, 4) == 0)
        return decode_model(bytes);
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e)
    {
        throw FormatError("'" + path.string() + "' is neither a binary model nor valid JSON: " + e.what());
    }
    return model_from_json(j);
}

/// Saves \p basis; a ".json" extension selects the JSON mirror, anything else the binary container.
inline void save_model(const ModelBasis& basis, const std::filesystem::path& path)
{
    if (path.extension() == ".json")
    {
        const std::string text = model_to_json(basis).dump();
        detail::write_file(path, std::span<const char>(text.data(), text.size()));
        return;
    }
    const std::vector<char> bytes = encode_model(basis);
    detail::write_file(path, bytes);
}

} /* namespace model */
} /* namespace mfit */

#endif /* MFIT_MODEL_MODEL_IO_HPP */
