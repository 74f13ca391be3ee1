/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/io/obj.hpp
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

#ifndef MFIT_IO_OBJ_HPP
#define MFIT_IO_OBJ_HPP

#include "mfit/core/types.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace mfit {
namespace io {

/// Wavefront OBJ text: "v x y z" with 6 decimals, then 1-based "f a b c" lines.
inline std::string to_obj(const Mesh& mesh)
{
    if (mesh.num_vertices() == 0)
        throw InvalidInput("cannot export an empty mesh");
    std::string out;
    char line[128];
    for (int i = 0; i < mesh.num_vertices(); ++i)
    {
        std::snprintf(line, sizeof(line), "v %.6f %.6f %.6f\n", mesh.vertices(0, i), mesh.vertices(1, i),
                      mesh.vertices(2, i));
        out += line;
    }
    for (const auto& tri : mesh.triangles)
    {
        std::snprintf(line, sizeof(line), "f %d %d %d\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
        out += line;
    }
    return out;
}

inline void export_obj(const Mesh& mesh, const std::filesystem::path& path)
{
    const std::string text = to_obj(mesh);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "' for writing");
    file << text;
    if (!file)
        throw FormatError("failed writing '" + path.string() + "'");
}

/**
 * Minimal OBJ reader: vertex positions and triangular faces. Face entries may
 * use the "v/vt/vn" form; only the vertex index is kept. Other records are skipped.
 */
inline Mesh parse_obj(std::istream& in)
{
    std::vector<double> coords;
    std::vector<Triangle> triangles;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line))
    {
        ++line_number;
        std::istringstream record(line);
        std::string tag;
        if (!(record >> tag))
            continue;
        if (tag == "v")
        {
            double x, y, z;
            if (!(record >> x >> y >> z))
                throw FormatError("OBJ line " + std::to_string(line_number) + ": malformed vertex");
            coords.insert(coords.end(), {x, y, z});
        } else if (tag == "f")
        {
            Triangle tri;
            for (int& index : tri)
            {
                std::string token;
                if (!(record >> token))
                    throw FormatError("OBJ line " + std::to_string(line_number) + ": face needs 3 vertices");
                try
                {
                    index = std::stoi(token.substr(0, token.find('/'))) - 1;
                } catch (const std::exception&)
                {
                    throw FormatError("OBJ line " + std::to_string(line_number) + ": bad face index '" + token + "'");
                }
            }
            triangles.push_back(tri);
        }
    }
    Mesh mesh;
    mesh.vertices = Eigen::Map<const Eigen::Matrix3Xd>(coords.data(), 3, static_cast<Eigen::Index>(coords.size() / 3));
    mesh.triangles = std::move(triangles);
    for (const auto& tri : mesh.triangles)
    {
        for (int v : tri)
        {
            if (v < 0 || v >= mesh.num_vertices())
                throw FormatError("OBJ face references vertex " + std::to_string(v + 1) + " out of range");
        }
    }
    return mesh;
}

inline Mesh load_obj(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw FormatError("cannot open OBJ file '" + path.string() + "'");
    return parse_obj(file);
}

} /* namespace io */
} /* namespace mfit */

#endif /* MFIT_IO_OBJ_HPP */
