// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simhmimo {

void SimGeometry::validate() const {
    if (side_count < 1) throw std::invalid_argument("geometry: side_count must be >= 1");
    if (layer_count < 1) throw std::invalid_argument("geometry: layer_count must be >= 1");
    if (antenna_count < 1) throw std::invalid_argument("geometry: antenna_count must be >= 1");
    if (!(element_spacing > 0.0))
        throw std::invalid_argument("geometry: element_spacing must be > 0");
    if (!(thickness > 0.0)) throw std::invalid_argument("geometry: thickness must be > 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("geometry: wavelength must be > 0");
    if (!(element_area > 0.0)) throw std::invalid_argument("geometry: element_area must be > 0");
}

SimGeometry SimGeometry::square(int side_count, int layer_count, double element_spacing,
                                double thickness, int antenna_count, double wavelength) {
    SimGeometry g;
    g.side_count = side_count;
    g.layer_count = layer_count;
    g.element_spacing = element_spacing;
    g.thickness = thickness;
    g.antenna_count = antenna_count;
    g.wavelength = wavelength;
    g.element_area = element_spacing * element_spacing;
    g.validate();
    return g;
}

LatticeIndex atom_plane_indices(int m, int side_count) {
    if (side_count < 1 || m < 1 || m > side_count * side_count) {
        throw std::out_of_range("atom index " + std::to_string(m) + " outside [1, " +
                                std::to_string(side_count * side_count) + "]");
    }
    return {(m - 1) % side_count + 1, (m + side_count - 1) / side_count};
}

double intra_surface_distance(int m, int m_other, const SimGeometry& geometry) {
    const auto a = atom_plane_indices(m, geometry.side_count);
    const auto b = atom_plane_indices(m_other, geometry.side_count);
    const double dz = a.z - b.z;
    const double dx = a.x - b.x;
    return geometry.element_spacing * std::sqrt(dz * dz + dx * dx);
}

double inter_layer_distance(int m, int m_other, const SimGeometry& geometry) {
    const double r = intra_surface_distance(m, m_other, geometry);
    const double d = geometry.layer_spacing();
    return std::sqrt(r * r + d * d);
}

double antenna_to_surface_distance(int s, int m, const SimGeometry& geometry, Side side) {
    if (s < 1 || s > geometry.antenna_count) {
        throw std::out_of_range("antenna index " + std::to_string(s) + " outside [1, " +
                                std::to_string(geometry.antenna_count) + "]");
    }
    const auto idx = atom_plane_indices(m, geometry.side_count);
    const double center = (geometry.side_count + 1) / 2.0;
    const double antenna_offset = (s - (geometry.antenna_count + 1) / 2.0) * geometry.wavelength / 2.0;
    const double vertical = (idx.z - center) * geometry.element_spacing - antenna_offset;
    const double horizontal = side == Side::Transmit ? (idx.x - center) * geometry.element_spacing
                                                     : (center - idx.x) * geometry.element_spacing;
    const double d = geometry.layer_spacing();
    return std::sqrt(vertical * vertical + horizontal * horizontal + d * d);
}

}  // namespace simhmimo
