// SPDX-License-Identifier: Apache-2.0
//
// Meta-atom lattice layout of one stacked metasurface and its antenna array.

#pragma once

namespace simhmimo {

enum class Side { Transmit, Receive };

/// Physical layout of one SIM stack plus the antenna array feeding it.
///
/// Every layer is a square side_count x side_count lattice with uniform
/// element spacing; layers are parallel and equally spaced across the stack
/// thickness. Atom and antenna indices in the public API are 1-based.
struct SimGeometry {
    int side_count = 4;
    int layer_count = 2;
    double element_spacing = 0.025;  // meters
    double thickness = 0.04;         // meters
    int antenna_count = 4;
    double wavelength = 0.05;        // meters
    double element_area = 0.025 * 0.025;

    int atoms_per_layer() const { return side_count * side_count; }
    double layer_spacing() const { return thickness / layer_count; }

    /// Throws std::invalid_argument when any field is out of range.
    void validate() const;

    /// Layout with element_area set to one lattice cell (spacing squared).
    static SimGeometry square(int side_count, int layer_count, double element_spacing,
                              double thickness, int antenna_count, double wavelength);
};

struct LatticeIndex {
    int x = 0;  // column, 1..side_count
    int z = 0;  // row, 1..side_count

    friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

/// Column/row of atom m (1-based) on a side_count-wide lattice.
LatticeIndex atom_plane_indices(int m, int side_count);

/// Distance between atoms m and m_other on the same layer.
double intra_surface_distance(int m, int m_other, const SimGeometry& geometry);

/// Distance from atom m_other on one layer to atom m on the next layer.
double inter_layer_distance(int m, int m_other, const SimGeometry& geometry);

/// Distance between antenna s of the centered half-wavelength linear array
/// and atom m of the adjacent layer. The receive form mirrors the x offset.
double antenna_to_surface_distance(int s, int m, const SimGeometry& geometry, Side side);

}  // namespace simhmimo
