#pragma once

#include <string>
#include <vector>

namespace fbhcli {

/// x,y,e CSV -> colored-cell heat map. Throws on malformed input.
void svg_heatmap(const std::string& csv_path, const std::string& svg_path);

/// m,R,...,energy,... CSV -> energy vs R, one polyline per m.
void svg_neck_lines(const std::string& csv_path, const std::string& svg_path);

/// x,density CSV plus atom positions/weights -> boundary measure plot with
/// circle markers at the atoms.
void svg_boundary_measure(const std::string& csv_path, const std::vector<double>& atom_x,
                          const std::vector<double>& atom_w, const std::string& svg_path);

}  // namespace fbhcli
