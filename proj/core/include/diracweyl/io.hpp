#ifndef DIRACWEYL_IO_HPP
#define DIRACWEYL_IO_HPP

#include <filesystem>
#include <string>

#include "diracweyl/direct.hpp"
#include "diracweyl/transform.hpp"
#include "diracweyl/types.hpp"

namespace diracweyl {

// Potential files:  "# m1,m2,L,n,layout=midpoint", rows  x, Re v11, Im v11, Re v12, ...
// Weyl files:       "# m1,m2,eta,a,nz", rows  zeta, Re phi11, Im phi11, ..., converged
// Phi1 files:       "# m1,m2,L,n,layout=half-grid", "# origin, Re, Im, ...", rows on
//                   y = k h/2: y, Phi1 entries, Phi1' entries (nan at nodes).
// Matrix entries are written row-major as (Re, Im) pairs.

PotentialProfile read_potential(const std::filesystem::path& path);
void write_potential(const std::filesystem::path& path, const PotentialProfile& v);

WeylSamples read_weyl(const std::filesystem::path& path);
void write_weyl(const std::filesystem::path& path, const WeylSamples& w);

Phi1Profile read_phi1(const std::filesystem::path& path);
void write_phi1(const std::filesystem::path& path, const Phi1Profile& p);

/// Writes to a temporary sibling and renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

}  // namespace diracweyl

#endif  // DIRACWEYL_IO_HPP
