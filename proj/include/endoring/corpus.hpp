#pragma once

#include <random>
#include <string>
#include <vector>

#include "endoring/endokit.hpp"

namespace endoring {

/// Fixed list of test groups covering periodic, mixed, critical and
/// non-FTFR shapes.
std::vector<GroupRef> corpus_groups();
GroupRef corpus_group(const std::string& name);

/// Random torsion element of order dividing p^k, supported on copies
/// below `copy_limit`.
Element random_torsion(const GroupDesc& g, Prime p, unsigned k, std::mt19937_64& rng, std::uint64_t copy_limit = 2);
/// Random rational with denominator prime to p (small height).
Rational random_p_integral(Prime p, std::mt19937_64& rng);

/// Random finitary endomorphism (finite blocks and fin entries only).
Endo random_finitary(GroupRef g, std::mt19937_64& rng, std::size_t entries = 2);
/// Random inertial endomorphism: scalar data satisfying every rule plus
/// random finitary noise.
Endo random_inertial(GroupRef g, std::mt19937_64& rng, bool with_fin = true);
/// Random uniform inertial endomorphism (FTFR groups).
Endo random_uniform(GroupRef g, std::mt19937_64& rng, bool with_fin = true);

std::string corpus_dir();
/// Sorted paths of the designed corpus files.
std::vector<std::string> corpus_files();

}  // namespace endoring
