#pragma once

#include "rmdp/definitions.hpp"

#include <cstdint>

namespace rmdp {

/// Boolean successor mask; true marks states the transition may reach.
using supportvec = std::vector<std::uint8_t>;

/// An s,a-rectangular family of L1 balls: for every state-action pair a
/// nominal distribution and a radius in [0,2]. An optional support mask
/// restricts each ball to a subset of successor states (states outside
/// the mask carry zero probability).
struct AmbiguitySet {
    long num_states = 0;
    long num_actions = 0;
    std::vector<std::vector<numvec>> nominal;  // [s][a][s']
    std::vector<numvec> psi;                   // [s][a]
    std::vector<std::vector<supportvec>> support;  // empty when unrestricted

    bool has_support() const { return !support.empty(); }

    /// Validates shapes and invariants; radii are clamped to [0,2] since
    /// 2 is the L1 diameter of the simplex.
    static AmbiguitySet create(std::vector<std::vector<numvec>> nominal,
                               std::vector<numvec> psi,
                               std::vector<std::vector<supportvec>> support = {});

    /// Ball family with zero radius around the given model; the robust
    /// problem then degenerates to the nominal one.
    static AmbiguitySet nominal_only(std::vector<std::vector<numvec>> nominal);

    void validate() const;
};

}  // namespace rmdp
