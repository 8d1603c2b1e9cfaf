#include "rmdp/ambiguity.hpp"

#include <stdexcept>
#include <string>

namespace rmdp {

AmbiguitySet AmbiguitySet::create(std::vector<std::vector<numvec>> nominal,
                                  std::vector<numvec> psi,
                                  std::vector<std::vector<supportvec>> support) {
    AmbiguitySet set;
    set.num_states = long(nominal.size());
    set.num_actions = set.num_states > 0 ? long(nominal[0].size()) : 0;
    set.nominal = std::move(nominal);
    set.psi = std::move(psi);
    set.support = std::move(support);
    for (auto& row : set.psi)
        for (prec_t& r : row) r = std::clamp(r, prec_t(0), prec_t(2));
    set.validate();
    return set;
}

AmbiguitySet AmbiguitySet::nominal_only(std::vector<std::vector<numvec>> nominal) {
    const long s = long(nominal.size());
    const long a = s > 0 ? long(nominal[0].size()) : 0;
    return create(std::move(nominal), std::vector<numvec>(s, numvec(a, 0.0)));
}

void AmbiguitySet::validate() const {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("ambiguity: empty set family");
    if (long(nominal.size()) != num_states || long(psi.size()) != num_states)
        throw std::invalid_argument("ambiguity: wrong state count");
    if (has_support() && long(support.size()) != num_states)
        throw std::invalid_argument("ambiguity: wrong support mask state count");
    for (long s = 0; s < num_states; ++s) {
        if (long(nominal[s].size()) != num_actions ||
            long(psi[s].size()) != num_actions ||
            (has_support() && long(support[s].size()) != num_actions))
            throw std::invalid_argument("ambiguity: wrong action count in state " +
                                        std::to_string(s));
        for (long a = 0; a < num_actions; ++a) {
            check_probability_vector(nominal[s][a], "ambiguity: nominal row", 1e-9);
            if (long(nominal[s][a].size()) != num_states)
                throw std::invalid_argument("ambiguity: nominal row length mismatch");
            if (psi[s][a] < 0 || psi[s][a] > 2)
                throw std::invalid_argument("ambiguity: psi outside [0,2]");
            if (has_support()) {
                if (long(support[s][a].size()) != num_states)
                    throw std::invalid_argument("ambiguity: mask length mismatch");
                for (long sp = 0; sp < num_states; ++sp)
                    if (!support[s][a][sp] && nominal[s][a][sp] != 0.0)
                        throw std::invalid_argument(
                            "ambiguity: nominal mass on masked-out state");
            }
        }
    }
}

}  // namespace rmdp
