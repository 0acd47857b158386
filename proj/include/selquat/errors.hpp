#pragma once

#include <stdexcept>
#include <string>

namespace selquat {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Bad arguments: violated preconditions, mismatched fields, unparsable input. */
struct input_error : error {
    using error::error;
};

/* The computation is exact but was refused because it exceeds a configured
 * bound (discriminant size, search space, factorization bound). */
struct resource_error : error {
    using error::error;
};

/* The decision theorems are silent on this input; reports which hypothesis
 * failed.  coprime_disc_level: discriminant of the quadratic order vs. the
 * level ideal.  level_coprime_ramification: level ideal vs. the algebra's
 * finite ramification. */
struct assumptions_error : error {
    bool coprime_disc_level;
    bool level_coprime_ramification;
    assumptions_error(std::string const& msg, bool cdl, bool lcr)
        : error(msg), coprime_disc_level(cdl), level_coprime_ramification(lcr)
    {
    }
};

struct eichler_error : error {
    using error::error;
};

/* An internal consistency check failed (e.g. odd ramification parity). */
struct internal_error : error {
    using error::error;
};

} // namespace selquat
