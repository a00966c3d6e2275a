#pragma once

#include <stdexcept>
#include <string>

namespace tnet {

// Thrown when a request exceeds a configured capacity: a guest train that does
// not fit into a host's zero padding (bond = first offending bond index) or a
// dense conversion over its row cap (bond = -1).
struct CapacityError : std::runtime_error {
    int bond;
    CapacityError(int bond_, const std::string& msg) : std::runtime_error(msg), bond(bond_) {}
};

// Thrown when a local Krylov solve inside a sweep fails to converge; carries
// the 1-based site index the sweep was working on.
struct IntegratorError : std::runtime_error {
    int site;
    IntegratorError(int site_, const std::string& msg) : std::runtime_error(msg), site(site_) {}
};

}  // namespace tnet
