#pragma once

#include "dqml/rng.hpp"
#include "dqml/statevector.hpp"

namespace dqml {

// Haar-distributed unitary of the given dimension: complex Ginibre matrix,
// QR orthonormalization, column phases fixed by the sign of diag(R).
// Deterministic for a given rng state.
GateMatrix haar_unitary(int dimension, Rng& rng);

}  // namespace dqml
