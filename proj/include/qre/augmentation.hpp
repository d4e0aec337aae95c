#pragma once

#include "qre/quantum_model.hpp"
#include "qre/uncertainty.hpp"

namespace qre {

enum class Topology { no_feedback, feedback };

// Plant + coherent controller with state (a, a^#, a_c, a_c^#).
// Input ordering: no_feedback -> (A, A^#); feedback -> (A, A^#, A~, A~^#).
struct AugmentedSystem {
    CMatrix  A;
    CMatrix  B;
    CMatrix  C;
    CMatrix  D;
    CMatrix  L;
    Topology topology    = Topology::no_feedback;
    Index    plant_states = 0; // 2n
    Index    ctrl_states  = 0; // 2n_c
};

// Lifted factors share F1, F2 with the plant model, so they reuse its type.
using AugmentedUncertainty = UncertaintyModel;

// A_a = [[A, 0], [B_c C, A_c]], B_a = [B; B_c D], C_a = [D_c C, C_c], D_a = D_c D, L_a = [L, 0].
// Throws WrongTopology for a feedback-capable controller or a plant with a control input.
[[nodiscard]] AugmentedSystem augment(const QuantumPlant& plant, const CoherentController& ctrl);

// A_a = [[A + B2 Dc2 C, B2 C_c], [B_c2 C, A_c]],
// B_a = [[B1 + B2 Dc2 D, B2 Dc1], [B_c2 D, B_c1]],
// C_a = [D~c2 C, C~_c], D_a = [D~c2 D, D~c1].
[[nodiscard]] AugmentedSystem augment_feedback(const QuantumPlant& plant, const CoherentController& ctrl);

// no_feedback: H_a1 = [H1; B_c H3], H_a2 = [H2; 0], H_a3 = D_c H3, E_a = [E, 0], G_a = G.
// feedback:    H_a1 = [H1 + B2 Dc2 H3; B_c2 H3], H_a2 = [H2; 0], H_a3 = D~c2 H3,
//              E_a = [E, 0], G_a = [G, 0].
[[nodiscard]] AugmentedUncertainty lift_uncertainty(const UncertaintyModel& u, const QuantumPlant& plant,
                                                    const CoherentController& ctrl, Topology topology);

} // namespace qre
