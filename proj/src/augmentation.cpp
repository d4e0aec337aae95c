#include "qre/augmentation.hpp"

namespace qre {

namespace {

void require_dimensions(const QuantumPlant& plant, const CoherentController& ctrl) {
    plant.validate();
    ctrl.validate();
    if (ctrl.b_in.cols() != plant.C.rows())
        throw Error(ErrorCode::ShapeMismatch, "controller input width differs from plant output width");
}

} // namespace

AugmentedSystem augment(const QuantumPlant& plant, const CoherentController& ctrl) {
    if (ctrl.feedback_capable) throw Error(ErrorCode::WrongTopology, "feedback-capable controller passed to augment");
    if (plant.has_control_input())
        throw Error(ErrorCode::WrongTopology, "plant with a control input passed to augment");
    require_dimensions(plant, ctrl);

    const CMatrix& a  = plant.A.realization();
    const CMatrix& c  = plant.C.realization();
    const CMatrix& ac = ctrl.A.realization();

    AugmentedSystem s;
    s.topology     = Topology::no_feedback;
    s.plant_states = a.rows();
    s.ctrl_states  = ac.rows();

    const CMatrix z12 = zeros(a.rows(), ac.cols());
    const CMatrix bcc = ctrl.b_in * c;
    s.A = block2x2(a, z12, bcc, ac);

    const CMatrix bcd = ctrl.b_in * plant.D;
    s.B = vstack({&plant.B_dist, &bcd});

    const CMatrix dcc = ctrl.d_out * c;
    s.C = hstack({&dcc, &ctrl.c_out});
    s.D = ctrl.d_out * plant.D;

    const CMatrix lz = zeros(plant.L.rows(), ac.cols());
    s.L = hstack({&plant.L, &lz});
    return s;
}

AugmentedSystem augment_feedback(const QuantumPlant& plant, const CoherentController& ctrl) {
    if (!ctrl.feedback_capable) throw Error(ErrorCode::WrongTopology, "augment_feedback needs a feedback controller");
    if (!plant.has_control_input()) throw Error(ErrorCode::WrongTopology, "augment_feedback needs a control input");
    require_dimensions(plant, ctrl);
    if (ctrl.c_fb.rows() != plant.B_ctrl.cols())
        throw Error(ErrorCode::ShapeMismatch, "controller feedback output width differs from plant control input");

    const CMatrix& a  = plant.A.realization();
    const CMatrix& c  = plant.C.realization();
    const CMatrix& b1 = plant.B_dist;
    const CMatrix& b2 = plant.B_ctrl;
    const CMatrix& d  = plant.D;
    const CMatrix& ac = ctrl.A.realization();

    AugmentedSystem s;
    s.topology     = Topology::feedback;
    s.plant_states = a.rows();
    s.ctrl_states  = ac.rows();

    const CMatrix a11 = a + b2 * ctrl.d_fb_in * c;
    const CMatrix a12 = b2 * ctrl.c_fb;
    const CMatrix a21 = ctrl.b_in * c;
    s.A = block2x2(a11, a12, a21, ac);

    const CMatrix b11 = b1 + b2 * ctrl.d_fb_in * d;
    const CMatrix b12 = b2 * ctrl.d_fb_aux;
    const CMatrix b21 = ctrl.b_in * d;
    s.B = block2x2(b11, b12, b21, ctrl.b_aux);

    const CMatrix c1 = ctrl.d_out * c;
    s.C = hstack({&c1, &ctrl.c_out});
    const CMatrix d1 = ctrl.d_out * d;
    s.D = hstack({&d1, &ctrl.d_out_aux});

    const CMatrix lz = zeros(plant.L.rows(), ac.cols());
    s.L = hstack({&plant.L, &lz});
    return s;
}

AugmentedUncertainty lift_uncertainty(const UncertaintyModel& u, const QuantumPlant& plant,
                                      const CoherentController& ctrl, Topology topology) {
    u.validate();
    if (u.H1.rows() != plant.A.rows() || u.H3.rows() != plant.C.rows())
        throw Error(ErrorCode::ShapeMismatch, "uncertainty factors do not match the plant");
    if (u.G.cols() != plant.B_dist.cols())
        throw Error(ErrorCode::ShapeMismatch, "G does not match the plant disturbance input");
    if (ctrl.b_in.cols() != u.H3.rows())
        throw Error(ErrorCode::ShapeMismatch, "controller input width differs from H3 rows");

    const Index nc = ctrl.A.rows();
    AugmentedUncertainty out;
    out.f1 = u.f1;
    out.f2 = u.f2;

    const CMatrix ez = zeros(u.E.rows(), nc);
    out.E = hstack({&u.E, &ez});
    const CMatrix h2z = zeros(nc, u.H2.cols());
    out.H2 = vstack({&u.H2, &h2z});

    const CMatrix lower = ctrl.b_in * u.H3;
    if (topology == Topology::no_feedback) {
        if (ctrl.feedback_capable) throw Error(ErrorCode::WrongTopology, "no_feedback lift with feedback controller");
        out.H1 = vstack({&u.H1, &lower});
        out.H3 = ctrl.d_out * u.H3;
        out.G  = u.G;
    } else {
        if (!ctrl.feedback_capable || !plant.has_control_input())
            throw Error(ErrorCode::WrongTopology, "feedback lift needs a feedback controller and control input");
        const CMatrix upper = u.H1 + plant.B_ctrl * ctrl.d_fb_in * u.H3;
        out.H1 = vstack({&upper, &lower});
        out.H3 = ctrl.d_out * u.H3;
        const CMatrix gz = zeros(u.G.rows(), ctrl.b_aux.cols());
        out.G = hstack({&u.G, &gz});
    }
    return out;
}

} // namespace qre
