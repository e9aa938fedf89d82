#pragma once

#include "mivkit/device_model.hpp"

namespace mivkit::testing {

// Reference parameter set P0 used by the golden-value tests. The frozen
// expected values in the tests come from tests/oracle/golden_values.py,
// which re-evaluates the equations independently at 50-digit precision.
inline ModelParams reference_params() {
    ModelParams p;
    p.vth0 = 0.35;
    p.delvt = 0.012;
    p.u0 = 0.03;
    p.ua = 0.25;
    p.ub = 0.04;
    p.ud = 0.015;
    p.ucs = 1.4;
    p.cdsc = 0.06;
    p.cdscd = 0.04;
    p.dvt0 = 0.4;
    p.dvt1 = 0.6;
    p.etab = 0.045;
    p.vsat = 1.1e5;
    p.pvag = 0.15;
    p.ckappa = 0.6;
    p.cf = 1.5e-17;
    p.cgso = 9e-11;
    p.cgdo = 9e-11;
    p.cgsl = 4e-11;
    p.cgdl = 4e-11;
    p.moin = 5.0;
    p.polarity = Polarity::n;
    return p;
}

}  // namespace mivkit::testing
