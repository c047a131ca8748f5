#pragma once

#include <cmath>
#include <string>

#include "obscert/errors.hpp"

namespace obscert {

// Time-integrability index r in [1, inf]. r = inf is an enumerated state,
// never a float infinity inside exponent arithmetic: T^{1/r} is defined as 1
// and time norms degrade to a max.
class LrIndex {
public:
    static LrIndex finite(double r) {
        if (!(r >= 1.0) || std::isinf(r))
            throw InvalidParams("LrIndex: r must be in [1,inf), got " + std::to_string(r));
        LrIndex idx;
        idx.inf_ = false;
        idx.r_ = r;
        return idx;
    }
    static LrIndex inf() {
        LrIndex idx;
        idx.inf_ = true;
        return idx;
    }
    // Accepts float infinity at the parsing boundary only.
    static LrIndex from_double(double r) { return std::isinf(r) ? inf() : finite(r); }

    bool is_inf() const { return inf_; }
    double value() const {
        if (inf_) throw InvalidParams("LrIndex: value() on r=inf");
        return r_;
    }
    // 1/r with the r=inf convention 1/r = 0.
    double reciprocal() const { return inf_ ? 0.0 : 1.0 / r_; }
    // T^{1/r} with the convention T^{1/r} = 1 if r = inf.
    double t_pow(double T) const { return inf_ ? 1.0 : std::pow(T, 1.0 / r_); }

    std::string str() const { return inf_ ? "inf" : std::to_string(r_); }

private:
    bool inf_ = false;
    double r_ = 1.0;
};

}  // namespace obscert
