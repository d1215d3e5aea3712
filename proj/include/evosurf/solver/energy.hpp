#pragma once

#include "evosurf/core.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

namespace evosurf {

/// Energy density e(r) of the dissipation functional -1/2 int e(|grad u|^2),
/// together with its derivative e'(r), which acts as the diffusivity.
struct EnergyDensity {
    enum class Kind { linear, power, log, custom };

    Kind kind = Kind::linear;
    double p = 1.0;      // exponent for Kind::power
    double scale = 1.0;  // constant factor (diffusion coefficient)
    std::function<double(double)> e;
    std::function<double(double)> e_prime;

    /// e(r) = k r, e'(r) = k.
    static EnergyDensity linear(double k = 1.0) {
        EnergyDensity d;
        d.kind = Kind::linear;
        d.scale = k;
        d.e = [k](double r) { return k * r; };
        d.e_prime = [k](double) { return k; };
        return d;
    }

    /// e(r) = r^{p+1}/(p+1), e'(r) = r^p.
    static EnergyDensity power(double p) {
        if (!(p > 0.0)) throw Error("power energy needs p > 0");
        EnergyDensity d;
        d.kind = Kind::power;
        d.p = p;
        d.e = [p](double r) { return std::pow(r, p + 1) / (p + 1); };
        d.e_prime = [p](double r) { return std::pow(r, p); };
        return d;
    }

    /// e(r) = log(1 + r), e'(r) = 1/(1 + r).
    static EnergyDensity logarithmic() {
        EnergyDensity d;
        d.kind = Kind::log;
        d.e = [](double r) { return std::log1p(r); };
        d.e_prime = [](double r) { return 1.0 / (1.0 + r); };
        return d;
    }

    static EnergyDensity custom(std::function<double(double)> e,
                                std::function<double(double)> e_prime) {
        EnergyDensity d;
        d.kind = Kind::custom;
        d.e = std::move(e);
        d.e_prime = std::move(e_prime);
        return d;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::linear: os << "linear(k=" << scale << ")"; break;
            case Kind::power: os << "power(p=" << p << ")"; break;
            case Kind::log: os << "log"; break;
            case Kind::custom: os << "custom"; break;
        }
        return os.str();
    }

    /// Checks e'(0) >= 0 and e'(r) > 0 on a logarithmic sample of r in
    /// (0, r_max]. Throws NonparabolicEnergy otherwise.
    void check_parabolic(double r_max = 1e4, int samples = 64) const {
        const double d0 = e_prime(0.0);
        if (!(d0 >= 0.0)) throw NonparabolicEnergy("e'(0) < 0");
        for (int k = 0; k < samples; ++k) {
            const double r = r_max * std::pow(10.0, -12.0 * (samples - 1 - k) / (samples - 1));
            if (!(e_prime(r) > 0.0)) {
                std::ostringstream os;
                os << "e'(" << r << ") = " << e_prime(r) << " is not positive";
                throw NonparabolicEnergy(os.str());
            }
        }
    }
};

}  // namespace evosurf
