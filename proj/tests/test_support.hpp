#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>

// Deterministic stand-in for RngStream: serves queued uniforms, for forcing
// specific sampler branches in tests.
struct ScriptedRng {
    std::deque<double> uniforms;

    explicit ScriptedRng(std::initializer_list<double> us) : uniforms(us) {}

    double pop() {
        if (uniforms.empty()) throw std::runtime_error("ScriptedRng exhausted");
        double u = uniforms.front();
        uniforms.pop_front();
        return u;
    }
    double uniform01() { return pop(); }
    double uniform_oo() { return pop(); }
    double exponential(double rate) { return -std::log(pop()) / rate; }
    double beta_theta_one(double theta) {
        double v = pop();
        return theta == 1.0 ? v : std::pow(v, 1.0 / theta);
    }
};
