#pragma once

#include <functional>
#include <vector>

namespace luis::quad {

// Nodes/weights for averaging against a real N(0, 1/2) density, i.e.
// E[f(z)] = sum_i w[i] * f(t[i]) with z ~ N(0, 1/2). This is the natural
// per-axis rule for circularly symmetric unit-variance complex noise.
// Weights sum to 1.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Hermite Jacobi matrix; order >= 1.
const HermiteRule& gauss_hermite(int order);

// Adaptive Simpson to absolute tolerance `tol` on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace luis::quad
