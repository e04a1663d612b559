#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sgraph/experiments.hpp"
#include "sgraph/graph.hpp"
#include "sgraph/matching.hpp"

namespace fx {

using namespace sgraph;
using Rng = std::mt19937_64;

CMat haar_unitary(int d, Rng& rng);
CMat random_hermitian(int d, Rng& rng, double scale = 1.0);
CMat random_matrix(int rows, int cols, Rng& rng);
double uniform(Rng& rng, double lo, double hi);

struct SynthCase {
  CMat U, A, B;
  RVec pi, theta;
};

// Random self-adjoint vertex condition from a Haar unitary, d in 1..6.
SynthCase random_synthesized(Rng& rng, int d);

// Random problems with a virtual level (k >= 1) and random eps-dependent data.
// topology 0: two leads into one small edge; 1: three leads, two targets, k = 2;
// 2: small loop plus pendant edge, fixed graph with a loop.
GluedProblem random_problem(int topology, std::uint64_t seed);

// Same operator family with every condition multiplied by a random invertible L(eps) = L0 + eps L1.
GluedProblem gauge_transform(const GluedProblem& p, std::uint64_t seed);

// Two Dirichlet edges with V = -pi^2 hanging off M1: zero-energy solution with zero lead traces.
GluedProblem embedded_fixture();

// Star with V0 = sin(2 pi t): Q = 0.
GluedProblem star_q_zero();

// Star with an eps^{1/2} term added to the potential of a fixed edge.
GluedProblem star_sqrt_control();

Cheb cheb_interpolate(double (*f)(double), int degree);

EdgeFunction random_source(Rng& rng, int edges);

}  // namespace fx
