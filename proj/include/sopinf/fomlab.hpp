#pragma once

#include "sopinf/structures.hpp"

#include <cstdint>
#include <vector>

namespace sopinf {

enum class SupportKind { Cantilever, Overhanging };

struct BeamSpec {
  int n_elements = 60;
  double length = 2.0;
  double youngs_modulus = 2.1e11;
  double density = 7850.0;
  double cross_section_area = 5e-4;
  double second_moment = 4.1667e-9;
  SupportKind support = SupportKind::Cantilever;
  // Overhanging only: nodes whose deflection is pinned (rotation stays free).
  int left_support_node = 0;
  int right_support_node = 0;
  double rayleigh_alpha = 0.5;
  double rayleigh_beta = 1e-4;
  std::vector<int> load_nodes = {58, 59, 60};

  void validate() const;
};

struct DiskSpec {
  int node = 0;
  double mass = 0.0;
  double transverse_inertia = 0.0;
  double polar_inertia = 0.0;
};

// Per-node DOFs [x1, x2, th1, th2]. th2 is the slope of x1 and th1 the slope of x2; each
// bending plane uses Euler-Bernoulli shaft elements of length element_length.
struct RotorSpec {
  int n_nodes = 7;
  double element_length = 0.25;
  double node_mass = 4.0;
  double node_transverse_inertia = 0.01;
  double node_polar_inertia = 0.02;
  double shaft_bending_stiffness = 3e5;
  // Stiffness-proportional damping coefficient applied to the shaft elements only.
  double shaft_damping = 1e-3;
  std::vector<int> bearing_nodes = {0, 6};
  double bearing_stiffness = 2e4;
  double bearing_damping = 50.0;
  // Rotational spring on th1/th2 at bearing nodes; needed when there is no shaft (n_nodes = 1).
  double bearing_tilt_stiffness = 0.0;
  std::vector<DiskSpec> disks = {{1, 10.0, 0.5, 1.0}, {5, 10.0, 0.5, 1.0}};
  int forced_node = 3;

  void validate() const;
};

SecondOrderSystem build_beam(const BeamSpec& spec);
SecondOrderSystem build_rotor(const RotorSpec& spec);
SecondOrderSystem build_synthetic(int n, int m, std::uint64_t seed);

// Shared 4x4 Euler-Bernoulli element matrices, DOFs [w_i, th_i, w_j, th_j].
Matrix beam_element_stiffness(double EI, double le);
Matrix beam_element_mass(double rhoA, double le);

}  // namespace sopinf
