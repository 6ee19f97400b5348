// Drives the semi-discrete settler model with an external ODE integrator
// (Boost.Odeint classic RK4) instead of the built-in explicit Euler stepper.

#include <cstdio>
#include <memory>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "settler/settler.hpp"

int main() {
  using namespace settler;
  namespace odeint = boost::numeric::odeint;

  const Scenario sc = example1();
  const int N = 32;
  const Constitutive law(sc.constitutive);
  auto problem = std::make_shared<const MolProblem>(make_problem(sc, N, law));

  MolSystem system(problem, sc, OmegaPolicy::clamp);
  std::vector<double> u = initial_state(sc, problem->grid()).values();

  const auto budget = cfl_max_dt(problem->grid(), law, problem->reactions(), schedule_max(sc.Q_f, sc.run.T),
                                 problem->diffusion());
  const double T = 1.0 * kHour;
  odeint::runge_kutta4<std::vector<double>> rk4;
  const auto steps = odeint::integrate_const(rk4, std::ref(system), u, 0.0, T, budget.dt_max);

  const State final_state(problem->layout(), u);
  std::printf("RK4: %zu steps of %.4g s, %zu clamp events\n", steps, budget.dt_max, system.clamp_events());
  std::printf("%8s %10s\n", "z [m]", "X [kg/m3]");
  for (std::size_t j = 0; j < final_state.cells(); j += 4) {
    std::printf("%8.3f %10.5f\n", problem->grid().z_cell[j], final_state.X(j));
  }
  return 0;
}
