#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "jumplab/law.hpp"
#include "jumplab/model.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_once(const jumplab::Model& model, jumplab::SimParams params, int workers,
                jumplab::EmpiricalLaw& law_out) {
  params.workers = workers;
  const jumplab::Binning binning = jumplab::Binning::regular_1d(-2.0, 8.0, 200);
  const auto start = Clock::now();
  law_out = jumplab::estimate_law(model, jumplab::scalar_vec(0.0), params.horizon, params,
                                  binning);
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t n_paths = 20000;
  if (argc > 1) n_paths = std::strtoull(argv[1], nullptr, 10);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int workers = hw > 0 ? hw : 4;
  if (argc > 2) workers = std::atoi(argv[2]);

  const jumplab::Model model = jumplab::make_model("ou_jump", {}, jumplab::LevyMeasure{});
  jumplab::SimParams params;
  params.dt = 0.01;
  params.horizon = 5.0;
  params.seed = 7;
  params.n_paths = n_paths;

  jumplab::EmpiricalLaw serial_law, parallel_law;
  const double t_serial = run_once(model, params, 1, serial_law);
  const double t_parallel = run_once(model, params, workers, parallel_law);

  bool identical = serial_law.masses.size() == parallel_law.masses.size();
  if (identical)
    for (std::size_t i = 0; i < serial_law.masses.size(); ++i)
      if (serial_law.masses[i] != parallel_law.masses[i]) {
        identical = false;
        break;
      }

  std::cout << "paths:            " << n_paths << "\n"
            << "serial:           " << t_serial << " s ("
            << static_cast<double>(n_paths) / t_serial << " paths/s)\n"
            << "parallel(" << workers << "):      " << t_parallel << " s ("
            << static_cast<double>(n_paths) / t_parallel << " paths/s)\n"
            << "speedup:          " << t_serial / t_parallel << "x\n"
            << "bit-identical:    " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
