#include "fft.hpp"

#include <mutex>

#include <fftw3.h>

#include "ppk/errors.hpp"

namespace ppk::detail {

namespace {
std::mutex planner_lock; // the FFTW planner is not reentrant
}

void dft(std::vector<cplx>& data, const std::vector<int>& dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != data.size()) throw GeometryError("dft: data size does not match the dimensions");
  if (total == 0) return;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> g(planner_lock);
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!plan) throw PrecisionError("dft: FFTW could not build a plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> g(planner_lock);
  fftw_destroy_plan(plan);
}

} // namespace ppk::detail
