#include "qsc/parallel.hpp"

#include <cstdlib>
#include <string>

#include <Eigen/SVD>
#include <omp.h>

#include "qsc/core.hpp"

namespace qsc {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

void set_num_threads(int n) {
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
}

void apply_thread_env() {
  const char* env = std::getenv("QSC_THREADS");
  if (env == nullptr || *env == '\0') return;
  try {
    set_num_threads(std::stoi(env));
  } catch (const std::exception&) {
    throw InvalidArgument("QSC_THREADS must be an integer, got '" + std::string(env) + "'");
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace qsc
