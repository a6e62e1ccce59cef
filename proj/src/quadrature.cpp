#include "rlp/quadrature.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include <memory>
#include <string>

#include "rlp/errors.hpp"

namespace rlp {

namespace {

// GSL aborts on error by default; we want exceptions instead.  The handler
// is process-global, so disable it exactly once.
const int g_gsl_handler_off = [] {
  gsl_set_error_handler_off();
  return 0;
}();

double call_target(double x, void* params) {
  auto* f = static_cast<const std::function<double(double)>*>(params);
  return (*f)(x);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double eps_abs) {
  (void)g_gsl_handler_off;
  constexpr size_t kLimit = 4096;
  std::unique_ptr<gsl_integration_workspace,
                  decltype(&gsl_integration_workspace_free)>
      ws(gsl_integration_workspace_alloc(kLimit),
         &gsl_integration_workspace_free);
  if (!ws) throw numeric_failure("integration workspace allocation failed");

  gsl_function target;
  target.function = &call_target;
  target.params = const_cast<std::function<double(double)>*>(&f);

  double result = 0.0;
  double abserr = 0.0;
  // Relative tolerance as a backstop for integrands of large magnitude.
  int status = gsl_integration_qags(&target, a, b, eps_abs, 1e-10, kLimit,
                                    ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw numeric_failure(std::string("quadrature failed: ") +
                          gsl_strerror(status));
  }
  return result;
}

double chisq_sf(double statistic, unsigned dof) {
  if (dof == 0) throw invalid_argument("chisq_sf: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return gsl_cdf_chisq_Q(statistic, static_cast<double>(dof));
}

double beta_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return gsl_sf_beta_inc(a, b, x);
}

double beta_fn(double a, double b) { return gsl_sf_beta(a, b); }

}  // namespace rlp
