#ifndef OLIGOSCOPE_LIMITS_HPP_
#define OLIGOSCOPE_LIMITS_HPP_

namespace oligoscope {

// Resource caps and search budgets.  Enumerations count raw candidates against
// `enumeration_cap` and abort with DomainError("cap_exceeded") rather than
// grinding past desk scale.
struct Limits {
  long long enumeration_cap = 1'000'000;  // raw candidates in age/type scans
  long long closure_cap = 100'000;        // star-closure element count
  long long search_budget = 5'000'000;    // nodes in order-witness backtracking
  long long config_cap = 100'000;         // joint configurations in classify
  int witness_length = 4;                 // default half-graph length
  int roelcke_cap = 6;                    // max n for the brute-force metric
  int amalgam_growth = 8;                 // window growth for amalgamation triples
  double tol = 1e-9;                      // float tolerance (contractions)
  int threads = 1;                        // worker hint; results never depend on it
  unsigned long long seed = 0;            // randomized scans only
};

}  // namespace oligoscope

#endif  // OLIGOSCOPE_LIMITS_HPP_
