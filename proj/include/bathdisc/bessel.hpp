#pragma once

namespace bathdisc {

// Bessel function of the first kind J_n(x), n >= 0, by Miller's downward
// recurrence normalized with J_0 + 2 sum_k J_{2k} = 1.
double bessel_j(int n, double x);

// Power series sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!), summed in long double.
// Accurate for |x| up to about 20; used as an independent check.
double bessel_j_series(int n, double x);

}  // namespace bathdisc
