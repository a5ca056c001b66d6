// Copyright 2026 The Gaussify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAUSSIFY_HERMITE_H
#define GAUSSIFY_HERMITE_H

#include <span>
#include <vector>

namespace gaussify {

/// Fills out[n] = psi_n(x), the normalized harmonic-oscillator eigenfunctions
/// with psi_0(x) = pi^(-1/4) exp(-x^2/2), for n = 0 .. out.size()-1.
///
/// Uses psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1} on a
/// rescaled sequence, so large n and |x| beyond the underflow point of
/// psi_0 are handled.
void hermite_functions(double x, std::span<double> out);

std::vector<double> hermite_functions(double x, int n_max);

/// Fills out[n] = int_{-inf}^{x} psi_n(t)^2 dt, via
/// F_n = F_{n-1} - psi_n psi_{n-1} / sqrt(2n).
void hermite_function_cdfs(double x, std::span<double> out);

/// Physicists' Hermite polynomial H_k(x), H_{k+1} = 2x H_k - 2k H_{k-1}.
/// Evaluated in long double.
long double hermite_polynomial(int k, long double x);

}  // namespace gaussify

#endif
