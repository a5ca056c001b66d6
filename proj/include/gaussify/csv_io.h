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

#ifndef GAUSSIFY_CSV_IO_H
#define GAUSSIFY_CSV_IO_H

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaussify/homodyne.h"
#include "gaussify/photon_distribution.h"
#include "gaussify/protocol.h"

namespace gaussify {

// All tables are comma-separated with a single header row. Provenance lines
// precede the header and start with "# key=value".

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// Shortest text that round-trips the double ("%.17g").
std::string format_number(double value);

void write_header(std::ostream &out, std::string_view title, const HeaderFields &fields);

/// Columns: n,p_n
void write_distribution_csv(std::ostream &out, const PhotonDistribution &state, const HeaderFields &fields = {});

/// Accepts "n,p_n" rows (any header row is skipped) or one weight per line.
/// Weights are normalized.
PhotonDistribution read_distribution_csv(std::istream &in);

/// Columns: index,x. Header carries eta_h, seed and source.
void write_batch_csv(std::ostream &out, const QuadratureBatch &batch, const HeaderFields &fields = {});
QuadratureBatch read_batch_csv(std::istream &in);

/// Columns: j,mean,variance,K,D,F,p_succ_j,p_tot_cumulative,tail_mass
void write_trace_csv(std::ostream &out, const IterationTrace &trace, const HeaderFields &fields = {});

/// Columns: n,p_n,std_n. `std_dev` may be shorter than the state (missing
/// entries are written as 0).
void write_reconstruction_csv(std::ostream &out, const PhotonDistribution &state, std::span<const double> std_dev,
                              const HeaderFields &fields = {});

/// Columns: x,P
void write_quadrature_grid_csv(std::ostream &out, const PhotonDistribution &state, int points,
                               const HeaderFields &fields = {});

}  // namespace gaussify

#endif
