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

#include "gaussify/csv_io.h"

#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "gaussify/errors.h"

namespace gaussify {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view s, double &out) {
    s = trim(s);
    if (s.empty()) {
        return false;
    }
    std::string buf(s);
    char *end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

}  // namespace

std::string format_number(double value) {
    return fmt::format("{:.17g}", value);
}

void write_header(std::ostream &out, std::string_view title, const HeaderFields &fields) {
    out << "# " << title << '\n';
    for (const auto &[key, value] : fields) {
        out << "# " << key << '=' << value << '\n';
    }
}

void write_distribution_csv(std::ostream &out, const PhotonDistribution &state, const HeaderFields &fields) {
    HeaderFields all = fields;
    all.emplace_back("tail_mass", format_number(state.tail_mass()));
    write_header(out, "gaussify photon-number distribution", all);
    out << "n,p_n\n";
    auto p = state.probs();
    for (std::size_t n = 0; n < p.size(); ++n) {
        out << n << ',' << format_number(p[n]) << '\n';
    }
}

PhotonDistribution read_distribution_csv(std::istream &in) {
    std::vector<double> weights;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        auto cells = split(view);
        double value = 0.0;
        if (cells.size() == 1) {
            if (!parse_double(cells[0], value)) {
                continue;
            }
            weights.push_back(value);
            continue;
        }
        double index = 0.0;
        if (!parse_double(cells[0], index) || !parse_double(cells[1], value)) {
            continue;  // header row
        }
        if (index < 0.0 || index != static_cast<double>(static_cast<std::size_t>(index))) {
            throw DomainError("photon number column must hold non-negative integers");
        }
        auto n = static_cast<std::size_t>(index);
        if (weights.size() <= n) {
            weights.resize(n + 1, 0.0);
        }
        weights[n] = value;
    }
    if (weights.empty()) {
        throw DomainError("no photon-number weights found");
    }
    return make_custom(std::move(weights));
}

void write_batch_csv(std::ostream &out, const QuadratureBatch &batch, const HeaderFields &fields) {
    HeaderFields all{{"eta_h", format_number(batch.eta_h.value())},
                     {"seed", std::to_string(batch.seed)},
                     {"source", batch.source}};
    all.insert(all.end(), fields.begin(), fields.end());
    write_header(out, "gaussify quadrature batch", all);
    out << "index,x\n";
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        out << i << ',' << format_number(batch.samples[i]) << '\n';
    }
}

QuadratureBatch read_batch_csv(std::istream &in) {
    QuadratureBatch batch;
    bool have_eta = false;
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            view.remove_prefix(1);
            view = trim(view);
            std::size_t eq = view.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            std::string_view key = trim(view.substr(0, eq));
            std::string_view value = trim(view.substr(eq + 1));
            // leading keys describe the batch; later ones are caller provenance
            if (!seen.insert(std::string(key)).second) {
                continue;
            }
            if (key == "eta_h") {
                double eta = 0.0;
                if (!parse_double(value, eta)) {
                    throw DomainError("malformed eta_h in batch header");
                }
                batch.eta_h = DetectorEfficiency(eta);
                have_eta = true;
            } else if (key == "seed") {
                auto res = std::from_chars(value.data(), value.data() + value.size(), batch.seed);
                if (res.ec != std::errc()) {
                    throw DomainError("malformed seed in batch header");
                }
            } else if (key == "source") {
                batch.source = std::string(value);
            }
            continue;
        }
        auto cells = split(view);
        double x = 0.0;
        if (!parse_double(cells.back(), x)) {
            continue;  // header row
        }
        batch.samples.push_back(x);
    }
    if (!have_eta) {
        throw DomainError("batch header lacks eta_h");
    }
    if (!(batch.eta_h.value() > 0.0)) {
        throw DomainError("batch eta_h must be positive");
    }
    return batch;
}

void write_trace_csv(std::ostream &out, const IterationTrace &trace, const HeaderFields &fields) {
    HeaderFields all = fields;
    all.emplace_back("status", to_string(trace.status));
    if (!trace.message.empty()) {
        all.emplace_back("message", trace.message);
    }
    all.emplace_back("converged_at", trace.converged_at ? std::to_string(*trace.converged_at) : "none");
    write_header(out, "gaussify iteration trace", all);
    out << "j,mean,variance,K,D,F,p_succ_j,p_tot_cumulative,tail_mass\n";
    for (const IterationRecord &r : trace.records) {
        out << r.index << ',' << format_number(r.mean) << ',' << format_number(r.variance) << ','
            << format_number(r.kurtosis) << ',' << format_number(r.distance) << ',' << format_number(r.fidelity)
            << ',' << format_number(r.p_succ) << ',' << format_number(r.p_tot) << ','
            << format_number(r.state.tail_mass()) << '\n';
    }
}

void write_reconstruction_csv(std::ostream &out, const PhotonDistribution &state, std::span<const double> std_dev,
                              const HeaderFields &fields) {
    write_header(out, "gaussify reconstruction", fields);
    out << "n,p_n,std_n\n";
    auto p = state.probs();
    for (std::size_t n = 0; n < p.size(); ++n) {
        double s = n < std_dev.size() ? std_dev[n] : std::numeric_limits<double>::quiet_NaN();
        out << n << ',' << format_number(p[n]) << ',' << format_number(s) << '\n';
    }
}

void write_quadrature_grid_csv(std::ostream &out, const PhotonDistribution &state, int points,
                               const HeaderFields &fields) {
    if (points < 2) {
        throw DomainError("quadrature grid needs at least 2 points");
    }
    double limit = quadrature_window(state);
    HeaderFields all = fields;
    all.emplace_back("x_limit", format_number(limit));
    write_header(out, "gaussify quadrature distribution", all);
    out << "x,P\n";
    for (int i = 0; i < points; ++i) {
        double x = -limit + 2.0 * limit * i / (points - 1);
        out << format_number(x) << ',' << format_number(quadrature_pdf(state, x)) << '\n';
    }
}

}  // namespace gaussify
