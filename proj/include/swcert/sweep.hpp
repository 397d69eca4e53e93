// Grid sweeps over (dwell, cycle length), their CSV/summary reports, and the
// small self-contained SVG emitters. Wording rule for all report text: the
// absence of a witness is never phrased as a stability proof.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "swcert/certificate.hpp"
#include "swcert/cycles.hpp"
#include "swcert/lmi.hpp"
#include "swcert/oracles.hpp"
#include "swcert/solver.hpp"
#include "swcert/system.hpp"

namespace swcert {

struct SweepOptions {
    Condition condition = Condition::B;
    SolverOptions solver;
    long long cap = kDefaultCycleCap;
    int witness_length_max = 4;  // oracle search depth per dwell value
};

enum class SweepStatus { Feasible, Inconclusive, WitnessUnstable, Skipped, NumericalFailure };

inline const char* to_string(SweepStatus s) {
    switch (s) {
        case SweepStatus::Feasible: return "feasible";
        case SweepStatus::Inconclusive: return "inconclusive";
        case SweepStatus::WitnessUnstable: return "witness-unstable";
        case SweepStatus::Skipped: return "skipped";
        case SweepStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct SweepRow {
    int tau = 0;
    int length = 0;
    SweepStatus status = SweepStatus::Skipped;
    bool has_margin = false;
    double margin = 0.0;
    long long wallclock_ms = 0;
    std::string note;  // skip or failure reason; not part of the CSV
};

struct SweepSummaryRow {
    int tau = 0;
    int minimal_length = -1;  // -1: none within the swept range
    bool lemma_feasible = false;
    bool witness_found = false;
    double witness_radius = 0.0;
    std::string witness_desc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepSummaryRow> summary;
    int length_max = 0;
    int witness_length_max = 0;
    bool any_numerical_failure = false;
};

/// Evaluate the grid: per (tau, L), dwell is fixed to [tau, tau], the chosen
/// condition is built, solved, and post-verified by the independent checker.
/// Rows are recorded in (tau, L) iteration order; a grid point whose cycle
/// family exceeds the cap is recorded as skipped and the sweep continues.
inline SweepResult run_sweep(const SwitchedSystem& base, const std::vector<int>& taus,
                             const std::vector<int>& lengths, const SweepOptions& opts = {}) {
    if (taus.empty() || lengths.empty()) throw std::invalid_argument("sweep ranges must be nonempty");
    SweepResult result;
    result.length_max = *std::max_element(lengths.begin(), lengths.end());
    result.witness_length_max = opts.witness_length_max;

    for (int tau : taus) {
        const SwitchedSystem sys = base.with_dwell(tau, tau);
        WitnessReport witness;
        try {
            witness = instability_witness_search(sys, opts.witness_length_max, opts.cap);
        } catch (const std::invalid_argument&) {
            // witness search hitting the cap leaves the oracle silent
        }

        SweepSummaryRow summary;
        summary.tau = tau;
        summary.witness_found = witness.found;
        if (witness.found) {
            summary.witness_radius = witness.radius;
            std::string modes, durs;
            for (std::size_t i = 0; i < witness.cycle->modes.size(); ++i) {
                modes += (i ? "," : "") + std::to_string(witness.cycle->modes[i]);
                durs += (i ? "," : "") + std::to_string(witness.cycle->durations[i]);
            }
            summary.witness_desc = "modes(" + modes + ") durations(" + durs + ")";
        }

        for (int length : lengths) {
            SweepRow row;
            row.tau = tau;
            row.length = length;
            const auto started = std::chrono::steady_clock::now();
            try {
                const CycleFamily family = enumerate_cycles(sys, length, opts.cap);
                const LmiProblem problem = (opts.condition == Condition::B) ? build_condition_b(sys, family)
                                                                            : build_condition_a(sys, family);
                const FeasibilityResult solve = solve_feasibility(problem, opts.solver);
                row.has_margin = true;
                row.margin = solve.margin;
                if (solve.status == SolveStatus::Feasible) {
                    const bool verified =
                        (opts.condition == Condition::B)
                            ? verify_certificate_b(sys, family, certificate_b_from_result(sys, family, solve)).pass
                            : verify_certificate_a(sys, family,
                                                   certificate_a_from_result(sys, family, problem, solve))
                                  .pass;
                    if (verified) {
                        row.status = SweepStatus::Feasible;
                        if (summary.minimal_length < 0) summary.minimal_length = length;
                    } else {
                        row.status = SweepStatus::NumericalFailure;
                        row.note = "solver verdict failed independent verification";
                        result.any_numerical_failure = true;
                    }
                } else if (solve.status == SolveStatus::Inconclusive) {
                    row.status = witness.found ? SweepStatus::WitnessUnstable : SweepStatus::Inconclusive;
                } else {
                    row.status = SweepStatus::NumericalFailure;
                    row.note = solve.note;
                    result.any_numerical_failure = true;
                }
            } catch (const std::invalid_argument& e) {
                row.status = SweepStatus::Skipped;
                row.note = e.what();
            }
            row.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();
            result.rows.push_back(std::move(row));
        }
        summary.lemma_feasible = summary.minimal_length == 1;
        result.summary.push_back(std::move(summary));
    }
    return result;
}

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

/// CSV columns exactly: tau,L,status,margin,wallclock_ms
inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "tau,L,status,margin,wallclock_ms\n";
    for (const SweepRow& row : result.rows) {
        out << row.tau << ',' << row.length << ',' << to_string(row.status) << ',';
        if (row.has_margin) out << detail::format_number(row.margin);
        out << ',' << row.wallclock_ms << '\n';
    }
}

/// Machine-readable summary: minimal feasible L per tau plus the oracle's
/// verdict. minimal_L is "none" when no swept length produced a certificate.
inline void write_summary_csv(std::ostream& out, const SweepResult& result) {
    out << "tau,minimal_L,lemma_feasible,oracle_verdict,witness_radius\n";
    for (const SweepSummaryRow& s : result.summary) {
        out << s.tau << ',';
        if (s.minimal_length > 0)
            out << s.minimal_length;
        else
            out << "none";
        out << ',' << (s.lemma_feasible ? "true" : "false") << ','
            << (s.witness_found ? "witness" : "no-witness-found") << ',';
        if (s.witness_found) out << detail::format_number(s.witness_radius);
        out << '\n';
    }
}

/// Human-readable summary. Certified rows say so; rows without a certificate
/// and without a witness are left open explicitly.
inline void write_summary_text(std::ostream& out, const SweepResult& result) {
    for (const SweepSummaryRow& s : result.summary) {
        out << "tau=" << s.tau << ": ";
        if (s.minimal_length > 0) {
            out << "certified stable, minimal L=" << s.minimal_length
                << (s.lemma_feasible ? " (within reach of the L=1 criteria)" : "");
        } else {
            out << "no certificate for L <= " << result.length_max;
        }
        if (s.witness_found) {
            out << "; instability witness " << s.witness_desc << " with radius "
                << detail::format_number(s.witness_radius);
        } else if (s.minimal_length <= 0) {
            out << "; no witness up to L=" << result.witness_length_max << " (not a stability proof)";
        }
        out << '\n';
    }
}

/// CSV columns: k,mode,x1..xn,norm. The mode column reports the signal's
/// active mode at step k, including at the final state.
inline void write_trajectory_csv(std::ostream& out, const SwitchedSystem& sys, const SwitchingSignal& sig,
                                 const Trajectory& traj) {
    out << "k,mode";
    for (int i = 1; i <= sys.state_dim; ++i) out << ",x" << i;
    out << ",norm\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << k << ',' << signal_mode_at(sig, static_cast<long long>(k));
        for (double v : traj.states[k]) out << ',' << detail::format_number(v);
        out << ',' << detail::format_number(norm2(traj.states[k])) << '\n';
    }
}

// ---------------------------------------------------------------------------
// minimal SVG emitters (advisory output, not golden-tested)

namespace detail {

struct SvgFrame {
    double x0, y0, w, h;  // plot area in pixels
    double xmin, xmax, ymin, ymax;
    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

inline void svg_header(std::ostream& out, int w, int h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
        << w << ' ' << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void svg_frame_box(std::ostream& out, const SvgFrame& f) {
    out << "<rect x=\"" << f.x0 << "\" y=\"" << f.y0 << "\" width=\"" << f.w << "\" height=\"" << f.h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
}

}  // namespace detail

/// Polyline plot of log10 of the state norm against the step index.
inline void write_norm_svg(std::ostream& out, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                           const std::string& title) {
    detail::SvgFrame f{60, 40, 640, 400, 0, 1, -16, 2};
    double ymin = 0.0, ymax = 0.0, xmax = 1.0;
    for (const auto& [name, norms] : series) {
        xmax = std::max(xmax, static_cast<double>(norms.size() > 0 ? norms.size() - 1 : 1));
        for (double v : norms) {
            const double lg = std::log10(std::max(v, 1e-300));
            ymin = std::min(ymin, lg);
            ymax = std::max(ymax, lg);
        }
    }
    f.xmax = xmax;
    f.ymin = std::max(ymin - 0.5, -300.0);
    f.ymax = ymax + 0.5;

    detail::svg_header(out, 760, 500);
    out << "<text x=\"380\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << title
        << "</text>\n";
    detail::svg_frame_box(out, f);
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int color_idx = 0;
    for (const auto& [name, norms] : series) {
        out << "<polyline fill=\"none\" stroke=\"" << kColors[color_idx % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < norms.size(); ++k) {
            const double lg = std::log10(std::max(norms[k], 1e-300));
            out << f.px(static_cast<double>(k)) << ',' << f.py(std::max(lg, f.ymin)) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << f.x0 + f.w + 8 << "\" y=\"" << 52 + 16 * color_idx
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << kColors[color_idx % 6] << "\">" << name
            << "</text>\n";
        ++color_idx;
    }
    // axis labels: log scale ticks every 4 decades
    for (int e = static_cast<int>(f.ymax); e >= static_cast<int>(f.ymin); e -= 4) {
        out << "<text x=\"" << f.x0 - 6 << "\" y=\"" << f.py(e) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
    }
    out << "<text x=\"" << f.x0 + f.w / 2 << "\" y=\"" << f.y0 + f.h + 28
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">step k</text>\n";
    out << "</svg>\n";
}

/// Scatter of the sweep grid: filled circles are certified (tau, L) points,
/// red when the tau is already within reach of the L=1 criteria, crosses mark
/// dwell values with an instability witness.
inline void write_sweep_svg(std::ostream& out, const SweepResult& result) {
    int tau_max = 1, len_max = 1;
    for (const auto& row : result.rows) {
        tau_max = std::max(tau_max, row.tau);
        len_max = std::max(len_max, row.length);
    }
    detail::SvgFrame f{60, 40, 620, 380, 0.5, tau_max + 0.5, 0.5, len_max + 0.5};
    detail::svg_header(out, 760, 480);
    out << "<text x=\"380\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
           "certified (tau, L) grid</text>\n";
    detail::svg_frame_box(out, f);
    for (const auto& s : result.summary) {
        if (!s.witness_found) continue;
        const double x = f.px(s.tau);
        out << "<path d=\"M" << x - 5 << ' ' << f.y0 + f.h + 6 << " l10 10 m0 -10 l-10 10\" stroke=\"#d62728\" "
               "stroke-width=\"2\"/>\n";
    }
    for (const auto& row : result.rows) {
        if (row.status != SweepStatus::Feasible) continue;
        bool lemma = false;
        for (const auto& s : result.summary)
            if (s.tau == row.tau) lemma = s.lemma_feasible;
        out << "<circle cx=\"" << f.px(row.tau) << "\" cy=\"" << f.py(row.length) << "\" r=\"6\" fill=\""
            << (lemma ? "#d62728" : "#1f77b4") << "\"/>\n";
    }
    for (int tau = 1; tau <= tau_max; ++tau)
        out << "<text x=\"" << f.px(tau) << "\" y=\"" << f.y0 + f.h + 32
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tau << "</text>\n";
    for (int ell = 1; ell <= len_max; ++ell)
        out << "<text x=\"" << f.x0 - 8 << "\" y=\"" << f.py(ell) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ell << "</text>\n";
    out << "<text x=\"" << f.x0 + f.w / 2 << "\" y=\"" << f.y0 + f.h + 50
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">dwell tau (crosses: witnessed "
           "unstable)</text>\n";
    out << "</svg>\n";
}

}  // namespace swcert
