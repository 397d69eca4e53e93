// Stability certificates and their independent verification.
//
// Two interchangeable forms exist for the same cycle family:
//   condition "b": one matrix P_h per cycle, constrained through the cycle's
//                  transition product;
//   condition "a": a clock-indexed sequence P_h(0..T_h) per cycle with
//                  per-step decrease and cross-cycle coupling.
// The conversions between them are constructive. b -> a runs the backward
// recursion P(k) = A^T P(k+1) A + delta I segment by segment and shrinks
// delta until the coupling inequalities verify; a -> b takes the endpoint
// P_h(T_h), which the telescoped step inequalities guarantee to work.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swcert/cycles.hpp"
#include "swcert/eigen.hpp"
#include "swcert/io.hpp"
#include "swcert/lmi.hpp"
#include "swcert/matrix.hpp"
#include "swcert/solver.hpp"
#include "swcert/system.hpp"

namespace swcert {

inline constexpr double kDefaultVerifyTol = 1e-10;

struct CertificateMeta {
    std::string system_hash;
    int dwell_min = 1;
    int dwell_max = 1;
    int L = 1;
    double eps = 0.0;  // solver strictness the certificate was issued under
    double mu = 0.0;   // solver normalization cap at issue time
};

struct CertificateB {
    CertificateMeta meta;
    std::vector<SymMatrix> blocks;  // P_h at index h-1
};

struct CertificateA {
    CertificateMeta meta;
    std::vector<std::vector<SymMatrix>> sequences;  // P_h(0..T_h) at index h-1
};

struct CheckResult {
    std::string label;
    double lambda_max = 0.0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    double worst_lambda_max = -1e300;
    std::string worst_label;
    bool pass = false;
};

struct conversion_error : std::runtime_error {
    conversion_error(const std::string& what, double margin) : std::runtime_error(what), best_margin(margin) {}
    double best_margin;
};

namespace detail {

inline void require_binding(const SwitchedSystem& sys, const CycleFamily& family, const CertificateMeta& meta,
                            std::size_t entry_count) {
    if (meta.system_hash != system_content_hash(sys))
        throw std::invalid_argument("certificate/system hash mismatch: certificate was issued for a different system");
    if (meta.dwell_min != sys.dwell_min || meta.dwell_max != sys.dwell_max)
        throw std::invalid_argument("index mismatch: certificate dwell range differs from the system");
    if (meta.L != family.L) throw std::invalid_argument("index mismatch: certificate L differs from the family");
    if (entry_count != family.size())
        throw std::invalid_argument("index mismatch: certificate has " + std::to_string(entry_count) +
                                    " entries, family has " + std::to_string(family.size()));
}

inline void finish_report(VerificationReport& report, double tol) {
    report.worst_lambda_max = -1e300;
    for (const auto& c : report.checks) {
        if (c.lambda_max > report.worst_lambda_max) {
            report.worst_lambda_max = c.lambda_max;
            report.worst_label = c.label;
        }
    }
    report.pass = report.worst_lambda_max < -tol;
}

}  // namespace detail

/// Check every product constraint and every positivity condition of a
/// product-form certificate. PASS iff every reported lambda_max is < -tol.
inline VerificationReport verify_certificate_b(const SwitchedSystem& sys, const CycleFamily& family,
                                               const CertificateB& cert, double tol = kDefaultVerifyTol) {
    detail::require_binding(sys, family, cert.meta, cert.blocks.size());
    const int m_cycles = static_cast<int>(family.size());
    VerificationReport report;
    report.checks.reserve(static_cast<std::size_t>(m_cycles) * (m_cycles + 1));

    for (int h = 1; h <= m_cycles; ++h) {
        const SymMatrix& p = cert.blocks[static_cast<std::size_t>(h - 1)];
        if (p.dim() != sys.state_dim) throw std::invalid_argument("index mismatch: block dimension differs");
        report.checks.push_back({"posdef(P" + std::to_string(h) + ")", max_sym_eigenvalue(p.scaled(-1.0))});
    }
    PowerCache cache(sys);
    std::vector<Matrix> products;
    for (int h = 1; h <= m_cycles; ++h) products.push_back(transition_matrix(sys, family.cycle(h), &cache));
    for (int h = 1; h <= m_cycles; ++h) {
        const Matrix& phi = products[static_cast<std::size_t>(h - 1)];
        const Matrix lhs = phi.transposed() * cert.blocks[static_cast<std::size_t>(h - 1)].as_matrix() * phi;
        for (int q = 1; q <= m_cycles; ++q) {
            const Matrix value = lhs - cert.blocks[static_cast<std::size_t>(q - 1)].as_matrix();
            report.checks.push_back({"prod(h=" + std::to_string(h) + ",q=" + std::to_string(q) + ")",
                                     max_sym_eigenvalue(SymMatrix(value))});
        }
    }
    detail::finish_report(report, tol);
    return report;
}

/// Check every step constraint (with the segment-correct mode), every
/// coupling pair and every positivity condition of a clock-form certificate.
inline VerificationReport verify_certificate_a(const SwitchedSystem& sys, const CycleFamily& family,
                                               const CertificateA& cert, double tol = kDefaultVerifyTol) {
    detail::require_binding(sys, family, cert.meta, cert.sequences.size());
    const int m_cycles = static_cast<int>(family.size());
    for (int h = 1; h <= m_cycles; ++h) {
        const auto& seq = cert.sequences[static_cast<std::size_t>(h - 1)];
        const int t_h = family.cycle(h).total_duration();
        if (static_cast<int>(seq.size()) != t_h + 1)
            throw std::invalid_argument("sequence length: cycle " + std::to_string(h) + " carries " +
                                        std::to_string(seq.size()) + " matrices, expected " + std::to_string(t_h + 1));
    }

    VerificationReport report;
    for (int h = 1; h <= m_cycles; ++h) {
        const auto& seq = cert.sequences[static_cast<std::size_t>(h - 1)];
        for (std::size_t k = 0; k < seq.size(); ++k)
            report.checks.push_back({"posdef(P" + std::to_string(h) + "(" + std::to_string(k) + "))",
                                     max_sym_eigenvalue(seq[k].scaled(-1.0))});
    }
    for (int h = 1; h <= m_cycles; ++h) {
        const CycleSpec& c = family.cycle(h);
        const auto& seq = cert.sequences[static_cast<std::size_t>(h - 1)];
        for (int k = 0; k < c.total_duration(); ++k) {
            const Matrix& a = sys.mode(c.mode_at_step(k));
            const Matrix value = a.transposed() * seq[static_cast<std::size_t>(k + 1)].as_matrix() * a -
                                 seq[static_cast<std::size_t>(k)].as_matrix();
            report.checks.push_back({"step(h=" + std::to_string(h) + ",k=" + std::to_string(k) + ")",
                                     max_sym_eigenvalue(SymMatrix(value))});
        }
    }
    for (int h = 1; h <= m_cycles; ++h) {
        for (int q = 1; q <= m_cycles; ++q) {
            const int t_q = family.cycle(q).total_duration();
            const Matrix value = cert.sequences[static_cast<std::size_t>(h - 1)].front().as_matrix() -
                                 cert.sequences[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(t_q)].as_matrix();
            report.checks.push_back({"join(h=" + std::to_string(h) + ",q=" + std::to_string(q) + ")",
                                     max_sym_eigenvalue(SymMatrix(value))});
        }
    }
    detail::finish_report(report, tol);
    return report;
}

struct ConvertOptions {
    double delta0 = 0.0;  // 0 means auto: 1e-4 times the coupling margin
    double shrink = 0.1;
    int max_attempts = 30;
};

/// Constructive b -> a conversion: anchor P_h(T_h) = P_h and run the
/// backward recursion with Q = delta I, shrinking delta until the coupling
/// inequalities verify. Throws conversion_error when attempts run out.
inline CertificateA convert_b_to_a(const SwitchedSystem& sys, const CycleFamily& family, const CertificateB& cert,
                                   const ConvertOptions& opts = {}, double tol = kDefaultVerifyTol) {
    if (!(opts.shrink > 0.0 && opts.shrink < 1.0))
        throw std::invalid_argument("ConvertOptions: shrink must lie in (0,1)");
    if (opts.max_attempts < 1) throw std::invalid_argument("ConvertOptions: max_attempts must be positive");
    const VerificationReport input_report = verify_certificate_b(sys, family, cert, tol);
    if (!input_report.pass)
        throw std::invalid_argument("convert_b_to_a: input certificate fails verification (worst " +
                                    input_report.worst_label + ")");

    // coupling margin of the product-form certificate
    double coupling_margin = 1e300;
    for (const auto& c : input_report.checks)
        if (c.label.rfind("prod", 0) == 0) coupling_margin = std::min(coupling_margin, -c.lambda_max);

    double delta = (opts.delta0 > 0.0) ? opts.delta0 : 1e-4 * coupling_margin;
    double best_margin = 1e300;
    const int m_cycles = static_cast<int>(family.size());
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        CertificateA candidate;
        candidate.meta = cert.meta;
        candidate.sequences.resize(static_cast<std::size_t>(m_cycles));
        for (int h = 1; h <= m_cycles; ++h) {
            const CycleSpec& c = family.cycle(h);
            const int t_h = c.total_duration();
            std::vector<SymMatrix> seq(static_cast<std::size_t>(t_h) + 1, SymMatrix::zero(sys.state_dim));
            seq[static_cast<std::size_t>(t_h)] = cert.blocks[static_cast<std::size_t>(h - 1)];
            for (int k = t_h - 1; k >= 0; --k) {
                const Matrix& a = sys.mode(c.mode_at_step(k));
                Matrix p = a.transposed() * seq[static_cast<std::size_t>(k + 1)].as_matrix() * a;
                for (int i = 0; i < sys.state_dim; ++i) p(i, i) += delta;
                seq[static_cast<std::size_t>(k)] = SymMatrix(p);
            }
            candidate.sequences[static_cast<std::size_t>(h - 1)] = std::move(seq);
        }
        const VerificationReport report = verify_certificate_a(sys, family, candidate, tol);
        if (report.pass) return candidate;
        best_margin = std::min(best_margin, report.worst_lambda_max);
        delta *= opts.shrink;
    }
    throw conversion_error("convert_b_to_a: no delta in the shrink schedule produced a verifying certificate "
                           "(best worst-case lambda_max " +
                               std::to_string(best_margin) + "); delta0 may be too large or the margins too thin",
                           best_margin);
}

/// Constructive a -> b extraction: P_h := P_h(T_h). The telescoped step
/// inequalities plus the coupling inequalities make the result verify.
inline CertificateB extract_b_from_a(const SwitchedSystem& sys, const CycleFamily& family, const CertificateA& cert,
                                     double tol = kDefaultVerifyTol) {
    const VerificationReport input_report = verify_certificate_a(sys, family, cert, tol);
    if (!input_report.pass)
        throw std::invalid_argument("extract_b_from_a: input certificate fails verification (worst " +
                                    input_report.worst_label + ")");
    CertificateB out;
    out.meta = cert.meta;
    out.blocks.reserve(family.size());
    for (std::size_t h = 0; h < family.size(); ++h) out.blocks.push_back(cert.sequences[h].back());
    return out;
}

/// Assemble a product-form certificate from a Feasible solve of the
/// condition-b problem built over the same family.
inline CertificateB certificate_b_from_result(const SwitchedSystem& sys, const CycleFamily& family,
                                              const FeasibilityResult& result) {
    if (result.status != SolveStatus::Feasible)
        throw std::invalid_argument("certificate_b_from_result: result is not Feasible");
    if (result.assignment.size() != family.size())
        throw std::invalid_argument("certificate_b_from_result: assignment size differs from the family");
    CertificateB cert;
    cert.meta = {system_content_hash(sys), sys.dwell_min, sys.dwell_max, family.L, result.eps, result.mu};
    cert.blocks = result.assignment;
    return cert;
}

/// Assemble a clock-form certificate from a Feasible solve of the
/// condition-a problem built over the same family.
inline CertificateA certificate_a_from_result(const SwitchedSystem& sys, const CycleFamily& family,
                                              const LmiProblem& problem, const FeasibilityResult& result) {
    if (result.status != SolveStatus::Feasible)
        throw std::invalid_argument("certificate_a_from_result: result is not Feasible");
    if (result.assignment.size() != problem.blocks.size())
        throw std::invalid_argument("certificate_a_from_result: assignment size differs from the problem");
    CertificateA cert;
    cert.meta = {system_content_hash(sys), sys.dwell_min, sys.dwell_max, family.L, result.eps, result.mu};
    cert.sequences.resize(family.size());
    for (std::size_t h = 0; h < family.size(); ++h)
        cert.sequences[h].resize(static_cast<std::size_t>(family.cycles[h].total_duration()) + 1,
                                 SymMatrix::zero(sys.state_dim));
    for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
        const LmiBlock& b = problem.blocks[i];
        if (b.clock < 0) throw std::invalid_argument("certificate_a_from_result: problem is not in clock form");
        cert.sequences[static_cast<std::size_t>(b.cycle - 1)][static_cast<std::size_t>(b.clock)] =
            result.assignment[i];
    }
    return cert;
}

// ---------------------------------------------------------------------------
// serialization

namespace detail {

inline nlohmann::json matrix_rows(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_rows(const nlohmann::json& rows) {
    const int r = static_cast<int>(rows.size());
    if (r == 0) throw std::invalid_argument("malformed certificate: empty matrix");
    const int c = static_cast<int>(rows.at(0).size());
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows.at(i).size()) != c)
            throw std::invalid_argument("malformed certificate: ragged matrix rows");
        for (int j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    }
    return m;
}

inline nlohmann::json meta_json(const CertificateMeta& meta, char condition) {
    nlohmann::json doc;
    doc["condition"] = std::string(1, condition);
    doc["L"] = meta.L;
    doc["dwell"] = {{"min", meta.dwell_min}, {"max", meta.dwell_max}};
    doc["system_hash"] = meta.system_hash;
    doc["eps"] = meta.eps;
    doc["mu"] = meta.mu;
    return doc;
}

}  // namespace detail

inline std::string certificate_to_json(const CycleFamily& family, const CertificateB& cert) {
    nlohmann::json doc = detail::meta_json(cert.meta, 'b');
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t h = 0; h < family.size(); ++h) {
        nlohmann::json e;
        e["h"] = static_cast<int>(h) + 1;
        e["modes"] = family.cycles[h].modes;
        e["durations"] = family.cycles[h].durations;
        e["P"] = detail::matrix_rows(cert.blocks[h].as_matrix());
        entries.push_back(e);
    }
    doc["entries"] = entries;
    return doc.dump();
}

inline std::string certificate_to_json(const CycleFamily& family, const CertificateA& cert) {
    nlohmann::json doc = detail::meta_json(cert.meta, 'a');
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t h = 0; h < family.size(); ++h) {
        nlohmann::json e;
        e["h"] = static_cast<int>(h) + 1;
        e["modes"] = family.cycles[h].modes;
        e["durations"] = family.cycles[h].durations;
        nlohmann::json seq = nlohmann::json::array();
        for (const auto& p : cert.sequences[h]) seq.push_back(detail::matrix_rows(p.as_matrix()));
        e["P_seq"] = seq;
        entries.push_back(e);
    }
    doc["entries"] = entries;
    return doc.dump();
}

/// A certificate file of either condition, with the cycle layout it recorded.
struct LoadedCertificate {
    char condition = 'b';
    std::optional<CertificateB> b;
    std::optional<CertificateA> a;
    std::vector<std::vector<int>> modes;      // per entry, for family validation
    std::vector<std::vector<int>> durations;

    const CertificateMeta& meta() const { return condition == 'b' ? b->meta : a->meta; }
};

inline LoadedCertificate load_certificate_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
    }
    try {
        LoadedCertificate out;
        const std::string condition = doc.at("condition").get<std::string>();
        if (condition != "a" && condition != "b")
            throw std::invalid_argument("malformed certificate: condition must be \"a\" or \"b\"");
        out.condition = condition[0];
        CertificateMeta meta;
        meta.L = doc.at("L").get<int>();
        meta.dwell_min = doc.at("dwell").at("min").get<int>();
        meta.dwell_max = doc.at("dwell").at("max").get<int>();
        meta.system_hash = doc.at("system_hash").get<std::string>();
        meta.eps = doc.value("eps", 0.0);
        meta.mu = doc.value("mu", 0.0);

        std::vector<SymMatrix> blocks;
        std::vector<std::vector<SymMatrix>> sequences;
        for (const auto& e : doc.at("entries")) {
            out.modes.push_back(e.at("modes").get<std::vector<int>>());
            out.durations.push_back(e.at("durations").get<std::vector<int>>());
            if (out.condition == 'b') {
                blocks.emplace_back(detail::matrix_from_rows(e.at("P")));
            } else {
                std::vector<SymMatrix> seq;
                for (const auto& rows : e.at("P_seq")) seq.emplace_back(detail::matrix_from_rows(rows));
                sequences.push_back(std::move(seq));
            }
        }
        if (out.condition == 'b') {
            out.b = CertificateB{meta, std::move(blocks)};
        } else {
            out.a = CertificateA{meta, std::move(sequences)};
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
    }
}

/// Entries of a certificate file must name exactly the cycles of the family,
/// in rank order.
inline void validate_certificate_layout(const LoadedCertificate& cert, const CycleFamily& family) {
    if (cert.modes.size() != family.size())
        throw std::invalid_argument("index mismatch: certificate entry count differs from the cycle family");
    for (std::size_t h = 0; h < family.size(); ++h) {
        if (cert.modes[h] != family.cycles[h].modes || cert.durations[h] != family.cycles[h].durations)
            throw std::invalid_argument("index mismatch: certificate entry " + std::to_string(h + 1) +
                                        " does not match the cycle of that rank");
    }
}

// ---------------------------------------------------------------------------
// certificate semantics along trajectories

struct LyapunovTrace {
    std::vector<double> values;  // chronological, boundary instants doubled
    bool strictly_decreasing = false;
};

/// Evaluate the clock-form Lyapunov function along a simulated trajectory.
/// The signal's segments are consumed in groups of L; each group must be an
/// enumerated cycle of the family. Boundary instants contribute two values,
/// the outgoing cycle's endpoint and the incoming cycle's start, so a strict
/// decrease over the flattened list captures both the per-step and the
/// concatenation inequalities.
inline LyapunovTrace lyapunov_trace(const SwitchedSystem& sys, const CycleFamily& family, const CertificateA& cert,
                                    const SwitchingSignal& sig, const std::vector<double>& x0, int num_cycles) {
    if (static_cast<int>(sig.segments.size()) < num_cycles * family.L)
        throw std::invalid_argument("lyapunov_trace: signal has fewer segments than requested cycles");
    check_admissible(sys, sig);

    LyapunovTrace trace;
    std::vector<double> x = x0;
    auto quad = [&](const SymMatrix& p, const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < p.dim(); ++i)
            for (int j = 0; j < p.dim(); ++j) s += v[static_cast<std::size_t>(i)] * p(i, j) * v[static_cast<std::size_t>(j)];
        return s;
    };

    for (int n = 0; n < num_cycles; ++n) {
        std::vector<int> modes, durations;
        for (int i = 0; i < family.L; ++i) {
            const Segment& seg = sig.segments[static_cast<std::size_t>(n * family.L + i)];
            modes.push_back(seg.mode);
            durations.push_back(seg.duration);
        }
        const int h = cycle_rank(family.system, modes, durations);
        const CycleSpec& c = family.cycle(h);
        const auto& seq = cert.sequences[static_cast<std::size_t>(h - 1)];
        for (int k = 0; k < c.total_duration(); ++k) {
            if (norm2(x) == 0.0) break;
            trace.values.push_back(quad(seq[static_cast<std::size_t>(k)], x));
            x = sys.mode(c.mode_at_step(k)) * x;
        }
        if (norm2(x) == 0.0) break;
        trace.values.push_back(quad(seq.back(), x));
    }
    trace.strictly_decreasing = true;
    for (std::size_t i = 1; i < trace.values.size(); ++i)
        if (!(trace.values[i] < trace.values[i - 1])) trace.strictly_decreasing = false;
    return trace;
}

}  // namespace swcert
