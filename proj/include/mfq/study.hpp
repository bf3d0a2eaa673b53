#pragma once

#include "mfq/core.hpp"
#include "mfq/geometry.hpp"
#include "mfq/quadrature.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mfq {

// Convergence/stability experiment over a ladder of spacings: for each
// (q, h, seed) a closed advancing-front node set is generated, a rule is
// computed, and relative integration errors against the reference integrals
// are aggregated as root-mean-square values over seeds 1..n_s.
struct StudyConfig {
    std::string domain;
    Method method = Method::MFD;
    OperatorPair op = OperatorPair::Divergence;
    std::vector<int> q_list;
    std::vector<double> h_list;  // strictly decreasing
    int seeds = 4;
    ConstraintKind constraint = ConstraintKind::BoundaryConstant;
    SolverPath solver = SolverPath::RankRevealingQR;
    std::optional<std::vector<double>> x_R;  // Runge center override
    std::string out;                         // CSV path; empty writes no file
};

// Plain-text key=value configuration: domain, method, q_list, h_list, seeds,
// constraint, solver, out, and optionally operator and x_R. Lists are
// comma-separated; '#' starts a comment.
StudyConfig parse_study_config(const std::string& path);
StudyConfig parse_study_config_text(const std::string& text);

struct StudyCell {
    int q = 0;
    double h = 0.0;
    int seed_count = 0;
    double mean_n_y = 0.0, mean_n_z = 0.0;
    std::optional<double> e_rms_f1, e_rms_f2, e_rms_g1;
    std::optional<double> mean_k_w, mean_k_v;
    double max_k_w = 0.0, max_k_v = 0.0;  // over seeds, for stability checks
    double max_residual = 0.0;
    std::string dropped_reason;  // empty when the cell was computed
};

struct StudyReport {
    std::vector<StudyCell> cells;  // q-major, h in ladder order
    std::map<int, std::optional<double>> eoc_f1, eoc_f2, eoc_g1;  // per q
    std::string csv;  // the emitted table, also written to cfg.out
};

StudyReport run_study(const StudyConfig& cfg);

// Least-squares slope of log(err) against log(h), using only points whose
// error exceeds 1e-14; nullopt with fewer than 3 usable points.
std::optional<double> fit_eoc(const std::vector<double>& hs, const std::vector<double>& errs);

// Packing spacing (|Omega| / N)^(1/d) of an N-point set.
double packing_spacing(double measure, int n, int dim);

}  // namespace mfq
