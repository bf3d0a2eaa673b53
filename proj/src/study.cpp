#include "mfq/study.hpp"

#include "mfq/nodegen.hpp"
#include "mfq/reference.hpp"
#include "mfq/testfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfq {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

SolverPath solver_from_name(const std::string& s) {
    if (s == "qr") return SolverPath::RankRevealingQR;
    if (s == "chol") return SolverPath::RegularizedNormalEquations;
    throw std::invalid_argument("unknown solver: " + s + " (expected qr or chol)");
}

}  // namespace

StudyConfig parse_study_config_text(const std::string& text) {
    StudyConfig cfg;
    bool has_q = false, has_h = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "domain") {
            cfg.domain = value;
        } else if (key == "method") {
            cfg.method = method_from_name(value);
        } else if (key == "operator") {
            cfg.op = operator_from_name(value);
        } else if (key == "q_list") {
            cfg.q_list.clear();
            for (const auto& t : split_list(value)) cfg.q_list.push_back(std::stoi(t));
            has_q = true;
        } else if (key == "h_list") {
            cfg.h_list.clear();
            for (const auto& t : split_list(value)) cfg.h_list.push_back(std::stod(t));
            has_h = true;
        } else if (key == "seeds") {
            cfg.seeds = std::stoi(value);
        } else if (key == "constraint") {
            cfg.constraint = constraint_from_name(value);
        } else if (key == "solver") {
            cfg.solver = solver_from_name(value);
        } else if (key == "x_R") {
            std::vector<double> xr;
            for (const auto& t : split_list(value)) xr.push_back(std::stod(t));
            cfg.x_R = std::move(xr);
        } else if (key == "out") {
            cfg.out = value;
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    if (cfg.domain.empty()) throw std::invalid_argument("config is missing domain");
    if (!has_q || cfg.q_list.empty()) throw std::invalid_argument("config is missing q_list");
    if (!has_h || cfg.h_list.empty()) throw std::invalid_argument("config is missing h_list");
    for (std::size_t i = 1; i < cfg.h_list.size(); ++i)
        if (!(cfg.h_list[i] < cfg.h_list[i - 1]))
            throw std::invalid_argument("h_list must be strictly decreasing");
    if (cfg.seeds < 1) throw std::invalid_argument("seeds must be at least 1");
    if (domain_dim(cfg.domain) == 0)
        throw std::invalid_argument("unknown domain: " + cfg.domain);
    return cfg;
}

StudyConfig parse_study_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_study_config_text(buf.str());
}

std::optional<double> fit_eoc(const std::vector<double>& hs, const std::vector<double>& errs) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (std::isfinite(errs[i]) && errs[i] > 1e-14) {
            x.push_back(std::log(hs[i]));
            y.push_back(std::log(errs[i]));
        }
    }
    if (x.size() < 3) return std::nullopt;
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= x.size();
    ym /= y.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

double packing_spacing(double measure, int n, int dim) {
    return std::pow(measure / n, 1.0 / dim);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? fmt_g17(*v) : std::string();
}

template <int D>
StudyReport run_study_impl(const StudyConfig& cfg) {
    std::unique_ptr<Domain<D>> domp;
    if constexpr (D == 2)
        domp = make_domain2(cfg.domain);
    else
        domp = make_domain3(cfg.domain);
    const Domain<D>& dom = *domp;

    Pt<D> xr = dom.runge_center;
    if (cfg.x_R) {
        if (static_cast<int>(cfg.x_R->size()) != D)
            throw std::invalid_argument("x_R has the wrong dimension");
        for (int k = 0; k < D; ++k) xr[k] = (*cfg.x_R)[k];
    }
    const auto f1 = [&](const Pt<D>& p) { return runge<D>(p, xr); };
    const auto f2 = [&](const Pt<D>& p) { return smooth_test<D>(p); };

    std::optional<double> ref_f1, ref_f2, ref_g1;
    try {
        ref_f1 = reference_integral<D>(dom, f1, IntegralTarget::Interior);
        ref_f2 = reference_integral<D>(dom, f2, IntegralTarget::Interior);
        ref_g1 = reference_integral<D>(dom, f1, IntegralTarget::Boundary);
    } catch (const std::exception&) {
        // Domains without parametric patches keep their error columns empty.
    }

    StudyReport report;
    for (int q : cfg.q_list) {
        std::vector<double> cell_h, cell_e1, cell_e2, cell_eg;
        for (double h : cfg.h_list) {
            StudyCell cell;
            cell.q = q;
            cell.h = h;
            cell.seed_count = cfg.seeds;
            double s1 = 0.0, s2 = 0.0, sg = 0.0, skw = 0.0, skv = 0.0, sny = 0.0, snz = 0.0;
            int used = 0;
            for (int seed = 1; seed <= cfg.seeds && cell.dropped_reason.empty(); ++seed) {
                const NodeSet<D> nodes = advancing_front(dom, h, seed);
                WeightsOptions<D> opt;
                opt.method = cfg.method;
                opt.op = cfg.op;
                opt.q = q;
                opt.constraint = cfg.constraint;
                opt.solver = cfg.solver;
                QuadratureRule rule;
                try {
                    rule = compute_weights(dom, nodes, opt);
                } catch (const RefusalError& e) {
                    cell.dropped_reason = e.code();
                    break;
                }
                const std::vector<Pt<D>> Y = nodes.quadrature_nodes();
                Eigen::VectorXd f1y(Y.size()), f2y(Y.size()), g1z(nodes.boundary.size());
                for (std::size_t i = 0; i < Y.size(); ++i) {
                    f1y[static_cast<int>(i)] = f1(Y[i]);
                    f2y[static_cast<int>(i)] = f2(Y[i]);
                }
                for (std::size_t i = 0; i < nodes.boundary.size(); ++i)
                    g1z[static_cast<int>(i)] = f1(nodes.boundary[i].point);
                if (ref_f1) {
                    const double e = std::abs(rule.w.dot(f1y) - *ref_f1) / std::abs(*ref_f1);
                    s1 += e * e;
                }
                if (ref_f2) {
                    const double e = std::abs(rule.w.dot(f2y) - *ref_f2) / std::abs(*ref_f2);
                    s2 += e * e;
                }
                if (ref_g1) {
                    const double e = std::abs(rule.v.dot(g1z) - *ref_g1) / std::abs(*ref_g1);
                    sg += e * e;
                }
                skw += rule.K_w;
                skv += rule.K_v;
                cell.max_k_w = std::max(cell.max_k_w, rule.K_w);
                cell.max_k_v = std::max(cell.max_k_v, rule.K_v);
                cell.max_residual = std::max(cell.max_residual, rule.residual_inf);
                sny += nodes.n_Y();
                snz += nodes.n_Z();
                ++used;
            }
            if (cell.dropped_reason.empty() && used > 0) {
                cell.mean_n_y = sny / used;
                cell.mean_n_z = snz / used;
                cell.mean_k_w = skw / used;
                cell.mean_k_v = skv / used;
                if (ref_f1) cell.e_rms_f1 = std::sqrt(s1 / used);
                if (ref_f2) cell.e_rms_f2 = std::sqrt(s2 / used);
                if (ref_g1) cell.e_rms_g1 = std::sqrt(sg / used);
                cell_h.push_back(h);
                cell_e1.push_back(cell.e_rms_f1.value_or(std::nan("")));
                cell_e2.push_back(cell.e_rms_f2.value_or(std::nan("")));
                cell_eg.push_back(cell.e_rms_g1.value_or(std::nan("")));
            }
            report.cells.push_back(std::move(cell));
        }
        report.eoc_f1[q] = fit_eoc(cell_h, cell_e1);
        report.eoc_f2[q] = fit_eoc(cell_h, cell_e2);
        report.eoc_g1[q] = fit_eoc(cell_h, cell_eg);
    }

    std::ostringstream csv;
    csv << "method,q,h,seed_count,N_Y,N_Z,e_rms_f1,e_rms_f2,e_rms_g1,K_w,K_v,"
           "EOC_f1,EOC_f2,EOC_g1,dropped_reason\n";
    for (const StudyCell& cell : report.cells) {
        csv << method_name(cfg.method) << ',' << cell.q << ',' << fmt_g17(cell.h) << ','
            << cell.seed_count << ',';
        if (cell.dropped_reason.empty())
            csv << fmt_g17(cell.mean_n_y) << ',' << fmt_g17(cell.mean_n_z);
        else
            csv << ',';
        csv << ',' << opt_field(cell.e_rms_f1) << ',' << opt_field(cell.e_rms_f2) << ','
            << opt_field(cell.e_rms_g1) << ',' << opt_field(cell.mean_k_w) << ','
            << opt_field(cell.mean_k_v) << ',' << opt_field(report.eoc_f1[cell.q]) << ','
            << opt_field(report.eoc_f2[cell.q]) << ',' << opt_field(report.eoc_g1[cell.q])
            << ',' << cell.dropped_reason << '\n';
    }
    report.csv = csv.str();

    if (!cfg.out.empty()) {
        std::ofstream out(cfg.out);
        if (!out) throw std::runtime_error("cannot open " + cfg.out + " for writing");
        out << report.csv;
        if (!out) throw std::runtime_error("failed writing " + cfg.out);
    }
    return report;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
    const int dim = domain_dim(cfg.domain);
    if (dim == 2) return run_study_impl<2>(cfg);
    if (dim == 3) return run_study_impl<3>(cfg);
    throw std::invalid_argument("unknown domain: " + cfg.domain);
}

}  // namespace mfq
