#include "mfq/nodegen.hpp"
#include "mfq/quadrature.hpp"
#include "mfq/reference.hpp"
#include "mfq/study.hpp"
#include "mfq/testfuncs.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace mfq;

struct NodesArgs {
    std::string domain, generator = "advancing-front", out;
    double h = 0.0;
    std::uint64_t seed = 1;
    bool open = false;
};

struct WeightsArgs {
    std::string domain, method = "mfd", constraint = "boundary-constant";
    std::string op = "divergence", solver = "qr", nodes_file, out;
    int q = 4;
    double h = 0.0;
    std::uint64_t seed = 1;
    double rank_tol = -1.0;
};

struct IntegrateArgs : WeightsArgs {
    std::string function = "f1";
};

template <int D>
NodeSet<D> generate_nodes(const Domain<D>& dom, double h, std::uint64_t seed,
                          const std::string& generator, bool open) {
    const GeneratorTag tag = generator_tag_from_name(generator);
    NodeSet<D> nodes = tag == GeneratorTag::AdvancingFront
                           ? advancing_front(dom, h, seed)
                           : rejection_sample(dom, h, tag, seed);
    nodes.closed = !open;
    return nodes;
}

template <int D>
int run_nodes(const NodesArgs& args) {
    std::unique_ptr<Domain<D>> dom;
    if constexpr (D == 2)
        dom = make_domain2(args.domain);
    else
        dom = make_domain3(args.domain);
    const NodeSet<D> nodes = generate_nodes(*dom, args.h, args.seed, args.generator, args.open);
    write_nodes_csv(nodes, args.out);
    std::printf("%s: %d interior + %d boundary nodes -> %s\n", args.domain.c_str(),
                static_cast<int>(nodes.interior.size()), nodes.n_Z(), args.out.c_str());
    return 0;
}

template <int D>
WeightsOptions<D> to_options(const WeightsArgs& args) {
    WeightsOptions<D> opt;
    opt.method = method_from_name(args.method);
    opt.op = operator_from_name(args.op);
    opt.q = args.q;
    opt.constraint = constraint_from_name(args.constraint);
    if (args.solver == "qr")
        opt.solver = SolverPath::RankRevealingQR;
    else if (args.solver == "chol")
        opt.solver = SolverPath::RegularizedNormalEquations;
    else
        throw std::invalid_argument("unknown solver: " + args.solver);
    opt.rank_tol = args.rank_tol;
    return opt;
}

template <int D>
std::pair<std::unique_ptr<Domain<D>>, NodeSet<D>> domain_and_nodes(const WeightsArgs& args) {
    std::unique_ptr<Domain<D>> dom;
    if constexpr (D == 2)
        dom = make_domain2(args.domain);
    else
        dom = make_domain3(args.domain);
    NodeSet<D> nodes;
    if (!args.nodes_file.empty()) {
        nodes = read_nodes_csv<D>(args.nodes_file);
        nodes.h = args.h;
        nodes.seed = args.seed;
    } else {
        nodes = advancing_front(*dom, args.h, args.seed);
    }
    return {std::move(dom), std::move(nodes)};
}

template <int D>
int run_weights(const WeightsArgs& args) {
    auto [dom, nodes] = domain_and_nodes<D>(args);
    const QuadratureRule rule = compute_weights(*dom, nodes, to_options<D>(args));
    write_weights_csv(args.out, rule, nodes);
    std::printf("%s %s q=%d h=%s seed=%llu: residual=%s K_w=%s K_v=%s -> %s\n",
                args.domain.c_str(), args.method.c_str(), args.q, fmt_g17(args.h).c_str(),
                static_cast<unsigned long long>(args.seed), fmt_g17(rule.residual_inf).c_str(),
                fmt_g17(rule.K_w).c_str(), fmt_g17(rule.K_v).c_str(), args.out.c_str());
    return 0;
}

template <int D>
int run_integrate(const IntegrateArgs& args) {
    auto [dom, nodes] = domain_and_nodes<D>(args);
    const QuadratureRule rule = compute_weights(*dom, nodes, to_options<D>(args));

    std::function<double(const Pt<D>&)> fn;
    IntegralTarget target = IntegralTarget::Interior;
    if (args.function == "f1") {
        fn = [&](const Pt<D>& p) { return runge<D>(p, dom->runge_center); };
    } else if (args.function == "f2") {
        fn = [](const Pt<D>& p) { return smooth_test<D>(p); };
    } else if (args.function == "one") {
        fn = [](const Pt<D>&) { return 1.0; };
    } else if (args.function == "g1") {
        fn = [&](const Pt<D>& p) { return runge<D>(p, dom->runge_center); };
        target = IntegralTarget::Boundary;
    } else {
        throw std::invalid_argument("unknown function: " + args.function +
                                    " (expected f1, f2, g1, or one)");
    }

    double value;
    if (target == IntegralTarget::Interior) {
        const std::vector<Pt<D>> Y = nodes.quadrature_nodes();
        Eigen::VectorXd s(Y.size());
        for (std::size_t i = 0; i < Y.size(); ++i) s[static_cast<int>(i)] = fn(Y[i]);
        value = rule.w.dot(s);
    } else {
        Eigen::VectorXd s(nodes.boundary.size());
        for (std::size_t i = 0; i < nodes.boundary.size(); ++i)
            s[static_cast<int>(i)] = fn(nodes.boundary[i].point);
        value = rule.v.dot(s);
    }
    std::printf("integral(%s) = %s\n", args.function.c_str(), fmt_g17(value).c_str());
    try {
        const double ref = reference_integral<D>(*dom, fn, target);
        std::printf("reference       = %s\n", fmt_g17(ref).c_str());
        std::printf("relative error  = %s\n",
                    fmt_g17(std::abs(value - ref) / std::abs(ref)).c_str());
    } catch (const std::exception& e) {
        std::printf("reference unavailable: %s\n", e.what());
    }
    return 0;
}

int run_study_cmd(const std::string& config_path) {
    const StudyConfig cfg = parse_study_config(config_path);
    const StudyReport report = run_study(cfg);
    for (const auto& [q, eoc] : report.eoc_f1) {
        std::printf("q=%d EOC_f1=%s EOC_f2=%s EOC_g1=%s\n", q,
                    eoc ? fmt_g17(*eoc).c_str() : "n/a",
                    report.eoc_f2.at(q) ? fmt_g17(*report.eoc_f2.at(q)).c_str() : "n/a",
                    report.eoc_g1.at(q) ? fmt_g17(*report.eoc_g1.at(q)).c_str() : "n/a");
    }
    if (!cfg.out.empty())
        std::printf("wrote %s\n", cfg.out.c_str());
    else
        std::fputs(report.csv.c_str(), stdout);
    return 0;
}

int dispatch_dim(const std::string& domain) {
    const int dim = domain_dim(domain);
    if (dim == 0) throw std::invalid_argument("unknown domain: " + domain);
    return dim;
}

void add_weight_flags(CLI::App* cmd, WeightsArgs& args) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--domain", args.domain, "builtin domain name")->required();
    cmd->add_option("--method", args.method, "mfd or bsp");
    cmd->add_option("--q", args.q, "consistency order");
    cmd->add_option("--h", args.h, "target node spacing")->required();
    cmd->add_option("--seed", args.seed, "node generation seed");
    cmd->add_option("--constraint", args.constraint,
                    "boundary-constant, interior-constant, combined, fundamental-solution, both");
    cmd->add_option("--operator", args.op, "divergence or elliptic");
    cmd->add_option("--solver", args.solver, "qr or chol");
    cmd->add_option("--rank-tol", args.rank_tol, "QR rank tolerance (default per dimension)");
    cmd->add_option("--nodes", args.nodes_file, "node CSV to reuse instead of generating");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Combined interior/boundary quadrature weights on scattered nodes"};
    app.require_subcommand(1);

    auto* cmd_domains = app.add_subcommand("domains", "list builtin domains");

    NodesArgs nodes_args;
    auto* cmd_nodes = app.add_subcommand("nodes", "generate a node set and write it as CSV");
    cmd_nodes->set_help_flag("--help", "print help");
    cmd_nodes->add_option("--domain", nodes_args.domain, "builtin domain name")->required();
    cmd_nodes->add_option("--h", nodes_args.h, "target node spacing")->required();
    cmd_nodes->add_option("--seed", nodes_args.seed, "generation seed");
    cmd_nodes->add_option("--generator", nodes_args.generator,
                          "advancing-front, grid, halton, or random");
    cmd_nodes->add_flag("--open", nodes_args.open,
                        "exclude boundary nodes from the interior-quadrature set");
    cmd_nodes->add_option("--out", nodes_args.out, "output CSV path")->required();

    WeightsArgs weights_args;
    auto* cmd_weights = app.add_subcommand("weights", "compute quadrature weights, write CSV");
    add_weight_flags(cmd_weights, weights_args);
    cmd_weights->add_option("--out", weights_args.out, "output CSV path")->required();

    IntegrateArgs integrate_args;
    auto* cmd_integrate =
        app.add_subcommand("integrate", "compute weights and integrate a test function");
    add_weight_flags(cmd_integrate, integrate_args);
    cmd_integrate->add_option("--function", integrate_args.function, "f1, f2, g1, or one");

    std::string config_path;
    auto* cmd_study = app.add_subcommand("study", "run a convergence study from a config file");
    cmd_study->add_option("--config", config_path, "key=value config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help();
        return 1;
    }

    try {
        if (cmd_domains->parsed()) {
            for (const auto& name : builtin_domain_names()) std::printf("%s\n", name.c_str());
            return 0;
        }
        if (cmd_nodes->parsed())
            return dispatch_dim(nodes_args.domain) == 2 ? run_nodes<2>(nodes_args)
                                                        : run_nodes<3>(nodes_args);
        if (cmd_weights->parsed())
            return dispatch_dim(weights_args.domain) == 2 ? run_weights<2>(weights_args)
                                                          : run_weights<3>(weights_args);
        if (cmd_integrate->parsed())
            return dispatch_dim(integrate_args.domain) == 2 ? run_integrate<2>(integrate_args)
                                                            : run_integrate<3>(integrate_args);
        if (cmd_study->parsed()) return run_study_cmd(config_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
