#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dvbc/analysis.hpp"
#include "dvbc/document.hpp"
#include "dvbc/fixtures.hpp"

using namespace dvbc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Document load(const std::string& path) { return parse_document(read_file(path)); }

std::string key_str(const SimplexKey& key) {
    std::string out = "[";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(key[i]);
    }
    return out + "]";
}

std::string path_str(const Path& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += "-";
        out += std::to_string(p[i]);
    }
    return out;
}

// ---- the identity suite behind `dvbc check` ----

struct IdentityResult {
    std::string name;
    bool pass = true;
    bool vacuous = true;
    double max_residual = 0.0;

    void record(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs, const Tolerance& tol) {
        vacuous = false;
        max_residual = std::max(max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
        if (!tol.close(lhs, rhs)) pass = false;
    }
};

void compare_cochains(IdentityResult& result, const VectorCochain& lhs, const VectorCochain& rhs,
                      const Tolerance& tol) {
    for (const auto& [key, val] : lhs.values) result.record(val, rhs.value(key), tol);
}

std::vector<IdentityResult> run_identity_suite(const Document& doc, Tolerance tol,
                                               std::uint64_t seed) {
    if (!doc.bundle) throw Error("check: document has no bundle");
    const BundlePtr E = doc.bundle;
    const ComplexPtr X = E->base();
    const int dim = X->dimension();
    std::vector<IdentityResult> results;

    {
        IdentityResult involution{"transport-involution"};
        for (const auto& edge : X->edges()) {
            const MatrixXd product =
                E->transport(edge[0], edge[1]) * E->transport(edge[1], edge[0]);
            involution.record(product, MatrixXd::Identity(product.rows(), product.cols()), tol);
        }
        results.push_back(involution);
    }

    {
        IdentityResult leibniz{"leibniz-sections"};
        const VectorCochain s = fixtures::random_cochain(E, 0, seed + 1);
        const ScalarCochain f = fixtures::random_scalar_cochain(X, 0, seed + 2);
        const VectorCochain lhs = nabla(wedge(s, f, CupOrder::WFirst));
        VectorCochain rhs = wedge(s, d(f), CupOrder::WFirst);
        const VectorCochain second = wedge(nabla(s), f, CupOrder::WFirst);
        for (auto& [key, val] : rhs.values) val += second.values.at(key);
        compare_cochains(leibniz, lhs, rhs, tol);
        results.push_back(leibniz);
    }

    {
        IdentityResult leibniz{"leibniz-cup"};
        for (int k = 0; k <= dim; ++k) {
            for (int l = 0; k + l + 1 <= dim; ++l) {
                const VectorCochain a = fixtures::random_cochain(E, k, seed + 10 + 2 * k + l);
                const ScalarCochain w =
                    fixtures::random_scalar_cochain(X, l, seed + 40 + 2 * l + k);
                const VectorCochain lhs = d_nabla(cup(a, w, CupOrder::AlphaFirst));
                VectorCochain rhs = cup(d_nabla(a), w, CupOrder::AlphaFirst);
                const VectorCochain second = cup(a, d(w), CupOrder::AlphaFirst);
                const double sign = k % 2 == 0 ? 1.0 : -1.0;
                for (auto& [key, val] : rhs.values) val += sign * second.values.at(key);
                compare_cochains(leibniz, lhs, rhs, tol);
            }
        }
        results.push_back(leibniz);
    }

    {
        // The wedge Leibniz rule is exact when the scalar factor has degree
        // 0; higher scalar degrees pick up curvature terms and are outside
        // the pass/fail contract of this command.
        IdentityResult leibniz{"leibniz-wedge-degree0"};
        for (int k = 0; k + 1 <= dim; ++k) {
            const VectorCochain a = fixtures::random_cochain(E, k, seed + 70 + k);
            const ScalarCochain w = fixtures::random_scalar_cochain(X, 0, seed + 80 + k);
            const VectorCochain lhs = d_nabla(wedge(a, w, CupOrder::AlphaFirst));
            VectorCochain rhs = wedge(d_nabla(a), w, CupOrder::AlphaFirst);
            const VectorCochain second = wedge(a, d(w), CupOrder::AlphaFirst);
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            for (auto& [key, val] : rhs.values) val += sign * second.values.at(key);
            compare_cochains(leibniz, lhs, rhs, tol);
        }
        results.push_back(leibniz);
    }

    {
        IdentityResult squared{"dnabla-squared-is-curvature"};
        const HomCochain F = curvature(E);
        for (int degree = 0; degree + 2 <= dim; ++degree) {
            const VectorCochain a = fixtures::random_cochain(E, degree, seed + 90 + degree);
            compare_cochains(squared, d_nabla(d_nabla(a)), hom_action(F, a), tol);
        }
        results.push_back(squared);
    }

    {
        IdentityResult bianchi{"bianchi"};
        if (dim >= 3) {
            const HomCochain dF = d_nabla_hom(curvature(E));
            for (const auto& [key, m] : dF.values)
                bianchi.record(m, MatrixXd::Zero(m.rows(), m.cols()), tol);
        }
        results.push_back(bianchi);
    }

    return results;
}

int report_identities(const std::vector<IdentityResult>& results, bool json) {
    bool all_pass = true;
    if (json) {
        std::string out = "{\n  \"identities\": [\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            all_pass = all_pass && r.pass;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", r.max_residual);
            out += "    {\"max_residual\": " + std::string(buf) + ", \"name\": \"" + r.name +
                   "\", \"pass\": " + (r.pass ? "true" : "false") +
                   ", \"vacuous\": " + (r.vacuous ? "true" : "false") + "}";
            out += i + 1 < results.size() ? ",\n" : "\n";
        }
        out += std::string("  ],\n  \"pass\": ") + (all_pass ? "true" : "false") + "\n}\n";
        std::cout << out;
    } else {
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            std::printf("%s %-28s max residual %.3e%s\n", r.pass ? "PASS" : "FAIL",
                        r.name.c_str(), r.max_residual, r.vacuous ? " (vacuous)" : "");
        }
    }
    return all_pass ? kExitPass : kExitCheckFailure;
}

// ---- commands ----

int cmd_check(const std::string& file, double tol_abs, double tol_rel, std::uint64_t seed,
              bool json) {
    const Document doc = load(file);
    return report_identities(run_identity_suite(doc, Tolerance{tol_abs, tol_rel}, seed), json);
}

int cmd_curvature(const std::string& file, const std::string& name) {
    Document doc = load(file);
    if (!doc.bundle) throw Error("curvature: document has no bundle");
    if (doc.has_cochain(name))
        throw Error("curvature: cochain name '" + name + "' already in use");
    doc.hom_cochains.emplace(name, curvature(doc.bundle));
    std::cout << serialize(doc);
    return kExitPass;
}

int cmd_flat(const std::string& file, double tol_abs, double tol_rel, bool json) {
    const Document doc = load(file);
    if (!doc.bundle) throw Error("flat: document has no bundle");
    const FlatnessReport report = is_flat(*doc.bundle, Tolerance{tol_abs, tol_rel});
    if (json) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", report.max_residual);
        std::cout << "{\"flat\": " << (report.flat ? "true" : "false")
                  << (report.witness ? ", \"witness\": " + key_str(*report.witness) : "")
                  << ", \"max_residual\": " << buf << "}\n";
    } else if (report.flat) {
        std::printf("flat (max holonomy residual %.3e)\n", report.max_residual);
    } else {
        std::printf("not flat: triangle %s has holonomy residual %.3e\n",
                    key_str(*report.witness).c_str(), report.max_residual);
    }
    return report.flat ? kExitPass : kExitCheckFailure;
}

int cmd_trivialize(const std::string& file, double tol_abs, double tol_rel, bool json) {
    Document doc = load(file);
    if (!doc.bundle) throw Error("trivialize: document has no bundle");
    const TrivializationResult result = trivialize(*doc.bundle, Tolerance{tol_abs, tol_rel});
    if (const auto* obstruction = std::get_if<Obstruction>(&result)) {
        const bool non_flat = obstruction->kind == Obstruction::Kind::NonFlat;
        if (json) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", obstruction->residual);
            std::cout << "{\"obstruction\": \""
                      << (non_flat ? "non_flat" : "nontrivial_holonomy") << "\", "
                      << (non_flat ? "\"triangle\": " + key_str(obstruction->triangle)
                                   : "\"loop\": \"" + path_str(obstruction->loop) + "\"")
                      << ", \"residual\": " << buf << "}\n";
        } else if (non_flat) {
            std::printf("obstruction non_flat: triangle %s, residual %.3e\n",
                        key_str(obstruction->triangle).c_str(), obstruction->residual);
        } else {
            std::printf("obstruction nontrivial_holonomy: loop %s, residual %.3e\n",
                        path_str(obstruction->loop).c_str(), obstruction->residual);
        }
        return kExitCheckFailure;
    }
    // Success: emit the trivialized bundle together with the gauge that
    // produced it, so `check` on the output sees identity transports.
    const GaugeTransform& gauge = std::get<GaugeTransform>(result);
    doc.bundle = apply_gauge(*doc.bundle, gauge);
    doc.gauge = gauge;
    std::cout << serialize(doc);
    return kExitPass;
}

int cmd_parallel_sections(const std::string& file, double tol_abs, double tol_rel) {
    Document doc = load(file);
    if (!doc.bundle) throw Error("parallel-sections: document has no bundle");
    const ParallelBasis basis = parallel_sections(doc.bundle, Tolerance{tol_abs, tol_rel});
    std::fprintf(stderr, "parallel sections: dimension %d\n", basis.dimension());
    for (int i = 0; i < basis.dimension(); ++i) {
        const std::string name = "parallel_" + std::to_string(i);
        if (doc.has_cochain(name)) throw Error("parallel-sections: name '" + name + "' in use");
        doc.vector_cochains.emplace(name, basis.sections[static_cast<std::size_t>(i)]);
    }
    std::cout << serialize(doc);
    return kExitPass;
}

int cmd_dnabla(const std::string& file, const std::string& name, std::string out_name) {
    Document doc = load(file);
    if (out_name.empty()) out_name = name + "_d";
    if (doc.has_cochain(out_name))
        throw Error("dnabla: cochain name '" + out_name + "' already in use");
    if (auto it = doc.scalar_cochains.find(name); it != doc.scalar_cochains.end()) {
        doc.scalar_cochains.emplace(out_name, d(it->second));
    } else if (auto vt = doc.vector_cochains.find(name); vt != doc.vector_cochains.end()) {
        doc.vector_cochains.emplace(out_name, d_nabla(vt->second));
    } else if (auto ht = doc.hom_cochains.find(name); ht != doc.hom_cochains.end()) {
        doc.hom_cochains.emplace(out_name, d_nabla_hom(ht->second));
    } else {
        throw Error("dnabla: no cochain named '" + name + "'");
    }
    std::cout << serialize(doc);
    return kExitPass;
}

int cmd_wedge(const std::string& file, const std::string& alpha_name, const std::string& w_name,
              const std::string& order, std::string out_name) {
    Document doc = load(file);
    auto at = doc.vector_cochains.find(alpha_name);
    if (at == doc.vector_cochains.end())
        throw Error("wedge: no vector cochain named '" + alpha_name + "'");
    auto wt = doc.scalar_cochains.find(w_name);
    if (wt == doc.scalar_cochains.end())
        throw Error("wedge: no scalar cochain named '" + w_name + "'");
    if (out_name.empty()) out_name = alpha_name + "_wedge_" + w_name;
    if (doc.has_cochain(out_name))
        throw Error("wedge: cochain name '" + out_name + "' already in use");
    doc.vector_cochains.emplace(
        out_name, wedge(at->second, wt->second,
                        order == "alpha_first" ? CupOrder::AlphaFirst : CupOrder::WFirst));
    std::cout << serialize(doc);
    return kExitPass;
}

int cmd_pullback(const std::string& domain_file, const std::string& codomain_file,
                 const std::string& map_file) {
    const Document domain_doc = load(domain_file);
    const Document codomain_doc = load(codomain_file);
    if (!domain_doc.complex) throw Error("pullback: domain document has no complex");
    if (!codomain_doc.complex) throw Error("pullback: codomain document has no complex");

    // The map file is a small JSON document of its own:
    //   {"vertex_map": [[domain_vertex, codomain_vertex], ...]}
    SimplicialMap f{domain_doc.complex, codomain_doc.complex, {}};
    {
        nlohmann::json json;
        try {
            json = nlohmann::json::parse(read_file(map_file));
        } catch (const nlohmann::json::parse_error& err) {
            throw Error(std::string("pullback map: ") + err.what());
        }
        if (!json.is_object() || !json.contains("vertex_map"))
            throw Error("pullback: map file must contain a vertex_map");
        for (const auto& pair : json["vertex_map"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
                !pair[1].is_number_integer())
                throw Error("pullback: vertex_map entries must be [from, to] pairs");
            f.vertex_map[pair[0].get<int>()] = pair[1].get<int>();
        }
    }
    if (auto violation = check_simplicial_map(f))
        throw Error("pullback: vertex map is not simplicial on simplex " + key_str(*violation));

    Document out;
    out.complex = domain_doc.complex;
    if (codomain_doc.bundle) out.bundle = pullback_bundle(f, *codomain_doc.bundle);
    for (const auto& [name, c] : codomain_doc.scalar_cochains)
        out.scalar_cochains.emplace(name, pullback_cochain(f, c));
    if (out.bundle)
        for (const auto& [name, c] : codomain_doc.vector_cochains)
            out.vector_cochains.emplace(name, pullback_cochain(f, c, out.bundle));
    std::cout << serialize(out);
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete vector bundles with connection over simplicial complexes"};
    app.require_subcommand(1);

    double tol_abs = 1e-9;
    double tol_rel = 1e-9;
    std::uint64_t seed = 0;
    bool json = false;
    std::string file;
    std::string name = "F";
    std::string out_name;
    std::string alpha_name, w_name;
    std::string order = "alpha_first";
    std::string domain_file, codomain_file, map_file;

    auto* check = app.add_subcommand("check", "run the connection identity suite on a document");
    check->add_option("file", file)->required();
    check->add_option("--tol-abs", tol_abs);
    check->add_option("--tol-rel", tol_rel);
    check->add_option("--seed", seed);
    check->add_flag("--json", json);

    auto* curvature_cmd = app.add_subcommand("curvature", "append the curvature 2-cochain");
    curvature_cmd->add_option("file", file)->required();
    curvature_cmd->add_option("--name", name);

    auto* flat = app.add_subcommand("flat", "check holonomy around every triangle");
    flat->add_option("file", file)->required();
    flat->add_option("--tol-abs", tol_abs);
    flat->add_option("--tol-rel", tol_rel);
    flat->add_flag("--json", json);

    auto* trivialize_cmd =
        app.add_subcommand("trivialize", "gauge all transports to the identity");
    trivialize_cmd->add_option("file", file)->required();
    trivialize_cmd->add_option("--tol-abs", tol_abs);
    trivialize_cmd->add_option("--tol-rel", tol_rel);
    trivialize_cmd->add_flag("--json", json);

    auto* parallel = app.add_subcommand("parallel-sections", "find all parallel sections");
    parallel->add_option("file", file)->required();
    parallel->add_option("--tol-abs", tol_abs);
    parallel->add_option("--tol-rel", tol_rel);

    auto* dnabla_cmd = app.add_subcommand("dnabla", "apply the exterior covariant derivative");
    dnabla_cmd->add_option("file", file)->required();
    dnabla_cmd->add_option("cochain", name)->required();
    dnabla_cmd->add_option("--name", out_name);

    auto* wedge_cmd = app.add_subcommand("wedge", "wedge a vector cochain with a scalar cochain");
    wedge_cmd->add_option("file", file)->required();
    wedge_cmd->add_option("alpha", alpha_name)->required();
    wedge_cmd->add_option("w", w_name)->required();
    wedge_cmd->add_option("--order", order)->check(CLI::IsMember({"alpha_first", "w_first"}));
    wedge_cmd->add_option("--name", out_name);

    auto* pullback_cmd =
        app.add_subcommand("pullback", "pull a bundle and cochains back along a map");
    pullback_cmd->add_option("domain", domain_file)->required();
    pullback_cmd->add_option("codomain", codomain_file)->required();
    pullback_cmd->add_option("map", map_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*check) return cmd_check(file, tol_abs, tol_rel, seed, json);
        if (*curvature_cmd) return cmd_curvature(file, name);
        if (*flat) return cmd_flat(file, tol_abs, tol_rel, json);
        if (*trivialize_cmd) return cmd_trivialize(file, tol_abs, tol_rel, json);
        if (*parallel) return cmd_parallel_sections(file, tol_abs, tol_rel);
        if (*dnabla_cmd) return cmd_dnabla(file, name, out_name);
        if (*wedge_cmd) return cmd_wedge(file, alpha_name, w_name, order, out_name);
        if (*pullback_cmd) return cmd_pullback(domain_file, codomain_file, map_file);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
