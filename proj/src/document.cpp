#include "dvbc/document.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dvbc {

namespace {

using nlohmann::json;

std::string fmt_double(double x) {
    if (!std::isfinite(x)) throw Error("serialize: non-finite number");
    // "-0" would reparse through the integer path and lose its sign.
    if (x == 0.0) return std::signbit(x) ? "-0.0" : "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_int_array(const std::vector<VertexId>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(xs[i]);
    }
    return out + "]";
}

std::string fmt_vector(const VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v(i));
    }
    return out + "]";
}

std::string fmt_matrix(const MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) out += ",";
        out += fmt_vector(m.row(r).transpose());
    }
    return out + "]";
}

// ---- parsing helpers ----

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw Error("document: missing key '" + std::string(key) + "' in " + where);
    return *it;
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw Error("document: expected integer in " + where);
    return j.get<int>();
}

double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) throw Error("document: expected number in " + where);
    return j.get<double>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw Error("document: expected string in " + where);
    return j.get<std::string>();
}

SimplexKey as_vertex_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw Error("document: expected vertex list in " + where);
    SimplexKey key;
    for (const auto& item : j) {
        int v = as_int(item, where);
        if (v < 0) throw Error("document: negative vertex id in " + where);
        key.push_back(v);
    }
    return key;
}

VectorXd as_vector(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw Error("document: expected vector in " + where);
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_double(j[i], where);
    return v;
}

MatrixXd as_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw Error("document: expected matrix in " + where);
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    MatrixXd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.empty())
            throw Error("document: expected matrix row in " + where);
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw Error("document: matrix row length mismatch in " + where);
        }
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                as_double(row[c], where);
    }
    return m;
}

std::string simplex_str(const SimplexKey& key) { return fmt_int_array(key); }

} // namespace

bool Document::has_cochain(const std::string& name) const {
    return scalar_cochains.count(name) || vector_cochains.count(name) ||
           hom_cochains.count(name);
}

Document parse_document(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw Error(std::string("document: ") + err.what());
    }
    if (!root.is_object()) throw Error("document: top level must be an object");
    if (as_int(require(root, "format", "document"), "format") != 1)
        throw Error("document: unsupported format version (expected 1)");

    Document doc;
    if (auto it = root.find("complex"); it != root.end()) {
        const json& cells = require(*it, "top_cells", "complex");
        if (!cells.is_array()) throw Error("document: complex.top_cells must be an array");
        std::vector<std::vector<VertexId>> top_cells;
        for (const auto& cell : cells) top_cells.push_back(as_vertex_list(cell, "complex.top_cells"));
        doc.complex = build_complex(top_cells);
    }

    auto need_complex = [&]() -> ComplexPtr {
        if (!doc.complex) throw Error("document: section requires a complex");
        return doc.complex;
    };

    if (auto it = root.find("bundle"); it != root.end()) {
        ComplexPtr X = need_complex();
        const json& jdims = require(*it, "dims", "bundle");
        std::map<VertexId, int> dims;
        if (jdims.is_number_integer()) {
            for (VertexId v : X->vertices()) dims[v] = jdims.get<int>();
        } else if (jdims.is_array()) {
            for (const auto& pair : jdims) {
                if (!pair.is_array() || pair.size() != 2)
                    throw Error("document: bundle.dims entries must be [vertex, dim] pairs");
                dims[as_int(pair[0], "bundle.dims")] = as_int(pair[1], "bundle.dims");
            }
        } else {
            throw Error("document: bundle.dims must be an integer or [vertex, dim] pairs");
        }
        const json& jtrans = require(*it, "transports", "bundle");
        if (!jtrans.is_array()) throw Error("document: bundle.transports must be an array");
        std::map<SimplexKey, MatrixXd> forward;
        std::map<SimplexKey, MatrixXd> reverse;
        for (const auto& entry : jtrans) {
            SimplexKey edge = as_vertex_list(require(entry, "edge", "bundle.transports"),
                                             "bundle.transports.edge");
            if (edge.size() != 2 || edge[0] == edge[1])
                throw Error("document: transport edge " + simplex_str(edge) +
                            " must name two distinct vertices");
            MatrixXd m = as_matrix(require(entry, "matrix", "bundle.transports"),
                                   "transport on edge " + simplex_str(edge));
            auto& target = edge[0] < edge[1] ? forward : reverse;
            SimplexKey key = edge[0] < edge[1] ? edge : SimplexKey{edge[1], edge[0]};
            if (!target.emplace(key, std::move(m)).second)
                throw Error("document: duplicate transport for edge " + simplex_str(edge));
        }
        doc.bundle = std::make_shared<Bundle>(Bundle::create_with_reverse(
            X, std::move(dims), std::move(forward), std::move(reverse)));
    }

    if (auto it = root.find("metric"); it != root.end()) {
        need_complex();
        if (!doc.bundle) throw Error("document: metric requires a bundle");
        if (!it->is_array()) throw Error("document: metric must be an array");
        Metric M;
        for (const auto& entry : *it) {
            const int v = as_int(require(entry, "vertex", "metric"), "metric.vertex");
            if (!M.gram.emplace(v, as_matrix(require(entry, "matrix", "metric"),
                                             "metric at vertex " + std::to_string(v)))
                     .second)
                throw Error("document: duplicate metric entry for vertex " + std::to_string(v));
        }
        validate_metric(*doc.bundle, M);
        doc.metric = std::move(M);
    }

    if (auto it = root.find("gauge"); it != root.end()) {
        need_complex();
        if (!doc.bundle) throw Error("document: gauge requires a bundle");
        if (!it->is_array()) throw Error("document: gauge must be an array");
        GaugeTransform g;
        for (const auto& entry : *it) {
            const int v = as_int(require(entry, "vertex", "gauge"), "gauge.vertex");
            if (!g.g.emplace(v, as_matrix(require(entry, "matrix", "gauge"),
                                          "gauge at vertex " + std::to_string(v)))
                     .second)
                throw Error("document: duplicate gauge entry for vertex " + std::to_string(v));
        }
        validate_gauge(*doc.bundle, g);
        doc.gauge = std::move(g);
    }

    if (auto it = root.find("cochains"); it != root.end()) {
        ComplexPtr X = need_complex();
        if (!it->is_array()) throw Error("document: cochains must be an array");
        for (const auto& entry : *it) {
            const std::string name = as_string(require(entry, "name", "cochains"), "cochains.name");
            const std::string type = as_string(require(entry, "type", "cochains"), "cochains.type");
            const int degree = as_int(require(entry, "degree", "cochains"), "cochain '" + name + "'");
            if (degree < 0 || degree > X->dimension())
                throw Error("document: cochain '" + name + "' has degree outside the complex");
            if (doc.has_cochain(name))
                throw Error("document: duplicate cochain name '" + name + "'");
            const json& values = require(entry, "values", "cochain '" + name + "'");
            if (!values.is_array())
                throw Error("document: cochain '" + name + "' values must be an array");
            if ((type == "vector" || type == "hom") && !doc.bundle)
                throw Error("document: cochain '" + name + "' requires a bundle");
            auto simplex_of = [&](const json& v) {
                SimplexKey key = as_vertex_list(require(v, "simplex", "cochain '" + name + "'"),
                                                "cochain '" + name + "'");
                if (static_cast<int>(key.size()) != degree + 1 || !X->has_simplex(key))
                    throw Error("document: cochain '" + name + "' references unknown " +
                                std::to_string(key.size() - 1) + "-simplex " + simplex_str(key));
                return key;
            };
            if (type == "scalar") {
                ScalarCochain c{X, degree, {}};
                for (const auto& v : values)
                    c.values[simplex_of(v)] =
                        as_double(require(v, "value", "cochain '" + name + "'"), name);
                doc.scalar_cochains.emplace(name, std::move(c));
            } else if (type == "vector") {
                VectorCochain c{doc.bundle, degree, {}};
                for (const auto& v : values) {
                    SimplexKey key = simplex_of(v);
                    VectorXd vec = as_vector(require(v, "value", "cochain '" + name + "'"),
                                             "cochain '" + name + "' on " + simplex_str(key));
                    if (vec.size() != doc.bundle->dim(key.front()))
                        throw Error("document: cochain '" + name + "' on " + simplex_str(key) +
                                    " has wrong fiber dimension");
                    c.values[std::move(key)] = std::move(vec);
                }
                doc.vector_cochains.emplace(name, std::move(c));
            } else if (type == "hom") {
                HomCochain c{doc.bundle, degree, {}};
                for (const auto& v : values) {
                    SimplexKey key = simplex_of(v);
                    MatrixXd m = as_matrix(require(v, "value", "cochain '" + name + "'"),
                                           "cochain '" + name + "' on " + simplex_str(key));
                    if (m.rows() != doc.bundle->dim(key.front()) ||
                        m.cols() != doc.bundle->dim(key.back()))
                        throw Error("document: cochain '" + name + "' on " + simplex_str(key) +
                                    " has wrong shape");
                    c.values[std::move(key)] = std::move(m);
                }
                doc.hom_cochains.emplace(name, std::move(c));
            } else {
                throw Error("document: cochain '" + name + "' has unknown type '" + type + "'");
            }
        }
    }
    return doc;
}

std::string serialize(const Document& doc) {
    std::vector<std::pair<std::string, std::string>> sections;

    if (doc.bundle) {
        std::ostringstream out;
        out << "{\n    \"dims\": ";
        const auto& dims = doc.bundle->dims();
        bool uniform = true;
        for (const auto& [v, d] : dims) uniform = uniform && d == dims.begin()->second;
        if (uniform) {
            out << dims.begin()->second;
        } else {
            out << "[";
            bool first = true;
            for (const auto& [v, d] : dims) {
                if (!first) out << ",";
                first = false;
                out << "[" << v << "," << d << "]";
            }
            out << "]";
        }
        std::string body;
        for (const auto& [edge, m] : doc.bundle->stored_transports()) {
            if (!body.empty()) body += ",\n";
            body += "      {\"edge\": " + fmt_int_array(edge) + ", \"matrix\": " + fmt_matrix(m) +
                    "}";
        }
        for (const auto& [edge, m] : doc.bundle->reverse_overrides()) {
            if (!body.empty()) body += ",\n";
            body += "      {\"edge\": " + fmt_int_array({edge[1], edge[0]}) +
                    ", \"matrix\": " + fmt_matrix(m) + "}";
        }
        out << ",\n    \"transports\": "
            << (body.empty() ? std::string("[]") : "[\n" + body + "\n    ]") << "\n  }";
        sections.emplace_back("bundle", out.str());
    }

    {
        // All cochains in one list, sorted by name.
        std::map<std::string, std::string> rendered;
        auto emit = [&](const std::string& name, const std::string& type, int degree,
                        const std::string& values) {
            std::ostringstream out;
            out << "{\n      \"degree\": " << degree << ",\n      \"name\": \"" << name
                << "\",\n      \"type\": \"" << type << "\",\n      \"values\": "
                << (values.empty() ? std::string("[]") : "[\n" + values + "\n      ]")
                << "\n    }";
            rendered[name] = out.str();
        };
        auto entry_line = [](const SimplexKey& key, const std::string& value) {
            return "        {\"simplex\": " + fmt_int_array(key) + ", \"value\": " + value + "}";
        };
        for (const auto& [name, c] : doc.scalar_cochains) {
            std::string body;
            for (const auto& [key, v] : c.values) {
                if (!body.empty()) body += ",\n";
                body += entry_line(key, fmt_double(v));
            }
            emit(name, "scalar", c.degree, body);
        }
        for (const auto& [name, c] : doc.vector_cochains) {
            std::string body;
            for (const auto& [key, v] : c.values) {
                if (!body.empty()) body += ",\n";
                body += entry_line(key, fmt_vector(v));
            }
            emit(name, "vector", c.degree, body);
        }
        for (const auto& [name, c] : doc.hom_cochains) {
            std::string body;
            for (const auto& [key, v] : c.values) {
                if (!body.empty()) body += ",\n";
                body += entry_line(key, fmt_matrix(v));
            }
            emit(name, "hom", c.degree, body);
        }
        if (!rendered.empty()) {
            std::string out = "[\n";
            bool first = true;
            for (const auto& [name, text] : rendered) {
                if (!first) out += ",\n";
                first = false;
                out += "    " + text;
            }
            out += "\n  ]";
            sections.emplace_back("cochains", out);
        }
    }

    if (doc.complex) {
        std::string out = "{\n    \"top_cells\": [\n";
        const auto facets = doc.complex->facets();
        for (std::size_t i = 0; i < facets.size(); ++i) {
            if (i) out += ",\n";
            out += "      " + fmt_int_array(facets[i]);
        }
        out += "\n    ]\n  }";
        sections.emplace_back("complex", out);
    }

    sections.emplace_back("format", "1");

    auto vertex_matrix_section = [&](const std::map<VertexId, MatrixXd>& entries) {
        std::string out = "[\n";
        bool first = true;
        for (const auto& [v, m] : entries) {
            if (!first) out += ",\n";
            first = false;
            out += "    {\"matrix\": " + fmt_matrix(m) + ", \"vertex\": " + std::to_string(v) + "}";
        }
        out += "\n  ]";
        return out;
    };
    if (doc.gauge) sections.emplace_back("gauge", vertex_matrix_section(doc.gauge->g));
    if (doc.metric) sections.emplace_back("metric", vertex_matrix_section(doc.metric->gram));

    std::sort(sections.begin(), sections.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "{\n";
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (i) out += ",\n";
        out += "  \"" + sections[i].first + "\": " + sections[i].second;
    }
    out += "\n}\n";
    return out;
}

} // namespace dvbc
