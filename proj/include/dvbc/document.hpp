#ifndef DVBC_DOCUMENT_HPP
#define DVBC_DOCUMENT_HPP

#include <string>

#include "dvbc/cochain.hpp"

namespace dvbc {

/// A self-describing scenario file: a complex plus any of bundle, metric,
/// named cochains, and gauge, all referring to that complex.  The text form
/// is JSON with a fixed schema; see README for the layout.
struct Document {
    ComplexPtr complex;
    BundlePtr bundle;
    std::optional<Metric> metric;
    std::optional<GaugeTransform> gauge;
    std::map<std::string, ScalarCochain> scalar_cochains;
    std::map<std::string, VectorCochain> vector_cochains;
    std::map<std::string, HomCochain> hom_cochains;

    bool has_cochain(const std::string& name) const;
};

/// Parses and validates a document.  Syntax errors carry line/column from
/// the JSON reader; semantic errors name the offending key (edge, vertex,
/// simplex, cochain).  Transports are keyed by ascending edge [i,j] and
/// hold the stored U_{ij}; an entry with a descending edge supplies an
/// explicit reverse transport instead of the computed inverse (such pairs
/// are validated by `dvbc check`, not at load time).
Document parse_document(const std::string& text);

/// Deterministic canonical text: object keys sorted, simplices and vertices
/// ascending, doubles printed with 17 significant digits.  Composing with
/// parse_document is the identity on canonical documents, byte for byte.
std::string serialize(const Document& doc);

} // namespace dvbc

#endif
