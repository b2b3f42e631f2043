#pragma once

// JSON certificate files for construct_singular.  Everything the verifier
// needs is stored exactly: field data, surface text, the lines as (p, q),
// dyadic box bounds as rationals, and the base point.  The real-valued stage
// fields are informational; verify_certificate recomputes them.

#include "dioph/error.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"
#include "dioph/singconstruct.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dioph {

inline constexpr const char* kCertificateFormat = "dioph-certificate/1";

namespace detail {

using json = nlohmann::json;

inline json element_json(const FieldElement& a) {
    json j = json::array();
    for (const auto& c : a.coords) j.push_back(format_rational(c));
    return j;
}

inline FieldElement element_from_json(const Field& K, const json& j) {
    if (!j.is_array() || static_cast<int>(j.size()) != K.degree())
        throw Error(ErrorKind::InvalidInput, "field element needs " + std::to_string(K.degree()) + " coordinates");
    std::vector<Rational> c;
    for (const auto& v : j) c.push_back(parse_rational(v.get<std::string>()));
    return K.from_coords(c);
}

inline const json& member(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("certificate lacks '") + key + "'");
    return j.at(key);
}

}  // namespace detail

inline nlohmann::json certificate_to_json(const ConstructionOutput& c) {
    using detail::json;
    const Field& K = c.field;
    const int d = K.degree();
    const int m = c.surface.m();
    json j;
    j["format"] = kCertificateFormat;

    json f;
    f["minpoly"] = json::array();
    for (const auto& a : K.min_poly()) f["minpoly"].push_back(a.str());
    f["basis"] = json::array();
    for (int r = 0; r < d; ++r) {
        json row = json::array();
        for (int k = 0; k < d; ++k) row.push_back(format_rational(K.integral_basis()(r, k)));
        f["basis"].push_back(row);
    }
    f["precision"] = K.precision_bits();
    j["field"] = f;

    j["surface"] = {{"graph", c.surface.graph_text}, {"box", c.surface.domain_text}};
    j["zeta"] = c.zeta.text;
    j["phi"] = c.phi.name();
    j["seed"] = c.seed;
    j["dyadic_bits"] = c.dyadic_bits;

    j["stages"] = json::array();
    for (const auto& st : c.stages) {
        json s;
        s["index"] = st.index;
        s["family"] = st.line.family;
        s["p"] = detail::element_json(st.line.p(K));
        s["q"] = json::array();
        for (const auto& e : st.line.q(K, m)) s["q"].push_back(detail::element_json(e));
        s["box"] = json::array();
        for (const auto& b : st.box) {
            json pb = json::array();
            for (const auto& v : b) pb.push_back(format_rational(v));
            s["box"].push_back(pb);
        }
        s["phi"] = format_real(st.phi, 20);
        s["zeta_phi"] = format_real(st.zeta_phi, 20);
        s["e_bound"] = format_real(st.e_bound, 20);
        s["margin"] = format_real(st.e_margin, 20);
        j["stages"].push_back(s);
    }

    j["base"] = json::array();
    for (const auto& u : c.base) j["base"].push_back({format_rational(u[0]), format_rational(u[1])});
    j["point"] = json::array();
    for (const auto& row : c.point.rows) {
        json r = json::array();
        for (const auto& e : row) r.push_back(detail::element_json(e));
        j["point"].push_back(r);
    }
    j["warnings"] = c.warnings;
    return j;
}

/// Rebuilds a ConstructionOutput.  The line of each stage is read from
/// (p, q): q must be b e_k with k in {1, 2}, and then x_k = -p / b.
inline ConstructionOutput certificate_from_json(const nlohmann::json& j) {
    using detail::member;
    if (member(j, "format").get<std::string>() != kCertificateFormat)
        throw Error(ErrorKind::InvalidInput, "unknown certificate format");
    try {
        const auto& f = member(j, "field");
        std::vector<Integer> poly;
        for (const auto& a : member(f, "minpoly")) poly.emplace_back(a.get<std::string>());
        FieldOptions opts;
        opts.precision_bits = member(f, "precision").get<int>();
        const auto& bj = member(f, "basis");
        const std::size_t d = poly.size() - 1;
        if (bj.size() != d) throw Error(ErrorKind::InvalidBasis, "basis needs " + std::to_string(d) + " rows");
        Matrix<Rational> B(d, d);
        for (std::size_t r = 0; r < d; ++r) {
            if (bj[r].size() != d) throw Error(ErrorKind::InvalidBasis, "basis row of wrong length");
            for (std::size_t k = 0; k < d; ++k) B(r, k) = parse_rational(bj[r][k].get<std::string>());
        }
        opts.basis = B;
        Field K = Field::create(poly, opts);

        const auto& sj = member(j, "surface");
        ConstructionOutput c{K,
                             SurfaceSpec::parse(K, member(sj, "graph").get<std::string>(), member(sj, "box").get<std::string>()),
                             {}, {}, 0, 224, {}, {}, {}, {}};
        c.zeta = Zeta::parse(member(j, "zeta").get<std::string>());
        c.phi = Phi::parse(member(j, "phi").get<std::string>());
        c.seed = member(j, "seed").get<unsigned long>();
        c.dyadic_bits = member(j, "dyadic_bits").get<int>();
        const int m = c.surface.m();

        for (const auto& s : member(j, "stages")) {
            StageCertificate st;
            st.index = member(s, "index").get<int>();
            const auto& qj = member(s, "q");
            if (static_cast<int>(qj.size()) != m) throw Error(ErrorKind::InvalidInput, "q has wrong length");
            std::vector<FieldElement> q;
            for (const auto& e : qj) q.push_back(detail::element_from_json(K, e));
            int k = -1;
            for (int i = 0; i < m; ++i)
                if (!q[i].is_zero()) {
                    if (k >= 0 || i > 1)
                        throw Error(ErrorKind::Unsupported, "stage " + std::to_string(st.index) + ": q is not b e_1 or b e_2");
                    k = i;
                }
            if (k < 0) throw Error(ErrorKind::InvalidInput, "stage " + std::to_string(st.index) + ": q = 0");
            st.line.family = k + 1;
            st.line.b = q[k];
            st.line.a = K.neg(detail::element_from_json(K, member(s, "p")));
            if (member(s, "family").get<int>() != st.line.family)
                throw Error(ErrorKind::InvalidInput, "stage " + std::to_string(st.index) + ": family disagrees with q");
            for (const auto& pb : member(s, "box")) {
                if (pb.size() != 4) throw Error(ErrorKind::InvalidInput, "place box needs 4 bounds");
                PlaceBox b;
                for (int t = 0; t < 4; ++t) b[t] = parse_rational(pb[t].get<std::string>());
                st.box.push_back(b);
            }
            st.phi = Real(member(s, "phi").get<std::string>());
            st.zeta_phi = Real(member(s, "zeta_phi").get<std::string>());
            st.e_bound = Real(member(s, "e_bound").get<std::string>());
            st.e_margin = Real(member(s, "margin").get<std::string>());
            c.stages.push_back(std::move(st));
        }
        for (const auto& u : member(j, "base")) {
            if (u.size() != 2) throw Error(ErrorKind::InvalidInput, "base point needs (u1, u2) per place");
            c.base.push_back({parse_rational(u[0].get<std::string>()), parse_rational(u[1].get<std::string>())});
        }
        for (const auto& r : member(j, "point")) {
            std::vector<FieldElement> row;
            for (const auto& e : r) row.push_back(detail::element_from_json(K, e));
            c.point.rows.push_back(std::move(row));
        }
        if (j.contains("warnings")) c.warnings = j.at("warnings").get<std::vector<std::string>>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("malformed certificate: ") + e.what());
    }
}

inline void write_certificate(const ConstructionOutput& c, std::ostream& out) { out << certificate_to_json(c).dump(2) << "\n"; }

inline ConstructionOutput read_certificate(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("certificate is not JSON: ") + e.what());
    }
    return certificate_from_json(j);
}

inline ConstructionOutput load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open certificate " + path);
    return read_certificate(in);
}

}  // namespace dioph
