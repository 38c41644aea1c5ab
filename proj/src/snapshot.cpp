#include "tricrystal/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

namespace tricrystal {

namespace {

std::string expect_token(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) {
        throw SnapshotError(std::string("snapshot: unexpected end of input, expected ") + what);
    }
    return tok;
}

void expect_keyword(std::istream& is, const std::string& keyword) {
    const std::string tok = expect_token(is, keyword.c_str());
    if (tok != keyword) {
        throw SnapshotError("snapshot: expected '" + keyword + "', found '" + tok + "'");
    }
}

double read_double(std::istream& is, const char* what) { return parse_hex_double(expect_token(is, what)); }

long read_integer(std::istream& is, const char* what) {
    const std::string tok = expect_token(is, what);
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
        throw SnapshotError(std::string("snapshot: malformed integer for ") + what + ": '" + tok + "'");
    }
    return v;
}

}  // namespace

std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw SnapshotError("snapshot: malformed number '" + token + "'");
    }
    return v;
}

void write_spec(std::ostream& os, const PotentialSpec& spec) {
    os << "alpha " << hex_double(spec.alpha) << '\n'
       << "l " << hex_double(spec.l) << '\n'
       << "m " << hex_double(spec.m) << '\n'
       << "beta " << hex_double(spec.beta) << '\n';
    if (spec.potential.kind() == PotentialKind::quadratic) {
        os << "potential quadratic " << hex_double(spec.potential.kappa()) << '\n';
    } else {
        const auto& knots = spec.potential.knots();
        os << "potential tabulated " << knots.size() << '\n';
        for (const auto& [r, v] : knots) {
            os << hex_double(r) << ' ' << hex_double(v) << '\n';
        }
    }
}

PotentialSpec read_spec(std::istream& is) {
    PotentialSpec spec;
    expect_keyword(is, "alpha");
    spec.alpha = read_double(is, "alpha");
    expect_keyword(is, "l");
    spec.l = read_double(is, "l");
    expect_keyword(is, "m");
    spec.m = read_double(is, "m");
    expect_keyword(is, "beta");
    spec.beta = read_double(is, "beta");
    expect_keyword(is, "potential");
    const std::string kind = expect_token(is, "potential kind");
    if (kind == "quadratic") {
        spec.potential = PairPotential::quadratic(read_double(is, "kappa"));
    } else if (kind == "tabulated") {
        const long count = read_integer(is, "knot count");
        if (count < 0) {
            throw SnapshotError("snapshot: negative knot count");
        }
        std::vector<std::pair<double, double>> knots;
        for (long i = 0; i < count; ++i) {
            const double r = read_double(is, "knot r");
            const double v = read_double(is, "knot V");
            knots.emplace_back(r, v);
        }
        spec.potential = PairPotential::tabulated(std::move(knots));
    } else {
        throw SnapshotError("snapshot: unknown potential kind '" + kind + "'");
    }
    return spec;
}

void write_snapshot(std::ostream& os, const Configuration& c) {
    os << "tricrystal-snapshot " << kSnapshotVersion << '\n';
    os << "N " << c.lattice().size() << '\n';
    write_spec(os, c.spec());
    os << "sites " << c.site_count() << '\n';
    for (int i = 0; i < c.site_count(); ++i) {
        const Vec2 u = c.displacement(i);
        os << (c.is_hole(i) ? 0 : 1) << ' ' << hex_double(u.x) << ' ' << hex_double(u.y) << '\n';
    }
    os << "end-snapshot\n";
}

Configuration read_snapshot(std::istream& is) {
    expect_keyword(is, "tricrystal-snapshot");
    const long version = read_integer(is, "version");
    if (version != kSnapshotVersion) {
        throw SnapshotError("snapshot: unsupported version " + std::to_string(version));
    }
    expect_keyword(is, "N");
    const long n = read_integer(is, "N");
    auto lattice = std::make_shared<const Lattice>(static_cast<int>(n));
    auto spec = std::make_shared<const PotentialSpec>(read_spec(is));
    expect_keyword(is, "sites");
    const long sites = read_integer(is, "site count");
    if (sites != lattice->site_count()) {
        throw SnapshotError("snapshot: site count does not match N");
    }
    std::vector<std::uint8_t> present(sites);
    std::vector<Vec2> disp(sites);
    for (long i = 0; i < sites; ++i) {
        const long flag = read_integer(is, "present flag");
        if (flag != 0 && flag != 1) {
            throw SnapshotError("snapshot: present flag must be 0 or 1");
        }
        present[i] = static_cast<std::uint8_t>(flag);
        disp[i].x = read_double(is, "u_x");
        disp[i].y = read_double(is, "u_y");
    }
    expect_keyword(is, "end-snapshot");
    return Configuration::from_state(lattice, spec, present, disp);
}

}  // namespace tricrystal
