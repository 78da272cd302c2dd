#include "pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aimdmft {

namespace {

void check_same_n(const PauliTerm& a, const PauliTerm& b) {
    if (a.n != b.n) {
        throw PauliError("qubit-count mismatch: " + std::to_string(a.n) +
                         " vs " + std::to_string(b.n));
    }
}

int parity(std::uint64_t bits) { return std::popcount(bits) & 1; }

// Phase exponent e such that P(a) * P(b) = i^e P(a^b) on one qubit,
// with codes 0=I, 1=X, 2=Z, 3=Y (code = x + 2z).
constexpr std::uint8_t kQubitPhase[4][4] = {
    {0, 0, 0, 0},
    {0, 0, 3, 1},
    {0, 1, 0, 3},
    {0, 3, 1, 0},
};

char letter_of(int code) {
    static const char letters[4] = {'I', 'X', 'Z', 'Y'};
    return letters[code];
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PauliTerm PauliTerm::identity(int n) {
    PauliTerm t;
    t.n = n;
    return t;
}

PauliTerm PauliTerm::single(int n, int q, char letter) {
    if (q < 0 || q >= n) throw PauliError("qubit index out of range");
    PauliTerm t;
    t.n = n;
    switch (letter) {
        case 'I': break;
        case 'X': t.x_bits = 1ULL << q; break;
        case 'Z': t.z_bits = 1ULL << q; break;
        case 'Y': t.x_bits = 1ULL << q; t.z_bits = 1ULL << q; break;
        default: throw PauliError(std::string("bad Pauli letter: ") + letter);
    }
    return t;
}

PauliTerm PauliTerm::from_string(const std::string& letters) {
    PauliTerm t;
    t.n = static_cast<int>(letters.size());
    if (t.n == 0 || t.n > 64) throw PauliError("bad Pauli string length");
    for (int q = 0; q < t.n; ++q) {
        switch (letters[q]) {
            case 'I': break;
            case 'X': t.x_bits |= 1ULL << q; break;
            case 'Z': t.z_bits |= 1ULL << q; break;
            case 'Y': t.x_bits |= 1ULL << q; t.z_bits |= 1ULL << q; break;
            default:
                throw PauliError(std::string("bad Pauli letter: ") + letters[q]);
        }
    }
    return t;
}

int PauliTerm::weight() const { return std::popcount(x_bits | z_bits); }

int PauliTerm::y_count() const { return std::popcount(x_bits & z_bits); }

std::string PauliTerm::string_repr() const {
    std::string out(static_cast<std::size_t>(n), 'I');
    for (int q = 0; q < n; ++q) {
        int code = static_cast<int>((x_bits >> q) & 1) +
                   2 * static_cast<int>((z_bits >> q) & 1);
        out[q] = letter_of(code);
    }
    return out;
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
    check_same_n(a, b);
    PauliTerm out;
    out.n = a.n;
    out.x_bits = a.x_bits ^ b.x_bits;
    out.z_bits = a.z_bits ^ b.z_bits;
    unsigned phase = a.phase_pow + b.phase_pow;
    std::uint64_t support = a.x_bits | a.z_bits | b.x_bits | b.z_bits;
    while (support) {
        int q = std::countr_zero(support);
        support &= support - 1;
        int ca = static_cast<int>((a.x_bits >> q) & 1) +
                 2 * static_cast<int>((a.z_bits >> q) & 1);
        int cb = static_cast<int>((b.x_bits >> q) & 1) +
                 2 * static_cast<int>((b.z_bits >> q) & 1);
        phase += kQubitPhase[ca][cb];
    }
    out.phase_pow = static_cast<std::uint8_t>(phase & 3);
    out.coeff = a.coeff * b.coeff;
    return out;
}

bool strings_commute(const PauliTerm& a, const PauliTerm& b) {
    check_same_n(a, b);
    return parity(a.x_bits & b.z_bits) == parity(a.z_bits & b.x_bits);
}

std::optional<PauliTerm> commutator(const PauliTerm& a, const PauliTerm& b) {
    if (strings_commute(a, b)) return std::nullopt;
    PauliTerm t = multiply(a, b);  // ab - ba = 2ab for anticommuting strings
    t.coeff *= 2.0;
    return t;
}

void PauliSum::add(const PauliTerm& t) {
    if (n_ == 0) n_ = t.n;
    if (t.n != n_) throw PauliError("qubit-count mismatch in PauliSum::add");
    if (!t.is_hermitian()) {
        throw PauliError("non-Hermitian phase in PauliSum term");
    }
    terms_.push_back({t.x_bits, t.z_bits, t.coeff * t.sign()});
    canonicalize();
}

void PauliSum::add(std::uint64_t x, std::uint64_t z, double c) {
    terms_.push_back({x, z, c});
    canonicalize();
}

PauliSum PauliSum::from_entries(int n, std::vector<Entry> entries) {
    PauliSum s(n);
    s.terms_ = std::move(entries);
    s.canonicalize();
    return s;
}

void PauliSum::canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.x_bits, a.z_bits) < std::tie(b.x_bits, b.z_bits);
    });
    std::vector<Entry> merged;
    merged.reserve(terms_.size());
    for (const Entry& e : terms_) {
        if (!merged.empty() && merged.back().x_bits == e.x_bits &&
            merged.back().z_bits == e.z_bits) {
            merged.back().coeff += e.coeff;
        } else {
            merged.push_back(e);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Entry& e) { return e.coeff == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

double PauliSum::coefficient(std::uint64_t x, std::uint64_t z) const {
    for (const Entry& e : terms_) {
        if (e.x_bits == x && e.z_bits == z) return e.coeff;
    }
    return 0.0;
}

PauliTerm PauliSum::term_at(std::size_t idx) const {
    const Entry& e = terms_.at(idx);
    PauliTerm t;
    t.n = n_;
    t.x_bits = e.x_bits;
    t.z_bits = e.z_bits;
    t.coeff = e.coeff;
    return t;
}

double PauliSum::norm() const { return std::sqrt(trace_inner(*this, *this)); }

std::string PauliSum::to_string() const {
    if (terms_.empty()) return "0*" + std::string(static_cast<std::size_t>(n_ > 0 ? n_ : 1), 'I');
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) out += " + ";
        PauliTerm t = term_at(i);
        out += format_double(terms_[i].coeff) + "*" + t.string_repr();
    }
    return out;
}

PauliSum PauliSum::parse(const std::string& text) {
    PauliSum out;
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) cleaned += c;
    }
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
        std::size_t next = cleaned.find('+', pos);
        // a '+' directly followed by a sign or digit after '*IXYZ' split: the
        // separator in our format is always "+", coefficients carry their own
        // leading '-'.
        std::string piece = cleaned.substr(pos, next == std::string::npos
                                                     ? std::string::npos
                                                     : next - pos);
        pos = next == std::string::npos ? cleaned.size() : next + 1;
        if (piece.empty()) continue;
        std::size_t star = piece.find('*');
        if (star == std::string::npos) throw PauliError("missing '*' in term: " + piece);
        std::size_t consumed = 0;
        double coeff = std::stod(piece.substr(0, star), &consumed);
        if (consumed != star) throw PauliError("bad coefficient in term: " + piece);
        PauliTerm t = PauliTerm::from_string(piece.substr(star + 1));
        t.coeff = coeff;
        if (out.n_ == 0) out.n_ = t.n;
        if (coeff != 0.0) out.add(t);
        else if (t.n != out.n_) throw PauliError("qubit-count mismatch in parse");
    }
    return out;
}

double trace_inner(const PauliSum& a, const PauliSum& b) {
    if (a.n() != b.n()) throw PauliError("qubit-count mismatch in trace_inner");
    // Both sums are canonically sorted; merge-walk the shared strings.
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0, j = 0;
    double acc = 0.0;
    while (i < ta.size() && j < tb.size()) {
        auto ka = std::tie(ta[i].x_bits, ta[i].z_bits);
        auto kb = std::tie(tb[j].x_bits, tb[j].z_bits);
        if (ka < kb) {
            ++i;
        } else if (kb < ka) {
            ++j;
        } else {
            acc += ta[i].coeff * tb[j].coeff;
            ++i;
            ++j;
        }
    }
    return acc;
}

PauliSum adjoint_rotate(double theta, const PauliTerm& p, const PauliSum& s) {
    if (p.n != s.n()) throw PauliError("qubit-count mismatch in adjoint_rotate");
    const double c = std::cos(2.0 * theta);
    const double d = std::sin(2.0 * theta);
    std::vector<PauliSum::Entry> entries;
    entries.reserve(2 * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        PauliTerm q = s.term_at(i);
        if (strings_commute(p, q)) {
            entries.push_back({q.x_bits, q.z_bits, q.coeff});
            continue;
        }
        entries.push_back({q.x_bits, q.z_bits, q.coeff * c});
        PauliTerm pq = multiply(p, q);
        // p anticommutes with q, so pq is anti-Hermitian: phase is +/- i and
        // i * (+/- i) folds to a real sign.
        double sign = pq.phase_pow == 1 ? -1.0 : 1.0;
        entries.push_back({pq.x_bits, pq.z_bits, sign * d * pq.coeff});
    }
    return PauliSum::from_entries(s.n(), std::move(entries));
}

AimParameters AimParameters::half_filled_two_site(double u, double v) {
    AimParameters p;
    p.n_bath = 1;
    p.v = {v};
    p.eps = {0.0, u / 2.0};
    p.u = u;
    p.mu = u / 2.0;
    return p;
}

PauliSum jw_aim_hamiltonian(const AimParameters& p) {
    if (p.n_bath < 1) throw PauliError("need at least one bath site");
    if (p.u < 0.0) throw PauliError("negative U");
    if (static_cast<int>(p.v.size()) != p.n_bath ||
        static_cast<int>(p.eps.size()) != p.n_bath + 1) {
        throw PauliError("parameter vector size mismatch");
    }
    const int n = p.qubits();
    const int down0 = p.n_bath + 1;  // first spin-down qubit
    PauliSum h(n);

    auto hopping = [&](int a, int b, double coeff) {
        // (coeff) * (Xa Z... Xb + Ya Z... Yb) with a Z chain strictly between.
        std::uint64_t chain = 0;
        for (int q = a + 1; q < b; ++q) chain |= 1ULL << q;
        std::uint64_t ends = (1ULL << a) | (1ULL << b);
        h.add(ends, chain, coeff);          // X..X
        h.add(ends, chain | ends, coeff);   // Y..Y
    };

    for (int i = 1; i <= p.n_bath; ++i) {
        hopping(0, i, p.v[i - 1] / 2.0);
        hopping(down0, down0 + i, p.v[i - 1] / 2.0);
    }

    // U/4 (Z0 Z_{down0} - Z0 - Z_{down0}), constant shift dropped.
    h.add(0, (1ULL << 0) | (1ULL << down0), p.u / 4.0);
    h.add(0, 1ULL << 0, -p.u / 4.0);
    h.add(0, 1ULL << down0, -p.u / 4.0);

    for (int i = 0; i <= p.n_bath; ++i) {
        double c = -(p.eps[i] - p.mu) / 2.0;
        if (c != 0.0) {
            h.add(0, 1ULL << i, c);
            h.add(0, 1ULL << (down0 + i), c);
        }
    }
    return h;
}

}  // namespace aimdmft
