#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "substoch/identities.hpp"
#include "substoch/random.hpp"
#include "substoch/substochastic.hpp"

namespace substoch {

/// Parameters of a random instance. All randomness comes from SplitMix64
/// streams derived from `seed`; no floating point is involved, so the output
/// is identical on every platform.
struct GenSpec {
    Index n = 3;
    std::uint64_t seed = 0;
    /// Probability that an entry is drawn nonzero.
    Rational density{1};
    /// Row sums are drawn uniformly from the grid {0, 1/D, ..., max_row_sum}.
    Rational max_row_sum{1};
    /// D: every generated entry is k / D for an integer k.
    std::uint64_t denominator_bound = 12;
};

/// Rejection loops give up after this many attempts.
inline constexpr int kMaxGenerationAttempts = 100;

namespace detail {

inline std::uint64_t fits_u64(const mpz_class& z, const char* what)
{
    if (!z.fits_ulong_p()) {
        throw Error(Errc::PreconditionViolated, std::string(what) + " does not fit in 64 bits");
    }
    return z.get_ui();
}

inline void validate_spec(const GenSpec& spec)
{
    if (spec.n < 1) {
        throw Error(Errc::PreconditionViolated, "n must be >= 1");
    }
    if (sgn(spec.density) < 0 || spec.density > 1) {
        throw Error(Errc::PreconditionViolated, "density must lie in [0, 1]");
    }
    if (sgn(spec.max_row_sum) <= 0 || spec.max_row_sum > 1) {
        throw Error(Errc::PreconditionViolated, "max_row_sum must lie in (0, 1]");
    }
    if (spec.denominator_bound < 1 || spec.denominator_bound > (std::uint64_t{1} << 62)) {
        throw Error(Errc::PreconditionViolated, "denominator_bound must lie in [1, 2^62]");
    }
    fits_u64(spec.density.get_den(), "density denominator");
}

inline bool draw_included(SplitMix64& rng, const Rational& density)
{
    const std::uint64_t num = density.get_num().get_ui();
    const std::uint64_t den = density.get_den().get_ui();
    return rng.below(den) < num;
}

} // namespace detail

/// One row substochastic draw without spectral certification. Row i gets a
/// target of t_i ~ U{0..floor(max_row_sum * D)} units, split over its included
/// entries by a uniform composition, so entries are k / D and rows sum to
/// t_i / D exactly.
inline Matrix<Rational> gen_raw_substochastic(const GenSpec& spec, std::uint64_t attempt = 0)
{
    detail::validate_spec(spec);
    SplitMix64 rng(SplitMix64::derive(spec.seed, attempt));
    const std::uint64_t d = spec.denominator_bound;
    const mpz_class cap_z = mpz_class(spec.max_row_sum.get_num() * d) / spec.max_row_sum.get_den();
    const std::uint64_t cap = cap_z.get_ui();

    Matrix<Rational> p(spec.n, spec.n);
    std::vector<Index> cols;
    std::vector<std::uint64_t> cuts;
    for (Index i = 0; i < spec.n; ++i) {
        cols.clear();
        for (Index j = 0; j < spec.n; ++j) {
            if (detail::draw_included(rng, spec.density)) {
                cols.push_back(j);
            }
        }
        const std::uint64_t units = rng.below(cap + 1);
        if (cols.empty()) {
            continue;
        }
        cuts.assign(1, 0);
        for (std::size_t c = 1; c < cols.size(); ++c) {
            cuts.push_back(rng.below(units + 1));
        }
        cuts.push_back(units);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            Rational v(mpz_class(cuts[c + 1] - cuts[c]), mpz_class(d));
            v.canonicalize();
            p.raw(i, cols[c]) = v;
        }
    }
    return p;
}

/// Certified random substochastic matrix; redraws (bounded) when a row sum
/// of one leaves the spectral radius at one.
inline SubstochasticMatrix<Rational> gen_substochastic(const GenSpec& spec)
{
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        try {
            return validate_substochastic(gen_raw_substochastic(spec, static_cast<std::uint64_t>(attempt)));
        } catch (const Error& e) {
            if (e.code() != Errc::SpectralRadiusNotLessThanOne) {
                throw;
            }
        }
    }
    throw Error(Errc::GenerationExhausted, "no certified substochastic matrix within "
                                               + std::to_string(kMaxGenerationAttempts) + " attempts");
}

/// Column substochastic draw (the transpose of a raw row draw); not
/// spectrally certified.
inline Matrix<Rational> gen_column_substochastic(const GenSpec& spec)
{
    return transpose(gen_raw_substochastic(spec, 0));
}

/// Random matrix with entries k / D, k ~ U{-D..D} (zero outside density),
/// redrawn until det(B) and every det(B(l|l)) are nonzero.
inline GeneralMatrix<Rational> gen_general(const GenSpec& spec, bool all_principal_minors = false)
{
    detail::validate_spec(spec);
    const std::uint64_t d = spec.denominator_bound;
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        SplitMix64 rng(SplitMix64::derive(spec.seed, static_cast<std::uint64_t>(attempt)));
        Matrix<Rational> b(spec.n, spec.n);
        for (Index i = 0; i < spec.n; ++i) {
            for (Index j = 0; j < spec.n; ++j) {
                const bool included = detail::draw_included(rng, spec.density);
                const std::uint64_t k = rng.below(2 * d + 1);
                if (included) {
                    Rational v(mpz_class(k) - mpz_class(d), mpz_class(d));
                    v.canonicalize();
                    b.raw(i, j) = v;
                }
            }
        }
        try {
            return certify_general(b, all_principal_minors);
        } catch (const Error& e) {
            if (e.code() != Errc::CertificationError) {
                throw;
            }
        }
    }
    throw Error(Errc::GenerationExhausted, "no certified general matrix within "
                                               + std::to_string(kMaxGenerationAttempts) + " attempts");
}

} // namespace substoch
