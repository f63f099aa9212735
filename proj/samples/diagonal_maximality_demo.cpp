// Prints (I - P^T)^{-1} for a small chain and checks that each diagonal entry
// dominates its row, then compares (I - P)^{-1} with simulated visit counts.

#include <iostream>

#include "substoch/montecarlo.hpp"
#include "substoch/substochastic.hpp"

int main()
{
    using substoch::Rational;
    using Traits = substoch::ScalarTraits<Rational>;

    const substoch::Matrix<Rational> p{
        {Rational(1, 2), Rational(1, 4)},
        {Rational(1, 3), Rational(1, 3)},
    };
    const auto sp = substoch::validate_substochastic(p);
    const auto report = substoch::check_diagonal_maximality(sp);

    std::cout << "(I - P^T)^-1 =\n";
    for (substoch::Index i = 1; i <= report.c.rows(); ++i) {
        for (substoch::Index j = 1; j <= report.c.cols(); ++j) {
            std::cout << "  " << Traits::to_string(report.c(i, j));
        }
        std::cout << "\n";
    }
    std::cout << "diagonal maximal in every row: " << (report.holds ? "yes" : "no") << "\n";

    const auto cc = substoch::crosscheck_fundamental(sp, 100000, 7);
    for (const auto& w : cc.rows) {
        std::cout << "start " << w.start_state << ": visits";
        for (std::size_t j = 0; j < w.mean_visits.size(); ++j) {
            std::cout << "  " << w.mean_visits[j] << " +- " << w.ci_halfwidth[j];
        }
        std::cout << "\n";
    }
    std::cout << "flags: " << cc.flags.size() << "\n";
    return report.holds && cc.passed() ? 0 : 1;
}
