// Evaluates every identity on the tridiagonal matrix [[2,1,0],[1,2,1],[0,1,2]].

#include <iostream>

#include "substoch/identities.hpp"

int main()
{
    using substoch::Rational;
    using Traits = substoch::ScalarTraits<Rational>;

    const auto g = substoch::certify_general(substoch::Matrix<Rational>{
        {Rational(2), Rational(1), Rational(0)},
        {Rational(1), Rational(2), Rational(1)},
        {Rational(0), Rational(1), Rational(2)},
    });

    bool all = true;
    for (const auto& r : substoch::verify_all(g)) {
        std::cout << substoch::identity_name(r.id) << " m=" << (r.m ? std::to_string(*r.m) : "-")
                  << " l=" << (r.l ? std::to_string(*r.l) : "-") << "  " << Traits::to_string(r.lhs) << " = "
                  << Traits::to_string(r.rhs) << (r.passed ? "" : "  FAILED") << "\n";
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
