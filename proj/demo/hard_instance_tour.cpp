// Samples one function from each distribution and prints its distances.

#include "junta/boolfn.hpp"
#include "junta/constructions.hpp"
#include "junta/delta.hpp"

#include <iostream>

int main() {
  using namespace junta;

  HardInstanceParams hp;
  hp.k = 8;
  hp.ell = 2;
  hp.r = 1;
  hp.p = Rational(3, 16);

  std::cout << "Delta_4 = " << to_string(delta(4)) << "\n";

  const TruthTable no = sample_no(hp, Seed{42});
  const YesSample yes = sample_yes_parity(hp, Seed{42});

  const auto d_no = dist_to_k_juntas(no, hp.k);
  const auto d_yes = dist_to_k_juntas(yes.f, hp.k);
  std::cout << "dist(f_NO, J_8)  = " << to_string(d_no.distance) << " (" << to_double(d_no.distance) << ")\n";
  std::cout << "dist(f_YES, J_8) = " << to_string(d_yes.distance) << " (" << to_double(d_yes.distance) << ")\n";
  std::cout << "hidden J = " << to_string(yes.J) << "\n";

  const VarSet rest = VarSet::from_mask(low_mask(hp.n()) & ~yes.J.mask());
  std::cout << "dist(f_YES, J_[n]\\J) = " << to_string(dist_to_junta_on(yes.f, rest)) << "\n";
}
