#include "nestlie/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nestlie {

InstanceSpec paper_example() {
  const int n = 5;
  Nest nest(n, {0, 1, 2, 3, 4, 5});
  std::vector<Matrix> seeds;
  seeds.push_back(Matrix::Identity(n, n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (j >= 2 || (j == 1 && i <= 1)) seeds.push_back(matrix_unit(n, i, j));
  return {std::move(nest), std::move(seeds), "paper_example", std::nullopt};
}

InstanceSpec random_instance(int n, int m, int g, std::uint64_t rng_seed) {
  if (n < 1 || n > 16) throw std::out_of_range("random_instance: need 1 <= n <= 16");
  if (m < 1 || m > n) throw std::out_of_range("random_instance: need 1 <= m <= n");
  if (g < 1 || g > 6) throw std::out_of_range("random_instance: need 1 <= g <= 6");
  SplitMix64 rng(rng_seed);

  std::vector<int> interior(std::size_t(n > 0 ? n - 1 : 0));
  std::iota(interior.begin(), interior.end(), 1);
  for (int i = 0; i < m - 1; ++i) {
    const auto pick = i + int(rng.below(std::uint64_t(interior.size() - std::size_t(i))));
    std::swap(interior[std::size_t(i)], interior[std::size_t(pick)]);
  }
  std::vector<int> boundaries(interior.begin(), interior.begin() + (m - 1));
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.insert(boundaries.begin(), 0);
  boundaries.push_back(n);

  std::vector<Matrix> seeds;
  for (int s = 0; s < g; ++s) {
    Matrix t(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        t(i, j) = Complex(re, im);
      }
    seeds.push_back(std::move(t));
  }
  return {Nest(n, std::move(boundaries)), std::move(seeds),
          "random_n" + std::to_string(n) + "_m" + std::to_string(m) + "_g" +
              std::to_string(g) + "_s" + std::to_string(rng_seed),
          rng_seed};
}

std::vector<NestMap> monotone_map_enumerator(const Nest& nest) {
  const int m = nest.length();
  if (m > 6)
    throw std::out_of_range("monotone_map_enumerator: chain length must be <= 6");
  std::vector<NestMap> maps;
  std::vector<int> table(std::size_t(m) + 1, 0);
  // Depth-first over nondecreasing tables, emitting in lexicographic order.
  auto recurse = [&](auto&& self, int k) -> void {
    if (k > m) {
      maps.emplace_back(nest, table);
      return;
    }
    for (int v = table[std::size_t(k - 1)]; v <= m; ++v) {
      table[std::size_t(k)] = v;
      self(self, k + 1);
    }
  };
  recurse(recurse, 1);
  return maps;
}

}  // namespace nestlie
