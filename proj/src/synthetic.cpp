#include "rankstab/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "rankstab/ranking.hpp"
#include "rankstab/rng.hpp"

namespace rankstab {

void SyntheticParams::validate() const {
  if (n_tuples < 1) fail(errc::config, "synthetic: n_tuples must be positive");
  if (dims < 1) fail(errc::config, "synthetic: dims must be positive");
  if (!(margin > 0.0) || !std::isfinite(margin)) {
    fail(errc::config, "synthetic: margin must be positive and finite");
  }
  if (region_min < 1 || region_max < region_min) {
    fail(errc::config, "synthetic: need 1 <= region_min <= region_max");
  }
  if (sigma() < 0.0 || !std::isfinite(sigma())) {
    fail(errc::config, "synthetic: noise_sigma must be non-negative");
  }
}

SyntheticResult generate_dense_dataset(const SyntheticParams& params) {
  params.validate();
  auto rng = substream(params.seed, streams::synth);
  gaussian_source gauss(rng);

  // region sizes first, truncating the last one to land on n_tuples exactly
  std::vector<int> sizes;
  int assigned = 0;
  while (assigned < params.n_tuples) {
    int span = params.region_max - params.region_min + 1;
    int size = params.region_min + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span)));
    size = std::min(size, params.n_tuples - assigned);
    sizes.push_back(size);
    assigned += size;
  }

  int digits = 1;
  for (int v = params.n_tuples; v >= 10; v /= 10) ++digits;

  AttributeSchema schema;
  for (int a = 0; a < params.dims; ++a) schema.names.push_back("x" + std::to_string(a + 1));

  std::vector<DataTuple> tuples;
  tuples.reserve(static_cast<std::size_t>(params.n_tuples));
  std::vector<int> region_of;
  region_of.reserve(static_cast<std::size_t>(params.n_tuples));

  int n_regions = static_cast<int>(sizes.size());
  double sigma = params.sigma();
  int counter = 0;
  for (int r = 0; r < n_regions; ++r) {
    // scores descend by one margin per region and stay positive
    double score = params.margin * static_cast<double>(n_regions - r);
    double mean = score / params.dims;
    for (int m = 0; m < sizes[static_cast<std::size_t>(r)]; ++m) {
      ++counter;
      std::string id = "t" + std::to_string(counter);
      id.insert(1, static_cast<std::size_t>(digits) - (id.size() - 1), '0');
      DataTuple t;
      t.id = std::move(id);
      t.values = Vector(params.dims);
      for (int a = 0; a < params.dims; ++a) t.values[a] = mean + sigma * gauss();
      tuples.push_back(std::move(t));
      region_of.push_back(r);
    }
  }

  SyntheticResult out{Dataset(schema, std::move(tuples)), {},
                      ReasonableChanges(Vector::Constant(params.dims, params.margin / params.dims))};

  // ground truth: rank offsets within each region decide how far a tuple can
  // move among its peers: max(offset from region top, offset from bottom)
  for (int r = 0, row = 0; r < n_regions; ++r) {
    int size = sizes[static_cast<std::size_t>(r)];
    std::vector<std::pair<double, const std::string*>> keys;
    for (int m = 0; m < size; ++m) {
      const DataTuple& t = out.data.at(row + m);
      keys.emplace_back(t.values.sum(), &t.id);
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      return rank_key_before(a.first, *a.second, b.first, *b.second);
    });
    for (int m = 0; m < size; ++m) {
      out.truth[*keys[static_cast<std::size_t>(m)].second] =
          TupleTruth{r, std::max(m, size - 1 - m)};
    }
    row += size;
  }
  return out;
}

}  // namespace rankstab
