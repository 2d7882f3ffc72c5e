// Tracks a slow chirp with the synchrosqueezed transform and prints the
// ridge next to the true instantaneous frequency.
#include <cstdio>

#include "sstedr/sstedr.hpp"

int main() {
  using namespace sstedr;

  const auto spec = RespirationSpec::chirp(0.2, 0.1 / 1024.0, 1024.0, 0.25);
  const auto rec = gen_respiration(spec, 1);
  const auto sst = synchrosqueeze(to_dyadic(rec.signal), SstParams{});
  const auto ridge = extract_ridge(sst, 5.0);

  std::printf("%10s %12s %12s\n", "t [s]", "ridge [Hz]", "true [Hz]");
  for (std::size_t m = 0; m < ridge.freqs.size(); m += 256) {
    std::printf("%10.2f %12.5f %12.5f\n", sst.time(static_cast<Eigen::Index>(m)), ridge.freqs[m], rec.true_iif[m]);
  }
  return 0;
}
