#include "forge/synth.hpp"

#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/random.hpp"

namespace forge {

InteractionLog synth_markov(const SynthConfig& config, std::string dataset_name) {
  if (config.items < 4 || config.users == 0 || config.min_length == 0 ||
      config.max_length < config.min_length)
    throw Error(ErrorKind::InvalidConfig, "synth", "need >= 4 items, >= 1 user, 1 <= min <= max length");
  Rng rng(config.seed);
  std::vector<std::size_t> ring(config.items);
  std::iota(ring.begin(), ring.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(ring));
  std::vector<std::size_t> position(config.items);
  for (std::size_t p = 0; p < ring.size(); ++p) position[ring[p]] = p;

  auto item_name = [](std::size_t i) { return "item" + std::to_string(i); };
  InteractionLog log;
  log.dataset_name = std::move(dataset_name);
  for (std::size_t u = 0; u < config.users; ++u) {
    UserRecord rec;
    rec.raw_user_id = "user" + std::to_string(u);
    const std::size_t len =
        config.min_length + rng.below(config.max_length - config.min_length + 1);
    std::size_t cur = rng.below(config.items);
    rec.history.push_back(item_name(cur));
    while (rec.history.size() < len) {
      if (rng.unit() < config.follow) {
        const double r = rng.unit();
        const std::size_t step = r < 0.6 ? 1 : (r < 0.85 ? 2 : 3);
        cur = ring[(position[cur] + step) % config.items];
      } else {
        cur = rng.below(config.items);
      }
      rec.history.push_back(item_name(cur));
    }
    log.users.push_back(std::move(rec));
  }
  return log;
}

}  // namespace forge
