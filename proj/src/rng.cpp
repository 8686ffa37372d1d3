#include "driver_warning/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace driver_warning
{

std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
: seed_(seed), stream_id_(stream_id), engine_(mix_seed(seed ^ mix_seed(stream_id + 1)))
{
}

double RngStream::uniform()
{
  boost::random::uniform_01<double> dist;
  return dist(engine_);
}

double RngStream::normal()
{
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

}  // namespace driver_warning
