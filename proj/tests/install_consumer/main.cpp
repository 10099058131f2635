#include <cstdio>

#include "mctcp/channel/physics.hpp"
#include "mctcp/engine.hpp"

int main() {
  mctcp::engine::SimConfig c;
  c.record_events = false;
  const auto r = mctcp::engine::run(c);
  std::printf("p_assim %.5f status %s\n",
              mctcp::channel::p_assim(10000, 26.5e-6, c.tx_geometry, c.fit),
              std::string(mctcp::engine::to_string(r.summary.status)).c_str());
  return r.summary.completed() ? 0 : 1;
}
