#include <gtest/gtest.h>

#include "arcane/config/config.hpp"

using namespace arcane;
using namespace arcane::config;

namespace {
ExperimentConfig from(const std::string& yaml, const std::vector<std::string>& overrides = {}) {
    YAML::Node root = YAML::Load(yaml);
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& o : overrides) apply_override(root, o);
    return parse(root, "configs");
}
}  // namespace

TEST(Config, DefaultsFromEmptyDocument) {
    const auto c = from("");
    EXPECT_EQ(c.sim.topology.nodes, 16u);
    EXPECT_EQ(c.sim.lb.kind, lb::Kind::arcane);
    EXPECT_EQ(c.sim.lb.arcane.freezing_timeout, 1'000'000);
    EXPECT_EQ(c.ballsbins.recycle_every, 1u);
    EXPECT_TRUE(c.seeds.empty());
}

TEST(Config, ParsesSections) {
    const auto c = from(R"(
topology: {nodes: 32, hosts_per_t0: 8, uplinks_per_t0: 8, link_gbps: 10, link_latency_ns: 4000}
workload: {kind: tornado, message_bytes: 1024}
transport: {rto_us: 150, ack_coalesce: 4}
lb: ops
arcane: {buffer_size: 4, freezing_timeout_us: 300}
failures:
  - {link: t0_0-t1_0, start_us: 100, end_us: 200}
output: {dir: /tmp/x, run_name: demo, bucket_us: 10}
seeds: [4, 5]
)");
    EXPECT_EQ(c.sim.topology.nodes, 32u);
    EXPECT_EQ(c.sim.topology.link_bps, 10e9);
    EXPECT_EQ(c.sim.workload.kind, workload::Kind::tornado);
    EXPECT_EQ(c.sim.transport.rto_ns, 150'000);
    EXPECT_EQ(c.sim.transport.ack_coalesce, 4u);
    EXPECT_EQ(c.sim.lb.kind, lb::Kind::ops);
    EXPECT_EQ(c.sim.lb.arcane.buffer_size, 4u);
    EXPECT_EQ(c.sim.lb.arcane.freezing_timeout, 300'000);
    ASSERT_EQ(c.sim.failures.size(), 1u);
    EXPECT_EQ(c.sim.failures[0].start, 100'000);
    EXPECT_EQ(c.sim.failures[0].end, 200'000);
    EXPECT_EQ(c.sim.bucket_ns, 10'000);
    EXPECT_EQ(c.run_name, "demo");
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(from("topology: {nodez: 4}"), ConfigError);
    EXPECT_THROW(from("bogus: 1"), ConfigError);
    EXPECT_THROW(from("failures: [{link: t0_0-t1_0, start_us: 1, end_us: 2, why: x}]"), ConfigError);
    try {
        from("transport: {rto: 5}");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("transport.rto"), std::string::npos);
    }
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(from("lb: spray"), ConfigError);
    EXPECT_THROW(from("workload: {kind: alltoall}"), ConfigError);
    EXPECT_THROW(from("topology: {link_gbps: 0}"), ConfigError);
    EXPECT_THROW(from("topology: {nodes: many}"), ConfigError);
    EXPECT_THROW(from("queue: {kmin_fraction: 0.9, kmax_fraction: 0.5}"), ConfigError);
    EXPECT_THROW(from("workload: {kind: trace}"), ConfigError);
    EXPECT_THROW(from("failures: [{link: t0_0-t1_0, start_us: 5, end_us: 2}]"), ConfigError);
    EXPECT_THROW(from("ballsbins: {measure: during}"), ConfigError);
}

TEST(Config, Overrides) {
    const auto c = from("lb: ops\ntopology: {nodes: 16}", {"lb=arcane", "topology.nodes=32", "topology.hosts_per_t0=8",
                                                           "arcane.buffer_size=2", "seeds=[7]"});
    EXPECT_EQ(c.sim.lb.kind, lb::Kind::arcane);
    EXPECT_EQ(c.sim.topology.nodes, 32u);
    EXPECT_EQ(c.sim.lb.arcane.buffer_size, 2u);
    EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{7});
    EXPECT_THROW(from("", {"novalue"}), ConfigError);
    EXPECT_THROW(from("lb: ops", {"lb.kind=arcane"}), ConfigError);
    EXPECT_THROW(from("", {"topology.typo=1"}), ConfigError);
}

TEST(Config, TraceFileRelativeToConfig) {
    const auto c = from("workload: {kind: trace, trace_file: websearch_synthetic.cdf, load: 0.3}");
    EXPECT_EQ(c.sim.workload.kind, workload::Kind::trace_driven);
    EXPECT_FALSE(c.sim.workload.trace_cdf.empty());
}

TEST(Config, ShippedConfigsLoad) {
    for (const char* f : {"configs/tornado.yaml", "configs/fig9.yaml", "configs/permutation.yaml", "configs/incast.yaml",
                          "configs/trace.yaml", "configs/ballsbins.yaml", "configs/evs.yaml"})
        EXPECT_NO_THROW(load(f)) << f;
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load("configs/nope.yaml"), std::filesystem::filesystem_error);
}
