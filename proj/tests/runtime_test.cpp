// Copyright 2026 The fedgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include <unistd.h>

#include "doctest.h"
#include "fedgraph/common/error.hpp"
#include "fedgraph/datazoo/csbm.hpp"
#include "fedgraph/runtime/course.hpp"
#include "fedgraph/runtime/simulation.hpp"
#include "fedgraph/runtime/transport.hpp"
#include "json.hpp"

using namespace fedgraph;
using namespace fedgraph::runtime;

namespace {

datazoo::FederatedDataset small_csbm(std::size_t clients, std::uint64_t seed) {
  datazoo::CsbmParams p;
  p.nodes_per_client = 40;
  p.feature_dim = 6;
  p.avg_degree = 4;
  p.phi_per_client.assign(clients, 0.8);
  p.seed = seed;
  return datazoo::fedcsbm_generate(p);
}

CourseConfig small_config(std::uint32_t n, std::uint32_t k, std::uint64_t rounds) {
  CourseConfig c;
  c.model.in_dim = 6;
  c.model.num_classes = 2;
  c.model.gnn_dims = {8, 2};
  c.model.dropout = 0.2;
  c.train.local_steps = 2;
  c.train.lr = 0.1;
  c.federation.num_clients = n;
  c.federation.clients_per_round = k;
  c.federation.total_rounds = rounds;
  c.federation.eval_every = 2;
  c.seed = 42;
  return c;
}

class Capture : public Context {
 public:
  void send(Message m) override { sent.push_back(std::move(m)); }
  std::vector<Message> sent;
};

}  // namespace

TEST_CASE("message codec") {
  Message params{"model_para", 0, {2, 5}, 7, ParamsPayload{}};
  auto& p = std::get<ParamsPayload>(params.payload);
  p.tensors["b.weight"] = Tensor(2, 2, {1.5, -0.0, 3.0, std::numeric_limits<double>::denorm_min()});
  p.tensors["a.bias"] = Tensor(1, 3, {0.1, 0.2, 0.3});
  p.sample_count = 12;
  p.scalars["train_loss"] = std::numeric_limits<double>::quiet_NaN();
  p.scalars["x"] = 0.1 + 0.2;
  const std::string body = serialize_message(params);
  CHECK(identical(deserialize_message(body), params));

  SUBCASE("header lists tensors in name order") {
    const std::uint32_t hlen = (static_cast<std::uint8_t>(body[6]) << 24) | (static_cast<std::uint8_t>(body[7]) << 16) |
                               (static_cast<std::uint8_t>(body[8]) << 8) | static_cast<std::uint8_t>(body[9]);
    auto header = nlohmann::json::parse(body.substr(10, hlen));
    REQUIRE(header["tensors"].size() == 2);
    CHECK(header["tensors"][0]["name"] == "a.bias");
    CHECK(header["tensors"][1]["name"] == "b.weight");
    CHECK(header["tensors"][1]["offset"] == 24);
    CHECK(body.substr(0, 4) == "FSGM");
  }
  SUBCASE("other payloads") {
    Message metrics{"metrics", 3, {0}, 1, MetricsPayload{{{"val_acc", 0.75}}}};
    CHECK(identical(deserialize_message(serialize_message(metrics)), metrics));
    Message ctl{"assign_id", 0, {4}, 0, ControlPayload{ControlKind::kAssignId, {{"id", 4}}}};
    CHECK(identical(deserialize_message(serialize_message(ctl)), ctl));
  }
  SUBCASE("malformed input") {
    for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, body.size() - 1}) {
      CHECK_THROWS_WITH_AS(deserialize_message(body.substr(0, cut)), doctest::Contains("MalformedFrame"), Error);
    }
    std::string bad_version = body;
    bad_version[5] = 2;
    CHECK_THROWS_WITH_AS(deserialize_message(bad_version), doctest::Contains("VersionMismatch"), Error);
    std::string bad_magic = body;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize_message(bad_magic), Error);
  }
}

TEST_CASE("handler registry") {
  HandlerRegistry reg;
  int calls = 0;
  reg.register_handler("ping", [&](const Message&, Context&) { ++calls; });
  Capture ctx;
  reg.dispatch(Message{"ping", 1, {}, 0, MetricsPayload{}}, ctx);
  CHECK(calls == 1);
  CHECK_THROWS_WITH_AS(reg.dispatch(Message{"pong", 1, {}, 0, MetricsPayload{}}, ctx),
                       doctest::Contains("UnknownMessageType"), Error);
  CHECK_THROWS_WITH_AS(reg.register_handler("ping", [](const Message&, Context&) {}),
                       doctest::Contains("DuplicateHandler"), Error);
  reg.unregister_handler("ping");
  CHECK_FALSE(reg.has_handler("ping"));
}

TEST_CASE("id allocation") {
  IdAllocator ids(3);
  CHECK(ids.allocate(2) == 2);
  CHECK(ids.allocate(2) == 1);
  CHECK(ids.allocate(0) == 3);
  CHECK_THROWS_AS(ids.allocate(1), Error);
}

TEST_CASE("single client, single round") {
  auto ds = small_csbm(1, 1);
  auto cfg = small_config(1, 1, 1);
  Course course(cfg, client_data(ds));
  auto report = course.run(1);
  CHECK(report.rounds_run() == 1);
  CHECK(report.records.size() == 1);
  REQUIRE(report.final);

  nn::ModelSpec spec = cfg.model;
  Rng init = model_init_rng(cfg.seed);
  auto store = nn::init_params(spec, init);
  Rng rng = client_rng(cfg.seed, 1);
  auto data = algos::make_local_data(ds.graphs[0]);
  auto local = algos::local_update(store, spec, cfg.train, data, store.params(), rng);
  CHECK(bitwise_equal(course.state()->server.global, local.params));
}

TEST_CASE("simulation is deterministic and aggregates exactly K updates") {
  auto ds = small_csbm(4, 2);
  auto cfg = small_config(4, 2, 5);
  std::map<std::uint64_t, int> updates_per_round;
  Tap count = [&](const Message& m, std::string_view) {
    if (m.msg_type == msg::kModelUpdate) ++updates_per_round[m.state];
    return true;
  };
  Course a(cfg, client_data(ds));
  Course b(cfg, client_data(ds));
  auto ra = a.run(5, nullptr, count);
  auto rb = b.run(5);
  CHECK(bitwise_equal(a.state()->server.global, b.state()->server.global));
  CHECK(to_json(ra) == to_json(rb));
  REQUIRE(ra.records.size() == 5);
  for (const auto& r : ra.records) {
    CHECK(r.sampled.size() == 2);
    REQUIRE(r.b_dissimilarity);
    CHECK(*r.b_dissimilarity >= 1.0);
    CHECK(r.val_acc.has_value() == (r.round % 2 == 0 || r.round == 5));
  }
  CHECK(updates_per_round.size() == 5);
  for (const auto& [round, n] : updates_per_round) CHECK(n == 2);
}

TEST_CASE("memory and TCP transports agree") {
  auto ds = small_csbm(3, 3);
  auto cfg = small_config(3, 2, 4);
  Course mem(cfg, client_data(ds));
  Course tcp(cfg, client_data(ds));
  auto rm = mem.run(4);
  auto rt = tcp.run_tcp(4);
  CHECK(bitwise_equal(mem.state()->server.global, tcp.state()->server.global));
  CHECK(to_json(rm) == to_json(rt));
}

TEST_CASE("lost update is reported as a deadlock") {
  auto ds = small_csbm(3, 4);
  auto cfg = small_config(3, 3, 3);
  Course course(cfg, client_data(ds));
  Tap lose = [](const Message& m, std::string_view) {
    return !(m.msg_type == msg::kModelUpdate && m.sender == 2 && m.state == 1);
  };
  try {
    course.run(3, nullptr, lose);
    FAIL("expected a deadlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDeadlock);
    CHECK(std::string(e.what()).find("round 1") != std::string::npos);
    CHECK(std::string(e.what()).find("[2]") != std::string::npos);
  }
}

TEST_CASE("stale updates are dropped") {
  auto ds = small_csbm(1, 5);
  auto cfg = small_config(1, 1, 3);
  cfg.federation.eval_every = 10;
  Server server(cfg);
  Client client(cfg, 1, [&](ParticipantId) { return algos::make_local_data(ds.graphs[0]); });
  Capture to_client, to_server;
  server.handlers().dispatch(Message{"join", 1, {0}, 0, ControlPayload{ControlKind::kJoin, {}}}, to_client);
  Message para = to_client.sent.back();
  REQUIRE(para.msg_type == "model_para");
  client.handlers().dispatch(para, to_server);
  Message update = to_server.sent.back();
  server.handlers().dispatch(update, to_client);
  CHECK(server.round() == 1);
  const auto global = server.global();
  server.handlers().dispatch(update, to_client);  // state 0 < round 1
  CHECK(bitwise_equal(server.global(), global));
  CHECK(server.round() == 1);
  REQUIRE(server.report().notes.size() == 1);
  CHECK(server.report().notes[0].find("stale") != std::string::npos);
}

TEST_CASE("local parameters never leave the client") {
  auto ds = small_csbm(3, 6);
  auto cfg = small_config(3, 3, 3);
  cfg.model.gnn_dims.clear();
  cfg.model.kind = nn::GnnKind::kGprgnn;
  cfg.model.encoder = {8, 2};
  cfg.model.k_prop = 3;
  cfg.personalization = algos::PersonalizationSpec::parse({"gnn.gamma*->local", "*->shared"});
  Course course(cfg, client_data(ds));
  int params_seen = 0;
  Tap check = [&](const Message&, std::string_view body) {
    CHECK(body.find("gnn.gamma") == std::string_view::npos);
    ++params_seen;
    return true;
  };
  course.run(3, nullptr, check);
  CHECK(params_seen > 0);
  CHECK(course.state()->server.global.count("gnn.gamma") == 0);
  CHECK(course.state()->clients[0].local_params.count("gnn.gamma") == 1);
}

TEST_CASE("frame cap") {
  int fds[2];
  REQUIRE(::pipe(fds) == 0);
  CHECK_THROWS_WITH_AS(write_frame(fds[1], std::string(100, 'x'), 50), doctest::Contains("FrameTooLarge"), Error);
  ::close(fds[0]);
  ::close(fds[1]);
}
