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

#include "fedgraph/runtime/simulation.hpp"

#include <exception>
#include <memory>
#include <mutex>
#include <algorithm>
#include <condition_variable>
#include <thread>

#include "fedgraph/common/error.hpp"

namespace fedgraph::runtime {

std::vector<algos::LocalData> client_data(const datazoo::FederatedDataset& ds) {
  if (ds.graph_level()) {
    throw Error(ErrorCode::kConfigError, "federated runs need a node-level dataset");
  }
  std::vector<algos::LocalData> out;
  out.reserve(ds.graphs.size());
  for (const auto& g : ds.graphs) out.push_back(algos::make_local_data(g));
  return out;
}

Course::Course(CourseConfig cfg, std::vector<algos::LocalData> data)
    : cfg_(std::move(cfg)), data_(std::move(data)) {
  cfg_.validate();
  if (data_.size() != cfg_.federation.num_clients) {
    throw Error(ErrorCode::kConfigError, "federation.num_clients is " + std::to_string(cfg_.federation.num_clients) +
                                             " but the dataset has " + std::to_string(data_.size()) + " clients");
  }
}

void Course::restore(CourseState state) {
  if (state.clients.size() != cfg_.federation.num_clients) {
    throw Error(ErrorCode::kCorruptCheckpoint, "checkpoint holds " + std::to_string(state.clients.size()) +
                                                   " clients, config has " +
                                                   std::to_string(cfg_.federation.num_clients));
  }
  state_ = std::move(state);
}

namespace {

template <typename Fn>
RunReport run_session(const CourseConfig& cfg, const std::vector<algos::LocalData>& data,
                      std::optional<CourseState>& state, std::uint64_t stop_round,
                      monitor::RoundLog* log, Fn&& transport) {
  Server server(cfg);
  if (state) server.restore(state->server);
  server.set_stop_round(stop_round);
  server.set_log(log);
  std::vector<std::unique_ptr<Client>> clients;
  std::vector<Client*> ptrs;
  for (ParticipantId id = 1; id <= cfg.federation.num_clients; ++id) {
    clients.push_back(std::make_unique<Client>(cfg, id, [&data](ParticipantId i) { return data.at(i - 1); }));
    if (state) clients.back()->restore(state->clients.at(id - 1));
    ptrs.push_back(clients.back().get());
  }
  RunReport report = transport(server, ptrs);
  CourseState next;
  next.server = server.state();
  for (auto* c : ptrs) next.clients.push_back(c->state());
  std::sort(next.clients.begin(), next.clients.end(),
            [](const ClientState& a, const ClientState& b) { return a.id < b.id; });
  state = std::move(next);
  return report;
}

}  // namespace

RunReport Course::run(std::uint64_t stop_round, monitor::RoundLog* log, const Tap& tap) {
  return run_session(cfg_, data_, state_, stop_round, log,
                     [&](Server& s, const std::vector<Client*>& c) { return run_simulation(s, c, tap); });
}

RunReport Course::run_tcp(std::uint64_t stop_round, monitor::RoundLog* log) {
  return run_session(cfg_, data_, state_, stop_round, log, [&](Server& s, const std::vector<Client*>& clients) {
    std::mutex mu;
    std::condition_variable cv;
    std::optional<std::uint16_t> port;
    std::exception_ptr client_error;
    TcpServerOptions opt;
    opt.on_listening = [&](std::uint16_t p) {
      std::lock_guard lock(mu);
      port = p;
      cv.notify_all();
    };
    std::vector<std::thread> threads;
    for (Client* c : clients) {
      threads.emplace_back([&, c] {
        try {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return port.has_value(); });
          TcpClientOptions copt;
          copt.port = *port;
          lock.unlock();
          run_tcp_client(*c, copt);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!client_error) client_error = std::current_exception();
        }
      });
    }
    RunReport report;
    std::exception_ptr server_error;
    try {
      report = run_tcp_server(s, opt);
    } catch (...) {
      server_error = std::current_exception();
      std::lock_guard lock(mu);
      if (!port) {
        port = 0;  // release waiting clients; they fail to connect
        cv.notify_all();
      }
    }
    for (auto& t : threads) t.join();
    if (server_error) std::rethrow_exception(server_error);
    if (client_error) std::rethrow_exception(client_error);
    return report;
  });
}

}  // namespace fedgraph::runtime
