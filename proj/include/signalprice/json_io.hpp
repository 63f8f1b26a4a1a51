#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "signalprice/core.hpp"
#include "signalprice/errors.hpp"

namespace signalprice {

using nlohmann::json;

inline json instance_to_json(const AuctionInstance& inst) {
  json j;
  j["states"] = inst.states;
  j["prior"] = inst.prior;
  j["buyers"] = json::array();
  for (const auto& b : inst.buyers) {
    json jb;
    jb["support"] = json::array();
    for (const auto& a : b.support)
      jb["support"].push_back({{"values", a.values}, {"prob", a.prob}});
    j["buyers"].push_back(std::move(jb));
  }
  return j;
}

inline AuctionInstance instance_from_json(const json& j) {
  AuctionInstance inst;
  try {
    inst.states = j.at("states").get<std::vector<std::string>>();
    inst.prior = j.at("prior").get<std::vector<double>>();
    for (const auto& jb : j.at("buyers")) {
      ValuationDistribution dist;
      for (const auto& ja : jb.at("support")) {
        ValuationDistribution::Atom atom;
        atom.values = ja.at("values").get<std::vector<double>>();
        atom.prob = ja.at("prob").get<double>();
        dist.support.push_back(std::move(atom));
      }
      inst.buyers.push_back(std::move(dist));
    }
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("bad instance json: ") + e.what());
  }
  inst.validate();
  return inst;
}

inline json scheme_to_json(const SignalingScheme& scheme) {
  json j;
  j["signals"] = scheme.signals;
  j["kernel"] = json::array();
  for (const auto& row : scheme.kernel) {
    json jrow = json::array();
    for (const auto& e : row) {
      json labels = json::array();
      for (int i = 0; i < static_cast<int>(e.profile.size()); ++i)
        labels.push_back(scheme.signals[i][e.profile[i]]);
      jrow.push_back({{"profile", labels}, {"prob", e.prob}});
    }
    j["kernel"].push_back(std::move(jrow));
  }
  j["prices"] = json::array();
  for (std::size_t i = 0; i < scheme.prices.size(); ++i) {
    json jp = json::object();
    for (std::size_t s = 0; s < scheme.prices[i].size(); ++s)
      if (!std::isnan(scheme.prices[i][s])) jp[scheme.signals[i][s]] = scheme.prices[i][s];
    j["prices"].push_back(std::move(jp));
  }
  return j;
}

inline SignalingScheme scheme_from_json(const json& j) {
  SignalingScheme scheme;
  try {
    scheme.signals = j.at("signals").get<std::vector<std::vector<std::string>>>();
    const int n = scheme.num_buyers();
    scheme.prices.resize(n);
    for (int i = 0; i < n; ++i)
      scheme.prices[i].assign(scheme.signals[i].size(),
                              std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < n; ++i)
      for (const auto& [label, price] : j.at("prices").at(i).items())
        scheme.prices[i][scheme.signal_index(i, label)] = price.get<double>();
    for (const auto& jrow : j.at("kernel")) {
      std::vector<SignalingScheme::KernelEntry> row;
      for (const auto& je : jrow) {
        SignalingScheme::KernelEntry e;
        const auto& labels = je.at("profile");
        for (int i = 0; i < n; ++i)
          e.profile.push_back(scheme.signal_index(i, labels.at(i).get<std::string>()));
        e.prob = je.at("prob").get<double>();
        row.push_back(std::move(e));
      }
      scheme.kernel.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw InvalidScheme(std::string("bad scheme json: ") + e.what());
  }
  return scheme;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("bad json in ") + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInstance("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace signalprice
