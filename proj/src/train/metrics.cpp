// SPDX-License-Identifier: Apache-2.0
#include "drgcl/train/metrics.hpp"

#include <json.hpp>

#include "drgcl/util/error.hpp"

namespace drgcl {

std::string to_json_line(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["loss_drin"] = r.loss_drin;
  j["loss_rr_inv"] = r.loss_rr_inv;
  j["loss_rr_dec"] = r.loss_rr_dec;
  j["loss_combined"] = r.loss_combined;
  j["r_min"] = r.r_min;
  j["r_mean"] = r.r_mean;
  j["r_max"] = r.r_max;
  j["r_at_zero"] = r.r_at_zero;
  j["r_at_one"] = r.r_at_one;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump();
}

EpochRecord parse_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.loss_drin = j.at("loss_drin").get<double>();
    r.loss_rr_inv = j.at("loss_rr_inv").get<double>();
    r.loss_rr_dec = j.at("loss_rr_dec").get<double>();
    r.loss_combined = j.at("loss_combined").get<double>();
    r.r_min = j.at("r_min").get<double>();
    r.r_mean = j.at("r_mean").get<double>();
    r.r_max = j.at("r_max").get<double>();
    r.r_at_zero = j.at("r_at_zero").get<double>();
    r.r_at_one = j.at("r_at_one").get<double>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics record: ") + e.what());
  }
}

}  // namespace drgcl
