#include "qlane/config.hpp"

#include <algorithm>
#include <string>

#include "qlane/errors.hpp"

namespace qlane {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out, std::string_view context) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(context) + "." + key + ": wrong type");
  }
}

}  // namespace

json to_json(const SimParams& p) {
  return {{"side", p.side},
          {"mpr", p.mpr},
          {"d", p.d},
          {"K", p.K},
          {"s", p.s},
          {"t_max", p.t_max},
          {"b2_hdv", p.b2_hdv},
          {"b2_av", p.b2_av},
          {"init_coop_av", p.init_coop_av},
          {"init_coop_hdv", p.init_coop_hdv},
          {"seed", p.seed}};
}

SimParams sim_params_from_json(const json& j, SimParams base) {
  constexpr std::string_view ctx = "params";
  reject_unknown_keys(j, {"side", "mpr", "d", "K", "s", "t_max", "b2_hdv", "b2_av", "init_coop_av",
                          "init_coop_hdv", "seed"},
                      ctx);
  read(j, "side", base.side, ctx);
  read(j, "mpr", base.mpr, ctx);
  read(j, "d", base.d, ctx);
  read(j, "K", base.K, ctx);
  read(j, "s", base.s, ctx);
  read(j, "t_max", base.t_max, ctx);
  read(j, "b2_hdv", base.b2_hdv, ctx);
  read(j, "b2_av", base.b2_av, ctx);
  read(j, "init_coop_av", base.init_coop_av, ctx);
  read(j, "init_coop_hdv", base.init_coop_hdv, ctx);
  read(j, "seed", base.seed, ctx);
  return base;
}

json to_json(const SyntheticTableSpec& spec) {
  return {{"feature_mean", spec.feature_mean},
          {"feature_std", spec.feature_std},
          {"intercept_mean_active", spec.intercept_mean[0]},
          {"intercept_mean_passive", spec.intercept_mean[1]},
          {"intercept_std", spec.intercept_std},
          {"weight_std", spec.weight_std},
          {"av_intercept_shift", spec.av_intercept_shift}};
}

SyntheticTableSpec synthetic_spec_from_json(const json& j, SyntheticTableSpec base) {
  constexpr std::string_view ctx = "synthetic";
  reject_unknown_keys(j, {"feature_mean", "feature_std", "intercept_mean_active", "intercept_mean_passive",
                          "intercept_std", "weight_std", "av_intercept_shift"},
                      ctx);
  read(j, "feature_mean", base.feature_mean, ctx);
  read(j, "feature_std", base.feature_std, ctx);
  read(j, "intercept_mean_active", base.intercept_mean[0], ctx);
  read(j, "intercept_mean_passive", base.intercept_mean[1], ctx);
  read(j, "intercept_std", base.intercept_std, ctx);
  read(j, "weight_std", base.weight_std, ctx);
  read(j, "av_intercept_shift", base.av_intercept_shift, ctx);
  base.validate();
  return base;
}

}  // namespace qlane
