#include "greeniot/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greeniot/errors.hpp"

namespace greeniot {

namespace {

constexpr double kSlotSeconds = 1.0;
constexpr double kBoundTol = 1e-9;

double finish_step(const BatteryState& battery, double stored, double drain) {
  const double next = battery.level + stored - drain;
  if (next < -kBoundTol)
    throw EnergyInfeasibleError("battery overdraft: level " + std::to_string(battery.level) +
                                " + " + std::to_string(stored) + " - " +
                                std::to_string(drain));
  if (next > battery.capacity + kBoundTol)
    throw ModelViolationError("battery level exceeds capacity");
  return std::clamp(next, 0.0, battery.capacity);
}

}  // namespace

const char* weather_name(Weather w) {
  switch (w) {
    case Weather::kPoor: return "poor";
    case Weather::kFair: return "fair";
    case Weather::kGood: return "good";
    case Weather::kExcellent: return "excellent";
  }
  return "?";
}

SolarParams SolarParams::table_defaults() {
  SolarParams p;
  p.mean = {1.75, 4.21, 7.02, 9.38};
  p.variance = {0.65, 1.04, 2.34, 0.54};
  p.transition = {{{0.979, 0.015, 0.006, 0.0},
                   {0.005, 0.988, 0.007, 0.0},
                   {0.006, 0.009, 0.975, 0.010},
                   {0.0, 0.0, 0.007, 0.993}}};
  return p;
}

SolarParams SolarParams::prose_defaults() {
  SolarParams p = table_defaults();
  // Listed excellent-to-poor in the text.
  p.mean = {17.9, 45.6, 76.0, 94.6};
  p.variance = {0.71, 1.48, 1.55, 0.31};
  return p;
}

void SolarParams::validate() const {
  for (int s = 0; s < kWeatherStates; ++s) {
    if (mean[s] < 0.0 || variance[s] < 0.0)
      throw ConfigError("solar means and variances must be non-negative");
    double sum = 0.0;
    for (double p : transition[s]) {
      if (p < 0.0) throw ConfigError("negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("transition row " + std::to_string(s) + " does not sum to 1");
  }
}

std::array<double, kWeatherStates> SolarParams::stationary() const {
  std::array<double, kWeatherStates> pi;
  pi.fill(1.0 / kWeatherStates);
  for (int it = 0; it < 200000; ++it) {
    std::array<double, kWeatherStates> next{};
    for (int a = 0; a < kWeatherStates; ++a)
      for (int b = 0; b < kWeatherStates; ++b) next[b] += pi[a] * transition[a][b];
    double diff = 0.0;
    for (int s = 0; s < kWeatherStates; ++s) diff += std::abs(next[s] - pi[s]);
    pi = next;
    if (diff < 1e-15) break;
  }
  return pi;
}

Weather sample_weather(const std::array<double, kWeatherStates>& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (int s = 0; s < kWeatherStates; ++s) {
    acc += probs[s];
    if (u < acc) return static_cast<Weather>(s);
  }
  // Rounding left u above the cumulative sum: take the last state with mass.
  for (int s = kWeatherStates - 1; s >= 0; --s)
    if (probs[s] > 0.0) return static_cast<Weather>(s);
  return Weather::kPoor;
}

Weather next_weather(const SolarParams& params, Weather from, Rng& rng) {
  return sample_weather(params.transition[static_cast<int>(from)], rng);
}

SolarProcess::SolarProcess(const SolarParams& params, Weather initial)
    : params_(&params), state_(initial) {}

Weather SolarProcess::advance(Rng& rng) {
  state_ = next_weather(*params_, state_, rng);
  return state_;
}

double sample_arrival(const SolarParams& params, Weather state, double panel_side,
                      double efficiency, Rng& rng) {
  if (panel_side < 0.0) throw DomainError("panel side must be non-negative");
  const int s = static_cast<int>(state);
  std::normal_distribution<double> irr(params.mean[s], std::sqrt(params.variance[s]));
  const double x = std::max(0.0, irr(rng));
  // mW/cm^2 * cm^2 * s = mJ
  return x * panel_side * panel_side * efficiency * kSlotSeconds * 1e-3;
}

double mean_arrival(const SolarParams& params, Weather state, double panel_side,
                    double efficiency) {
  return params.mean[static_cast<int>(state)] * panel_side * panel_side * efficiency *
         kSlotSeconds * 1e-3;
}

double store_energy(double arrival, const BatteryState& battery) {
  return std::max(0.0, std::min(arrival, battery.capacity - battery.level));
}

double gateway_utilization(const std::vector<ActiveVnf>& active, double cpu_capacity) {
  double load = 0.0;
  for (const auto& v : active) {
    if (v.demand < 0.0) throw DomainError("negative compute demand");
    if (v.located_here) load += v.demand;
  }
  if (load == 0.0) return 0.0;
  if (load > cpu_capacity + kBoundTol) throw CapacityError("gateway CPU capacity exceeded");
  return load / cpu_capacity;
}

double server_utilization(const std::vector<double>& demands, double cpu_capacity) {
  double load = 0.0;
  for (double d : demands) {
    if (d < 0.0) throw DomainError("negative compute demand");
    load += d;
  }
  if (load == 0.0) return 0.0;
  if (load > cpu_capacity + kBoundTol) throw CapacityError("server CPU capacity exceeded");
  return load / cpu_capacity;
}

double gateway_energy_step(const BatteryState& battery, double stored, double utilization,
                           double base_power, double peak_power) {
  if (utilization < 0.0 || utilization > 1.0 + kBoundTol)
    throw DomainError("utilization outside [0, 1]");
  return finish_step(battery, stored, (peak_power - base_power) * utilization * kSlotSeconds);
}

double server_energy_step(const BatteryState& battery, double stored, double utilization,
                          double base_power, double peak_power) {
  return gateway_energy_step(battery, stored, utilization, base_power, peak_power);
}

double device_upload_cost(double tx_power, double sense_energy_per_bit, double rate) {
  return tx_power * kSlotSeconds + sense_energy_per_bit * rate * kSlotSeconds;
}

double device_energy_step(const BatteryState& battery, double stored, bool uploading,
                          double tx_power, double sense_energy_per_bit, double rate) {
  const double drain = uploading ? device_upload_cost(tx_power, sense_energy_per_bit, rate) : 0.0;
  return finish_step(battery, stored, drain);
}

}  // namespace greeniot
