#pragma once

#include <array>
#include <vector>

#include "greeniot/rng.hpp"

namespace greeniot {

enum class Weather : int { kPoor = 0, kFair = 1, kGood = 2, kExcellent = 3 };
inline constexpr int kWeatherStates = 4;

const char* weather_name(Weather w);

// Irradiance statistics (mW/cm^2) and the weather transition matrix.
struct SolarParams {
  std::array<double, kWeatherStates> mean{};
  std::array<double, kWeatherStates> variance{};
  std::array<std::array<double, kWeatherStates>, kWeatherStates> transition{};

  // Per-state statistics from the parameter tables.
  static SolarParams table_defaults();
  // Alternative statistics quoted in the evaluation text; same transitions.
  static SolarParams prose_defaults();

  void validate() const;
  // Stationary distribution by power iteration.
  std::array<double, kWeatherStates> stationary() const;
};

// One Markov weather chain.
class SolarProcess {
 public:
  SolarProcess(const SolarParams& params, Weather initial);

  Weather state() const { return state_; }
  Weather advance(Rng& rng);
  const SolarParams& params() const { return *params_; }

 private:
  const SolarParams* params_;
  Weather state_;
};

Weather sample_weather(const std::array<double, kWeatherStates>& probs, Rng& rng);
Weather next_weather(const SolarParams& params, Weather from, Rng& rng);

// Energy (J) harvested over one 1 s slot by a square panel of side
// `panel_side` cm. Irradiance is Gaussian per state, truncated at zero.
double sample_arrival(const SolarParams& params, Weather state, double panel_side,
                      double efficiency, Rng& rng);
// Closed-form expectation of the untruncated draw, in joules.
double mean_arrival(const SolarParams& params, Weather state, double panel_side,
                    double efficiency);

struct BatteryState {
  double level = 0.0;
  double capacity = 0.0;
  double stored_this_slot = 0.0;
};

// Largest storable amount: min(arrival, capacity - level).
double store_energy(double arrival, const BatteryState& battery);

// Sum of compute demands of the collectors actually located here, over Cmax.
struct ActiveVnf {
  double demand = 0.0;
  bool located_here = true;
};
double gateway_utilization(const std::vector<ActiveVnf>& active, double cpu_capacity);
double server_utilization(const std::vector<double>& demands, double cpu_capacity);

// Both return the new level after charging (P1 - P0) * U; an overdraft throws
// EnergyInfeasibleError, an overflow ModelViolationError.
double gateway_energy_step(const BatteryState& battery, double stored, double utilization,
                           double base_power, double peak_power);
double server_energy_step(const BatteryState& battery, double stored, double utilization,
                          double base_power, double peak_power);

// Device drain when uploading: tx power over the slot plus sensing rho * rate.
double device_upload_cost(double tx_power, double sense_energy_per_bit, double rate);
double device_energy_step(const BatteryState& battery, double stored, bool uploading,
                          double tx_power, double sense_energy_per_bit, double rate);

}  // namespace greeniot
