#pragma once

// Values frozen from a calibration run; a change means the generator,
// simulator or estimator changed behavior.
namespace fixtures {

// corr(τ̂, τ_true) for `gen --seed 1` followed by `estimate` with defaults.
inline constexpr double kDefaultCorrelation = 0.99599;
inline constexpr double kCorrelationDrift = 5e-5;

}  // namespace fixtures
