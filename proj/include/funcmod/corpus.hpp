#pragma once

#include <cstdint>

#include "funcmod/dataset.hpp"

namespace funcmod {

// Census-style income corpus with the classic 13-feature schema (age,
// workclass, fnlwgt, education, marital-status, occupation, relationship,
// race, sex, capital-gain, capital-loss, hours-per-week, native-country) and
// a binary income target. Rows come from a fixed generative model, so any
// corpus size is reproducible from the seed alone. Income depends mostly on
// education, marital status, occupation, capital flows and hours; fnlwgt,
// race and country carry no signal.
TabularDataset make_adultlike(size_t n, uint64_t seed);

// Monthly CO2-style concentration series (fractional-year x, ppm y):
// quadratic growth plus a 12-month seasonal cycle with slowly growing
// amplitude and small measurement noise.
SeriesDataset make_co2like(double start_year = 1958.25, double end_year = 2001.0,
                           uint64_t seed = 0);

} // namespace funcmod
