#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddl/config.hpp"
#include "ddl/constants.hpp"
#include "ddl/moc.hpp"
#include "ddl/radial.hpp"
#include "ddl/solver.hpp"
#include "ddl/spectral.hpp"
#include "ddl/velocity.hpp"

namespace ddl {

enum ExitCode { exit_pass = 0, exit_property_failure = 1, exit_validation = 2, exit_nonconvergence = 3 };

const std::vector<std::string>& experiment_names();

// Builders read one config section each and validate before returning.
PeriodicGrid grid_from_config(const Config& c);
RadialProfile profile_from_config(const Config& c);
VelocityModel model_from_config(const Config& c, int d);
KernelSpec kernel_spec_from_config(const Config& c, const RadialProfile& p, int d);
LevyOperator operator_from_config(const Config& c, const KernelSpec& spec, const PeriodicGrid& g);
SolverConfig solver_from_config(const Config& c);
Field initial_from_config(const Config& c, const PeriodicGrid& g, std::uint64_t seed);

// Sum of Fourier modes with kmin <= |k| <= kmax, Gaussian amplitudes decaying
// like |k|^{-slope}, scaled so max |theta| = amplitude. Deterministic in seed.
Field random_band_field(const PeriodicGrid& g, int kmin, int kmax, double slope, double amplitude,
                        std::uint64_t seed);

struct RunOptions {
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    bool quiet = false;
};

// Runs one experiment, writing artifacts and manifest.json into output_dir.
// Returns an ExitCode; errors are reported in the manifest, never thrown.
int run_experiment(const std::string& experiment, const Config& config, const RunOptions& opt);

// Aggregates manifest.json files; missing manifests are listed as skipped.
int report(const std::vector<std::string>& run_dirs, const std::string& output_dir, bool quiet = false);

}  // namespace ddl
