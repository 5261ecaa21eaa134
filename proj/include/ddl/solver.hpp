#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddl/radial.hpp"
#include "ddl/spectral.hpp"
#include "ddl/velocity.hpp"

namespace ddl {

enum class Scheme { if_rk4 };

struct SolverConfig {
    double dt = 1e-3;         // upper bound on the step; CFL may shrink it
    double t_end = 1.0;
    double epsilon = 0.0;     // viscous term -epsilon Delta theta
    double cfl_safety = 0.5;
    int record_every = 10;
    Scheme scheme = Scheme::if_rk4;
    bool adaptive_dt = true;
    bool nonlinear = true;    // false drops u.grad(theta) (pure linear flow)
    bool dealias = true;
    double holder_beta = -1.0;  // negative: 1 - alpha + sigma + 0.05 from the operator's profile
    int holder_stride = 0;      // 0: chosen so at most 4096 points enter the pair scan
    double hs_s = 1.0;
    double blowup_grad = 1e6;
    double blowup_top_fraction = 1e-2;
    std::string snapshot_dir;   // empty: no snapshots written
    int snapshot_every = 0;     // in records

    void validate() const;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
    double grad_max = 0.0;
    double holder = 0.0;
    double hs = 0.0;
    double energy_dissipated = 0.0;  // cumulative int <L theta, theta> dt
    double viscous_dissipated = 0.0; // cumulative epsilon int |grad theta|^2 dt
    double min_dx = 0.0;             // min of d theta / d x1
    double top_fraction = 0.0;       // energy share of the top retained octave
    double dt = 0.0;
};

struct SimulationResult {
    std::vector<DiagnosticsRecord> series;
    Field final_state;
    double t_final = 0.0;
    long steps = 0;
    bool blowup = false;
    std::string blowup_reason;
    double blowup_lo = 0.0;  // last healthy time
    double blowup_hi = 0.0;  // time the detector fired
    double wall_seconds = 0.0;
    double holder_beta = 0.0;
};

// Called at every record with the current time and state.
using Observer = std::function<void(double, const Field&)>;

// Operator and model are bound once; the stepper caches per-mode symbols.
class Stepper {
public:
    Stepper(const VelocityModel& model, const LevyOperator& op, const SolverConfig& cfg);

    // Advances theta_hat by dt in place. Returns max |u| seen at the first stage.
    double step(std::vector<cplx>& theta_hat, double dt) const;
    // Transport term -(u.grad theta)^ (dealiased when configured) and max |u|.
    std::vector<cplx> nonlinear(const std::vector<cplx>& theta_hat, double* umax = nullptr) const;
    double cfl_dt(double umax) const;

    const PeriodicGrid& grid() const { return grid_; }
    const std::vector<double>& linear_symbol() const { return lin_; }

private:
    VelocityModel model_;
    PeriodicGrid grid_;
    SolverConfig cfg_;
    std::vector<double> lin_;  // A(k) + epsilon |k|^2
    std::vector<std::vector<cplx>> vel_;
    std::vector<char> keep_;
};

DiagnosticsRecord diagnose(const Field& theta, double beta, int stride, double s);

// Supremum of |theta| on the trigonometric interpolant. In d = 1 the grid
// extrema are refined by Newton steps; in d = 2 the grid maximum is returned.
double spectral_sup_norm(const Field& theta);

SimulationResult simulate(const Field& theta0, const VelocityModel& model, const LevyOperator& op,
                          const SolverConfig& cfg, const RadialProfile* profile = nullptr,
                          const Observer& observer = {});

enum class MonitorNorm { linf, l2 };

struct MonitorReport {
    bool pass = true;
    MonitorNorm norm = MonitorNorm::linf;
    double worst_increase = 0.0;
    double at_t = 0.0;
    int records = 0;
};

// L-infinity for models without a divergence-free velocity, L^2 otherwise.
MonitorNorm monitor_norm_for(const VelocityModel& model);
MonitorReport max_principle_monitor(const std::vector<DiagnosticsRecord>& series, MonitorNorm norm,
                                    double tol = 1e-8);

double linf_level_estimate(double l2_0, double t0, double alpha, double sigma, int d, double T, double C);
double local_time_estimate(double hs_norm_0, double C_tilde);

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& series, const std::string& path);
void write_summary_json(const SimulationResult& res, const SolverConfig& cfg, const std::string& model_name,
                        const std::string& profile_desc, const std::string& path);

}  // namespace ddl
