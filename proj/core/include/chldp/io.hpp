#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chldp/green_increments.hpp"
#include "chldp/ldp.hpp"
#include "chldp/rate.hpp"

namespace chldp {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t x);

/// CSV with header `t,u0,...,u{N-1}` and one row per time point m = 0..M.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// CSV with header `t,v0,...,v{N-1}`; row m holds v on [t_m, t_{m+1}).
void write_control_csv(const ControlPath& v, std::ostream& out);
ControlPath read_control_csv(std::istream& in, const Grid& grid, const TimeGrid& time);
ControlPath read_control_csv(const std::string& path, const Grid& grid, const TimeGrid& time);

/// Header `j,x,value` (d = 1) or `j,x1,x2,value` (d = 2).
void write_field_csv(const GridField& g, std::ostream& out);

nlohmann::ordered_json certificate_to_json(const RateCertificate& cert);
RateCertificate certificate_from_json(const nlohmann::json& j);
RateCertificate read_certificate(const std::string& path);

nlohmann::ordered_json estimate_to_json(const ProbabilityEstimate& e);
/// Header `epsilon,method,replicas,hits,p_hat,ci_lo,ci_hi,std_error,eps_log_p,zero_hit,aborted`.
void write_estimates_csv(const std::vector<ProbabilityEstimate>& rows, std::ostream& out);

nlohmann::ordered_json scaling_to_json(const ScalingReport& r);
/// Header `epsilon,p_hat,ci_lo,ci_hi,eps_log_p,neg_eps_log_p,neg_lo,neg_hi,method,replicas,bound_only`.
void write_scaling_csv(const ScalingReport& r, std::ostream& out);

/// Header `parameter,distance,std_error,control_norm_sq`.
void write_distance_csv(const std::vector<DistanceRow>& rows, std::ostream& out);

nlohmann::ordered_json green_to_json(const GreenIncrementReport& r);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& text);
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace chldp
