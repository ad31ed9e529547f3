#pragma once

#include <span>
#include <string>
#include <vector>

namespace varshift::oracle {

struct SrsdTraceRow {
    int index = 0;             // observation index, 1-based
    double band_lower = 0.0;   // critical band in force when the point arrived
    double band_upper = 0.0;
    double weight = 0.0;       // weight assigned on arrival
    double rssi = 0.0;         // running index after the point (0 when not testing)
    std::string event;         // accept | open | continue | dissolve | confirm
};

struct SrsdTrace {
    std::vector<int> change_points;       // first-point convention
    std::vector<char> directions;         // 'u' or 'd', aligned with change_points
    std::vector<double> regime_variances; // weighted variance per final regime
    bool pending_open = false;
    int pending_index = 0;
    std::vector<SrsdTraceRow> log;
};

/// Step-by-step sequential-detector re-derivation: every quantity is
/// recomputed in place from explicit loops (weight masses by full summation,
/// the residual index from the stored window). Audits each band, weight and
/// index application.
SrsdTrace srsd_trace(std::span<const double> series, double p, int cutoff, double huber);

}  // namespace varshift::oracle
