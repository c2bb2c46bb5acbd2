// Rare-value estimation from random simulation and threshold classification.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "hwt/netlist.hpp"
#include "hwt/sim.hpp"

namespace hwt {

struct ProfileEntry {
    std::string net;
    bool rare_value;   // tie at 0.5 fixes rare_value = 0
    double rare_prob;  // always <= 0.5
};

// Per-net rare value and probability over a sample run. Primary inputs are
// excluded (uniform by stimulus construction).
struct SignalProfile {
    std::vector<ProfileEntry> entries;  // net name ascending
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;

    const ProfileEntry* find(const std::string& net) const;
};

SignalProfile profile_signals(const Netlist& n, std::uint64_t sample_count, std::uint64_t seed);
// Profile over an explicit sample set (used by oracles and exhaustive tests).
SignalProfile profile_signals_with(const Netlist& n, const std::vector<Pattern>& samples);

struct RareMember {
    std::string net;
    bool rare_value;
    double rare_prob;
};

struct RareSet {
    double threshold = 0.0;
    std::vector<RareMember> members;  // ascending rare_prob, ties by net name
};

RareSet rare_set(const SignalProfile& profile, double threshold);

// CSV: header `net,rare_value,rare_prob,samples`, rows net-name ascending.
std::string profile_to_csv(const SignalProfile& p);
SignalProfile profile_from_csv(std::istream& in);
SignalProfile profile_from_csv_file(const std::string& path);
void profile_to_csv_file(const SignalProfile& p, const std::string& path);

}  // namespace hwt
