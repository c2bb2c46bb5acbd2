#include "hwt/rarity.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "hwt/rng.hpp"

namespace hwt {

const ProfileEntry* SignalProfile::find(const std::string& net) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), net,
                               [](const ProfileEntry& e, const std::string& s) { return e.net < s; });
    if (it != entries.end() && it->net == net) return &*it;
    return nullptr;
}

namespace {

SignalProfile finish_profile(const Evaluator& ev, const std::vector<std::uint64_t>& ones,
                             std::uint64_t total, std::uint64_t seed) {
    SignalProfile p;
    p.sample_count = total;
    p.seed = seed;
    const auto& names = ev.net_names();
    for (std::size_t i = ev.input_count(); i < names.size(); ++i) {
        const std::uint64_t n1 = ones[i];
        const std::uint64_t n0 = total - n1;
        ProfileEntry e;
        e.net = names[i];
        if (n1 < n0) {
            e.rare_value = true;
            e.rare_prob = static_cast<double>(n1) / static_cast<double>(total);
        } else {
            e.rare_value = false;  // covers the exact tie
            e.rare_prob = static_cast<double>(n0) / static_cast<double>(total);
        }
        p.entries.push_back(std::move(e));
    }
    std::sort(p.entries.begin(), p.entries.end(),
              [](const ProfileEntry& a, const ProfileEntry& b) { return a.net < b.net; });
    return p;
}

}  // namespace

SignalProfile profile_signals(const Netlist& n, std::uint64_t sample_count, std::uint64_t seed) {
    if (sample_count < 1) throw Error("profile_signals: sample_count must be >= 1");
    Evaluator ev(n);
    const std::size_t width = ev.input_count();
    const std::size_t nwords_in = (width + 63) / 64;
    std::vector<std::uint64_t> ones(ev.net_count(), 0);
    std::vector<std::uint64_t> in_words(width);
    std::vector<std::uint64_t> words;
    std::uint64_t done = 0;
    while (done < sample_count) {
        const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, sample_count - done));
        std::fill(in_words.begin(), in_words.end(), 0);
        for (std::size_t j = 0; j < lanes; ++j) {
            const std::uint64_t idx = done + j;
            for (std::size_t b = 0; b < nwords_in; ++b) {
                const std::uint64_t w = rng::at(seed, idx * nwords_in + b);
                const std::size_t lo = b * 64, hi = std::min(width, lo + 64);
                for (std::size_t i = lo; i < hi; ++i)
                    if ((w >> (i - lo)) & 1) in_words[i] |= 1ull << j;
            }
        }
        ev.run_packed_words(in_words.data(), lanes, words);
        for (std::size_t i = 0; i < words.size(); ++i) ones[i] += std::popcount(words[i]);
        done += lanes;
    }
    return finish_profile(ev, ones, sample_count, seed);
}

SignalProfile profile_signals_with(const Netlist& n, const std::vector<Pattern>& samples) {
    if (samples.empty()) throw Error("profile_signals_with: empty sample set");
    Evaluator ev(n);
    std::vector<std::uint64_t> ones(ev.net_count(), 0);
    std::vector<std::uint64_t> words;
    for (std::size_t at = 0; at < samples.size(); at += 64) {
        const std::size_t lanes = std::min<std::size_t>(64, samples.size() - at);
        ev.run_packed(samples.data() + at, lanes, words);
        for (std::size_t i = 0; i < words.size(); ++i) ones[i] += std::popcount(words[i]);
    }
    return finish_profile(ev, ones, samples.size(), 0);
}

RareSet rare_set(const SignalProfile& profile, double threshold) {
    if (!(threshold > 0.0 && threshold < 0.5))
        throw Error("rare_set: threshold must lie in (0, 0.5)");
    RareSet rs;
    rs.threshold = threshold;
    for (const auto& e : profile.entries)
        if (e.rare_prob < threshold) rs.members.push_back({e.net, e.rare_value, e.rare_prob});
    std::sort(rs.members.begin(), rs.members.end(), [](const RareMember& a, const RareMember& b) {
        if (a.rare_prob != b.rare_prob) return a.rare_prob < b.rare_prob;
        return a.net < b.net;
    });
    return rs;
}

std::string profile_to_csv(const SignalProfile& p) {
    std::ostringstream out;
    out << "net,rare_value,rare_prob,samples\n";
    out.precision(17);
    for (const auto& e : p.entries)
        out << e.net << "," << (e.rare_value ? 1 : 0) << "," << e.rare_prob << "," << p.sample_count
            << "\n";
    return out.str();
}

SignalProfile profile_from_csv(std::istream& in) {
    SignalProfile p;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string net, rv, rp, samples;
        if (!std::getline(ls, net, ',') || !std::getline(ls, rv, ',') || !std::getline(ls, rp, ',') ||
            !std::getline(ls, samples, ','))
            throw Error("profile csv: malformed row: " + line);
        p.entries.push_back({net, rv == "1", std::stod(rp)});
        p.sample_count = std::stoull(samples);
    }
    return p;
}

SignalProfile profile_from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return profile_from_csv(in);
}

void profile_to_csv_file(const SignalProfile& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << profile_to_csv(p);
}

}  // namespace hwt
