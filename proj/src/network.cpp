#include "ftdkf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ftdkf/error.hpp"
#include "ftdkf/random.hpp"

namespace ftdkf {

DelayProfile::DelayProfile(int max_delay, std::vector<double> probabilities)
    : max_delay_(max_delay), probabilities_(std::move(probabilities)) {
    if (max_delay_ < 0) throw ValidationError("max_delay must be >= 0");
    if (static_cast<int>(probabilities_.size()) != max_delay_ + 1) {
        throw ValidationError("delay distribution needs max_delay + 1 probabilities");
    }
    for (double p : probabilities_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("delay probabilities must be nonnegative");
    }
    const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("delay probabilities must sum to 1");
}

DelayProfile DelayProfile::uniform(int max_delay) {
    if (max_delay < 0) throw ValidationError("max_delay must be >= 0");
    return {max_delay, std::vector<double>(static_cast<std::size_t>(max_delay) + 1, 1.0 / (max_delay + 1))};
}

DelayProfile DelayProfile::point_mass(int max_delay, int value) {
    if (value < 0 || value > max_delay) throw ValidationError("point-mass delay outside 0..max_delay");
    std::vector<double> p(static_cast<std::size_t>(max_delay) + 1, 0.0);
    p[static_cast<std::size_t>(value)] = 1.0;
    return {max_delay, std::move(p)};
}

int sample_delay(const DelayProfile& profile, std::uint64_t seed, const Link& link, Step stamp) {
    if (profile.max_delay() == 0) return 0;
    const auto pair = (static_cast<std::uint64_t>(link.from) << 32) | static_cast<std::uint32_t>(link.to);
    CounterRng rng(seed, Stream::Delay, pair, static_cast<std::uint64_t>(stamp));
    const auto& p = profile.probabilities();
    std::discrete_distribution<int> dist(p.begin(), p.end());
    return dist(rng);
}

DelayBuffer::DelayBuffer(NodeId owner, std::vector<NodeId> neighbors, int length)
    : owner_(owner), neighbors_(std::move(neighbors)), length_(length) {
    if (length_ < 1) throw ValidationError("buffer length must be >= 1");
    std::sort(neighbors_.begin(), neighbors_.end());
    cells_.resize(neighbors_.size() * static_cast<std::size_t>(length_));
}

int DelayBuffer::row_of(NodeId src) const {
    auto it = std::lower_bound(neighbors_.begin(), neighbors_.end(), src);
    if (it == neighbors_.end() || *it != src) {
        std::ostringstream msg;
        msg << "node " << src + 1 << " is not an in-neighbour of node " << owner_ + 1;
        throw ValidationError(msg.str());
    }
    return static_cast<int>(it - neighbors_.begin());
}

const DelayBuffer::Cell& DelayBuffer::cell(int row, Step stamp) const {
    const auto slot = static_cast<std::size_t>(((stamp % length_) + length_) % length_);
    return cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(length_) + slot];
}

DelayBuffer::Cell& DelayBuffer::cell(int row, Step stamp) {
    return const_cast<Cell&>(std::as_const(*this).cell(row, stamp));
}

void DelayBuffer::shift_to(Step k) {
    if (k < now_) throw ValidationError("buffer time cannot move backwards");
    const Step first_new = std::max(now_ + 1, k - length_ + 1);
    for (Step s = first_new; s <= k; ++s) {
        for (std::size_t row = 0; row < neighbors_.size(); ++row) {
            Cell& c = cell(static_cast<int>(row), s);
            c.stamp = s;
            c.filled = false;
        }
    }
    now_ = k;
}

void DelayBuffer::deliver(const Packet& packet) {
    if (packet.dst != owner_) throw ValidationError("packet delivered to the wrong buffer");
    const int row = row_of(packet.src);
    if (packet.stamp > now_) throw ValidationError("packet from the future");
    if (packet.stamp < now_ - length_ + 1) {
        std::ostringstream msg;
        msg << "packet (" << packet.src + 1 << "," << packet.stamp << ") arrived at " << packet.arrival
            << " after its buffer cell was discarded";
        throw Error(msg.str());
    }
    Cell& c = cell(row, packet.stamp);
    c.stamp = packet.stamp;
    c.filled = true;
    c.arrival = packet.arrival;
    c.payload = packet.payload;
}

void DelayBuffer::check_window(Step stamp, Step at) const {
    if (stamp > at || at > now_) throw ValidationError("gamma queried for a future stamp or instant");
    if (stamp < now_ - length_ + 1) {
        std::ostringstream msg;
        msg << "stamp " << stamp << " is older than the buffer window at " << now_;
        throw ValidationError(msg.str());
    }
}

bool DelayBuffer::gamma(NodeId src, Step stamp, Step at) const {
    if (src == owner_) return true;
    const int row = row_of(src);
    check_window(stamp, at);
    const Cell& c = cell(row, stamp);
    return c.stamp == stamp && c.filled && c.arrival <= at;
}

const InfoPair* DelayBuffer::payload(NodeId src, Step stamp) const {
    const int row = row_of(src);
    check_window(stamp, now_);
    const Cell& c = cell(row, stamp);
    return c.stamp == stamp && c.filled ? &c.payload : nullptr;
}

int DelayBuffer::occupancy() const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [&](const Cell& c) {
        return c.filled && c.stamp > now_ - length_ && c.stamp <= now_;
    }));
}

Network::Network(const Topology& topology, DelayProfile profile, std::uint64_t seed, int buffer_length)
    : topology_(topology),
      profile_(std::move(profile)),
      seed_(seed),
      buffer_length_(buffer_length > 0 ? buffer_length : profile_.max_delay() + 2) {
    if (buffer_length_ < profile_.max_delay() + 1) {
        throw ValidationError("buffer_length must be at least max_delay + 1");
    }
    for (NodeId i = 0; i < topology_.node_count(); ++i) {
        buffers_.emplace_back(i, topology_.in_neighbors(i), buffer_length_);
    }
    in_flight_.resize(static_cast<std::size_t>(profile_.max_delay()) + 1);
}

int Network::delay(const Link& link, Step stamp) const { return sample_delay(profile_, seed_, link, stamp); }

std::vector<Arrival> Network::advance(Step k, const std::vector<InfoPair>& payloads) {
    if (k <= now_) throw ValidationError("network time must increase");
    if (k != now_ + 1 && profile_.max_delay() > 0) {
        throw ValidationError("network must advance one instant at a time");
    }
    const int n = topology_.node_count();
    if (!payloads.empty()) require_dims(static_cast<int>(payloads.size()) == n, "payloads vs node count");
    for (auto& b : buffers_) b.shift_to(k);

    const auto bins = static_cast<Step>(in_flight_.size());
    for (const auto& link : topology_.links()) {
        Packet p;
        p.src = link.from;
        p.dst = link.to;
        p.stamp = k;
        p.arrival = k + delay(link, k);
        if (!payloads.empty()) p.payload = payloads[static_cast<std::size_t>(link.from)];
        in_flight_[static_cast<std::size_t>(p.arrival % bins)].push_back(std::move(p));
    }

    std::vector<Arrival> arrivals;
    auto& due = in_flight_[static_cast<std::size_t>(k % bins)];
    for (auto& p : due) {
        buffers_[static_cast<std::size_t>(p.dst)].deliver(p);
        arrivals.push_back({p.src, p.dst, p.stamp});
    }
    due.clear();
    now_ = k;
    return arrivals;
}

bool Network::gamma(NodeId i, NodeId j, Step s) const {
    return buffers_[static_cast<std::size_t>(i)].gamma(j, s);
}

double Network::gated_weight(NodeId i, NodeId j, Step s) const {
    if (i == j) return 1.0;
    if (!topology_.has_link(j, i)) throw ValidationError("gated_weight requested for a non-edge pair");
    return gamma(i, j, s) ? topology_.weight(i, j) : 0.0;
}

DynMat Network::gated_weights(Step s) const {
    const int n = topology_.node_count();
    DynMat g = DynMat::Zero(n, n);
    for (const auto& link : topology_.links()) {
        if (gamma(link.to, link.from, s)) g(link.to, link.from) = topology_.weight(link.to, link.from);
    }
    return g;
}

StepRange transmission_window(Step k, int max_delay) {
    if (k < 0) throw ValidationError("transmission_window needs k >= 0");
    if (k <= max_delay + 1) return {0, k};
    return {k - max_delay, k};
}

}  // namespace ftdkf
