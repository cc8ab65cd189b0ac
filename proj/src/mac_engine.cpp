#include "prpsim/mac_engine.hpp"

#include <algorithm>

namespace prpsim
{
    namespace
    {
        // Covers the longest pending DCF countdown by a wide margin.
        constexpr SimTime kLogHorizon = 200'000'000;
    } // namespace

    void Medium::add(const AirInterval &iv, SimTime now)
    {
        log_.push_back(iv);
        max_len_ = std::max(max_len_, iv.resv_end - iv.start);
        busy_ += iv.resv_end - iv.start;
        while (!log_.empty() && log_.front().resv_end < now - kLogHorizon)
            log_.pop_front();
    }

    MacEnvironment::MacEnvironment(std::vector<ChannelConfig> channels, AciConfig aci)
        : channels_(std::move(channels)), aci_(std::move(aci)), media_(channels_.size())
    {
        const std::size_t n = channels_.size();
        coupling_.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b)
                    coupling_[a][b] = aci_coupling(aci_, channels_[a].channel_number, channels_[b].channel_number);
    }

    SimTime MacEnvironment::sense(int medium, int owner, bool colocated, SimTime from, SimTime to) const
    {
        SimTime busy = from;
        const auto &own = media_[static_cast<std::size_t>(medium)];
        for (auto it = own.log().rbegin(); it != own.log().rend(); ++it)
        {
            if (it->start + own.max_len() <= from)
                break;
            if (it->start <= to && it->resv_end > from && it->owner != owner)
                busy = std::max(busy, it->resv_end);
        }
        if (!colocated)
            return busy;
        for (int m = 0; m < channel_count(); ++m)
        {
            if (m == medium || !aci_senses_busy(aci_, coupling(medium, m)))
                continue;
            const auto &other = media_[static_cast<std::size_t>(m)];
            for (auto it = other.log().rbegin(); it != other.log().rend(); ++it)
            {
                if (it->start + other.max_len() <= from)
                    break;
                if (it->colocated && it->start <= to && it->data_end > from)
                    busy = std::max(busy, it->data_end);
            }
        }
        return busy;
    }

    double MacEnvironment::ack_corrupt_probability(int medium, int owner, SimTime a0, SimTime a1) const
    {
        double p = 0.0;
        for (int m = 0; m < channel_count(); ++m)
        {
            const double c = m == medium ? 0.0 : coupling(medium, m);
            if (c <= 0.0)
                continue;
            const auto &other = media_[static_cast<std::size_t>(m)];
            for (auto it = other.log().rbegin(); it != other.log().rend(); ++it)
            {
                if (it->start + other.max_len() <= a0)
                    break;
                if (it->colocated && it->owner != owner && it->start < a1 && it->data_end > a0)
                    p = std::max(p, aci_ack_corrupt_probability(aci_, c));
            }
        }
        return p;
    }

    Station::Station(Simulator &sim, MacEnvironment &env, int medium, int id, const std::string &label,
                     bool colocated, std::uint64_t seed)
        : sim_(sim), env_(env), medium_(medium), id_(id), cfg_(env.channel(medium)), colocated_(colocated),
          ack_air_(cfg_.ack_airtime()), backoff_rng_(seed, label + ".backoff"),
          data_loss_(cfg_.loss_model, RngStream(seed, label + ".loss.data")),
          ack_loss_(cfg_.ack_loss_model, RngStream(seed, label + ".loss.ack")), aci_rng_(seed, label + ".aci")
    {
    }

    void Station::submit(const Frame &f)
    {
        queue_.push_back(f);
        const std::size_t head = in_service_ ? 1 : 0;
        if (capacity > 0 && queue_.size() - head > capacity)
        {
            Frame &victim = queue_[head];
            if (victim.rec)
                victim.rec->data_lost = true;
            queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(head));
            ++overflow_drops_;
        }
        if (!in_service_)
        {
            in_service_ = true;
            start_service(false);
        }
    }

    int Station::draw_backoff()
    {
        return static_cast<int>(backoff_rng_.uniform_int(0, cw_));
    }

    void Station::start_service(bool backoff_required)
    {
        attempt_ = 0;
        cw_ = cfg_.cw_min;
        ever_delivered_ = false;
        access(sim_.now(), backoff_required);
    }

    void Station::access(SimTime t_request, bool backoff_required)
    {
        if (blocked_until)
        {
            const SimTime b = blocked_until(t_request);
            if (b > t_request)
            {
                sim_.schedule(b, [this, b] { access(b, true); });
                return;
            }
        }
        const SimTime busy = env_.sense(medium_, id_, colocated_, t_request, t_request);
        const DcfAttempt da = dcf_attempt(cfg_, busy, t_request, cw_, backoff_required, backoff_rng_);
        const SimTime idle_from = std::max(busy, t_request);
        sim_.schedule(da.t_air_start, [this, s = da.t_air_start, idle_from] { try_start(s, idle_from); });
    }

    void Station::try_start(SimTime s, SimTime idle_from)
    {
        if (blocked_until)
        {
            const SimTime b = blocked_until(s);
            if (b > s)
            {
                sim_.schedule(b, [this, b] { access(b, true); });
                return;
            }
        }
        const SimTime busy = env_.sense(medium_, id_, colocated_, idle_from, s);
        if (busy > idle_from)
        {
            // countdown interrupted: defer past the activity with a fresh backoff
            const SimTime next = std::max(busy + cfg_.difs() + draw_backoff() * cfg_.slot, s);
            sim_.schedule(next, [this, next, busy] { try_start(next, busy); });
            return;
        }
        transmit(s);
    }

    void Station::transmit(SimTime s)
    {
        const Frame &f = queue_.front();
        const SimTime e = s + cfg_.data_airtime(f.payload);
        const SimTime resv = f.kind == FrameKind::multicast ? e : e + cfg_.sifs + ack_air_;
        env_.add(medium_, {s, e, resv, id_, colocated_}, sim_.now());
        data_end_ = e;
        if (f.kind == FrameKind::load)
        {
            sim_.schedule(resv, [this] { finish(); });
            return;
        }
        if (attempt_ == 0)
            f.rec->t_air_start = s;
        f.rec->t_air_end = e;
        bool lost = data_loss_.lost();
        if (f.kind == FrameKind::multicast && receiver_absent && receiver_absent(s, e))
            lost = true;
        delivered_now_ = !lost;
        if (delivered_now_ && !ever_delivered_)
        {
            ever_delivered_ = true;
            f.rec->t_eth = on_delivery ? on_delivery(f, e) : e;
        }
        sim_.schedule(resv, [this] { exchange_done(); });
    }

    void Station::exchange_done()
    {
        const Frame &f = queue_.front();
        if (f.kind == FrameKind::unicast)
        {
            bool ack_ok = false;
            if (delivered_now_)
            {
                ack_ok = !ack_loss_.lost();
                const SimTime a0 = data_end_ + cfg_.sifs;
                const double p = env_.ack_corrupt_probability(medium_, id_, a0, a0 + ack_air_);
                if (p > 0.0 && aci_rng_.bernoulli(p))
                    ack_ok = false;
            }
            if (ack_ok)
            {
                f.rec->t_ack = sim_.now();
            }
            else if (attempt_ < cfg_.retry_limit)
            {
                ++attempt_;
                f.rec->retries = attempt_;
                cw_ = contention_window(cfg_, attempt_);
                access(sim_.now(), true);
                return;
            }
        }
        finish();
    }

    void Station::finish()
    {
        const Frame &f = queue_.front();
        if (f.rec)
        {
            f.rec->data_lost = !ever_delivered_;
            f.rec->ack_lost = f.kind == FrameKind::unicast && ever_delivered_ && f.rec->t_ack == kAbsent;
        }
        queue_.pop_front();
        if (queue_.empty())
            in_service_ = false;
        else
            start_service(true);
    }

} // namespace prpsim
