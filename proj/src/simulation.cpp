#include "ftdkf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "ftdkf/baseline.hpp"
#include "ftdkf/error.hpp"
#include "ftdkf/network.hpp"
#include "ftdkf/random.hpp"

namespace ftdkf {

namespace {

struct EstimatorTrace {
    int sensors = 0;
    std::vector<double> sensor_sq;   // [k][sensor][component]
    std::vector<double> fused_sq;    // [k][component], empty without fusion
    std::vector<double> min_eig;     // [k]
    std::vector<double> window_min;  // [k]
};

using RunTrace = std::vector<EstimatorTrace>;

class NoiseSource {
public:
    explicit NoiseSource(const Scenario& sc) : sc_(sc) {
        if (sc.system.process_cov.is_constant()) q_sqrt_ = psd_sqrt(sc.system.process_cov.at(0));
        for (const auto& s : sc.sensors) {
            r_sqrt_.push_back(s.meas_cov.is_constant() ? std::optional<Mat>(psd_sqrt(s.meas_cov.at(0))) : std::nullopt);
        }
    }

    Mat process_sqrt(Step k) const { return q_sqrt_ ? *q_sqrt_ : psd_sqrt(sc_.system.process_cov.at(k)); }
    Mat meas_sqrt(std::size_t i, Step k) const {
        return r_sqrt_[i] ? *r_sqrt_[i] : psd_sqrt(sc_.sensors[i].meas_cov.at(k));
    }

private:
    const Scenario& sc_;
    std::optional<Mat> q_sqrt_;
    std::vector<std::optional<Mat>> r_sqrt_;
};

RunTrace simulate_run(const Scenario& sc, const NoiseSource& noise, int run, const StepObserver* observer) {
    const int n = static_cast<int>(sc.sensors.size());
    const int nx = sc.system.state_dim;
    const auto horizon = static_cast<std::size_t>(sc.horizon);
    const bool fused = sc.fusion != FusionMode::None;
    const std::uint64_t run_seed = derive_key(sc.seed, Stream::Run, static_cast<std::uint64_t>(run), 0);

    struct Slot {
        EstimatorKind kind;
        std::optional<DistributedFilter> distributed;
        std::optional<CentralizedFilter> centralized;
    };
    std::vector<Slot> slots;
    for (auto kind : sc.estimators) {
        Slot slot{kind, std::nullopt, std::nullopt};
        if (kind == EstimatorKind::Centralized) {
            slot.centralized.emplace(sc.system);
        } else {
            EngineConfig cfg;
            cfg.max_delay = sc.max_delay();
            cfg.reprocess_depth = kind == EstimatorKind::Ftdkf ? sc.max_delay() : 0;
            cfg.track_joint_cov = fused;
            slot.distributed.emplace(sc.system, sc.sensors, sc.topology, cfg);
        }
        slots.push_back(std::move(slot));
    }

    RunTrace trace(slots.size());
    for (std::size_t e = 0; e < slots.size(); ++e) {
        auto& t = trace[e];
        t.sensors = slots[e].centralized ? 1 : n;
        t.sensor_sq.assign(horizon * static_cast<std::size_t>(t.sensors * nx), 0.0);
        if (fused) t.fused_sq.assign(horizon * static_cast<std::size_t>(nx), 0.0);
        t.min_eig.assign(horizon, 0.0);
        t.window_min.assign(horizon, 0.0);
    }

    Network network(sc.topology, sc.delays, run_seed, sc.buffer_length);
    CounterRng init_rng(run_seed, Stream::InitialState, 0, 0);
    Vec truth = sc.system.init_mean + gaussian(init_rng, psd_sqrt(sc.system.init_cov));

    const GatingProvider gating = [&network](Step s) { return network.gated_weights(s); };
    std::vector<InfoPair> own(static_cast<std::size_t>(n));

    for (Step k = 1; k <= sc.horizon; ++k) {
        CounterRng process_rng(run_seed, Stream::Process, static_cast<std::uint64_t>(k), 0);
        truth = step_truth(sc.system.transition.at(k - 1), noise.process_sqrt(k - 1), truth, process_rng);
        for (int i = 0; i < n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            CounterRng meas_rng(run_seed, Stream::Measurement, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(k));
            const Mat h = sc.sensors[si].obs_matrix.at(k);
            const Vec y = measure(h, noise.meas_sqrt(si, k), truth, meas_rng);
            own[si] = init_message(h, sc.sensors[si].meas_cov.at(k), y);
        }
        network.advance(k, own);

        const auto ki = static_cast<std::size_t>(k - 1);
        for (std::size_t e = 0; e < slots.size(); ++e) {
            auto& slot = slots[e];
            auto& t = trace[e];
            try {
                std::vector<LocalEstimate> single;
                const std::vector<LocalEstimate>* locals = nullptr;
                const DynMat* joint = nullptr;
                std::optional<FusionWeights> weights;
                Vec fused_state;
                if (slot.centralized) {
                    slot.centralized->step(own);
                    single.push_back(slot.centralized->current());
                    locals = &single;
                    if (fused) fused_state = single.front().state;
                    t.window_min[ki] = min_eigenvalue(single.front().info);
                } else {
                    slot.distributed->step(own, gating);
                    locals = &slot.distributed->current();
                    if (fused) {
                        joint = &slot.distributed->joint_cov();
                        weights = fusion_weights(sc.fusion, *joint, nx);
                        fused_state = fuse(*locals, *weights);
                    }
                    t.window_min[ki] = slot.distributed->window_min_info_eig();
                }

                double min_eig = std::numeric_limits<double>::infinity();
                for (int i = 0; i < t.sensors; ++i) {
                    const auto& est = (*locals)[static_cast<std::size_t>(i)];
                    const Vec err = est.state - truth;
                    for (int c = 0; c < nx; ++c) {
                        t.sensor_sq[(ki * static_cast<std::size_t>(t.sensors) + static_cast<std::size_t>(i)) *
                                        static_cast<std::size_t>(nx) +
                                    static_cast<std::size_t>(c)] = err(c) * err(c);
                    }
                    min_eig = std::min(min_eig, min_eigenvalue(est.info));
                }
                t.min_eig[ki] = min_eig;
                if (fused) {
                    const Vec err = fused_state - truth;
                    for (int c = 0; c < nx; ++c) {
                        t.fused_sq[ki * static_cast<std::size_t>(nx) + static_cast<std::size_t>(c)] = err(c) * err(c);
                    }
                }
                if (observer && *observer) {
                    StepSnapshot snap;
                    snap.run = run;
                    snap.k = k;
                    snap.estimator = slot.kind;
                    snap.truth = &truth;
                    snap.locals = locals;
                    snap.filter = slot.distributed ? &*slot.distributed : nullptr;
                    snap.joint_cov = joint;
                    snap.weights = weights ? &*weights : nullptr;
                    (*observer)(snap);
                }
            } catch (const NumericalError& err) {
                std::ostringstream msg;
                msg << to_string(slot.kind) << " run " << run << " instant " << k << ": " << err.what();
                throw NumericalError(msg.str());
            }
        }
    }
    return trace;
}

struct Accumulator {
    std::vector<double> sensor_sq;
    std::vector<double> fused_sq;
    std::vector<double> min_eig;
    std::vector<double> window_min;
    int sensors = 0;

    void add(const EstimatorTrace& t) {
        if (sensor_sq.empty()) {
            sensors = t.sensors;
            sensor_sq.assign(t.sensor_sq.size(), 0.0);
            fused_sq.assign(t.fused_sq.size(), 0.0);
            min_eig.assign(t.min_eig.size(), std::numeric_limits<double>::infinity());
            window_min.assign(t.window_min.size(), std::numeric_limits<double>::infinity());
        }
        for (std::size_t i = 0; i < t.sensor_sq.size(); ++i) sensor_sq[i] += t.sensor_sq[i];
        for (std::size_t i = 0; i < t.fused_sq.size(); ++i) fused_sq[i] += t.fused_sq[i];
        for (std::size_t i = 0; i < t.min_eig.size(); ++i) min_eig[i] = std::min(min_eig[i], t.min_eig[i]);
        for (std::size_t i = 0; i < t.window_min.size(); ++i) {
            window_min[i] = std::min(window_min[i], t.window_min[i]);
        }
    }
};

const MetricsRecord* find_first(const std::vector<MetricsRecord>& records, const std::string& estimator) {
    for (const auto& r : records) {
        if (r.estimator == estimator) return &r;
    }
    return nullptr;
}

std::vector<double> component_series(const std::vector<MetricsRecord>& records, const std::string& estimator,
                                     int component, bool fused) {
    std::vector<double> out;
    for (const auto& r : records) {
        if (r.estimator != estimator) continue;
        const Vec& v = fused ? r.fused_mse : r.mse;
        if (component < 0 || component >= v.size()) throw ValidationError("component out of range");
        out.push_back(v(component));
    }
    if (out.empty()) throw ValidationError("no records for estimator " + estimator);
    return out;
}

double mean_of(const std::vector<double>& v, std::size_t first, std::size_t last) {
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += v[i];
    return sum / static_cast<double>(std::max<std::size_t>(1, last - first));
}

}  // namespace

std::vector<MetricsRecord> run_monte_carlo(const Scenario& sc, const RunOptions& options) {
    if (sc.horizon < 1 || sc.runs < 1) throw ValidationError("horizon and runs must be >= 1");
    const NoiseSource noise(sc);
    const StepObserver* observer = options.observer ? &options.observer : nullptr;
    int workers = options.workers > 0 ? options.workers : sc.workers;
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (observer) workers = 1;
    workers = std::min(workers, sc.runs);

    std::vector<Accumulator> acc(sc.estimators.size());
    // Runs are simulated in batches and folded in run order, so the sums do
    // not depend on which worker finished first.
    const int batch = std::max(1, 4 * workers);
    for (int first = 0; first < sc.runs; first += batch) {
        const int count = std::min(batch, sc.runs - first);
        std::vector<RunTrace> traces(static_cast<std::size_t>(count));
        if (workers == 1) {
            for (int r = 0; r < count; ++r) traces[static_cast<std::size_t>(r)] = simulate_run(sc, noise, first + r, observer);
        } else {
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (int r = w; r < count; r += workers) {
                            traces[static_cast<std::size_t>(r)] = simulate_run(sc, noise, first + r, nullptr);
                        }
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        for (const auto& trace : traces) {
            for (std::size_t e = 0; e < acc.size(); ++e) acc[e].add(trace[e]);
        }
    }

    const int nx = sc.system.state_dim;
    const double runs = sc.runs;
    std::vector<MetricsRecord> records;
    records.reserve(sc.estimators.size() * static_cast<std::size_t>(sc.horizon));
    for (std::size_t e = 0; e < acc.size(); ++e) {
        const auto& a = acc[e];
        for (int k = 1; k <= sc.horizon; ++k) {
            const auto ki = static_cast<std::size_t>(k - 1);
            MetricsRecord rec;
            rec.estimator = to_string(sc.estimators[e]);
            rec.run_group = sc.name;
            rec.k = k;
            rec.mse = Vec::Zero(nx);
            for (int i = 0; i < a.sensors; ++i) {
                Vec m(nx);
                for (int c = 0; c < nx; ++c) {
                    m(c) = a.sensor_sq[(ki * static_cast<std::size_t>(a.sensors) + static_cast<std::size_t>(i)) *
                                           static_cast<std::size_t>(nx) +
                                       static_cast<std::size_t>(c)] /
                           runs;
                }
                rec.mse += m;
                rec.sensor_mse.push_back(m);
            }
            rec.mse /= static_cast<double>(a.sensors);
            if (!a.fused_sq.empty()) {
                rec.fused_mse.resize(nx);
                for (int c = 0; c < nx; ++c) {
                    rec.fused_mse(c) = a.fused_sq[ki * static_cast<std::size_t>(nx) + static_cast<std::size_t>(c)] / runs;
                }
            }
            rec.min_eig_info = a.min_eig[ki];
            rec.window_min_info = a.window_min[ki];
            records.push_back(std::move(rec));
        }
    }
    return records;
}

double steady_state(const std::vector<MetricsRecord>& records, const std::string& estimator, int component,
                    bool fused, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0, 1]");
    if (!find_first(records, estimator)) throw ValidationError("no records for estimator " + estimator);
    const auto series = component_series(records, estimator, component, fused);
    const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(series.size()))));
    return mean_of(series, series.size() - tail, series.size());
}

bool is_bounded(const std::vector<MetricsRecord>& records, const std::string& estimator, int component,
                double ratio) {
    const auto series = component_series(records, estimator, component, false);
    for (double v : series) {
        if (!std::isfinite(v)) return false;
    }
    const std::size_t n = series.size();
    if (n < 5) return true;
    const double middle = mean_of(series, n * 2 / 5, n * 3 / 5);
    const double tail = mean_of(series, n - n / 5, n);
    return tail <= ratio * middle;
}

}  // namespace ftdkf
