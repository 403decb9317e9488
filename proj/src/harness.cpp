// SPDX-License-Identifier: Apache-2.0
//
// ofdm-phn: joint channel, phase noise and CFO estimation for OFDM receivers
// Copyright (C) 2026 The ofdm-phn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "ofdm/harness.hpp"
#include "ofdm/detector.hpp"
#include "ofdm/ecm.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ofdm
{
    void ExperimentSpec::validate() const
    {
        config.validate();
        if (trials < 1)
            throw ConfigError("trials must be >= 1");
        if (mode != Mode::Complexity && snr_grid_db.empty())
            throw ConfigError("SNR grid is empty");
        for (double s : snr_grid_db)
            if (!std::isfinite(s))
                throw ConfigError("SNR values must be finite");
    }

    std::vector<double> parse_snr_grid(const std::string &text)
    {
        auto num = [&](const std::string &t)
        {
            try
            {
                size_t pos = 0;
                double v = std::stod(t, &pos);
                if (pos != t.size())
                    throw ConfigError("");
                return v;
            }
            catch (...)
            {
                throw ConfigError("cannot parse SNR grid '" + text + "'");
            }
        };

        std::vector<double> grid;
        if (text.find(':') != std::string::npos)
        {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ':');)
                parts.push_back(p);
            if (parts.size() != 3)
                throw ConfigError("SNR range must be a:step:b");
            double a = num(parts[0]), step = num(parts[1]), b = num(parts[2]);
            if (!(step > 0.0) || b < a)
                throw ConfigError("SNR range needs step > 0 and b >= a");
            long count = static_cast<long>(std::floor((b - a) / step + 1e-9));
            for (long k = 0; k <= count; ++k)
                grid.push_back(a + double(k) * step);
        }
        else
        {
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ',');)
                grid.push_back(num(p));
        }
        if (grid.empty())
            throw ConfigError("SNR grid is empty");
        return grid;
    }

    Rng trial_rng(std::uint64_t seed, std::size_t snr_index, std::size_t trial)
    {
        return make_rng(seed, 1 + snr_index, trial);
    }

    PacketTrial simulate_packet(const SimConfig &config, const OfdmSymbol &training, const Constellation &qam, Rng &rng)
    {
        PacketTrial p;
        p.symbols.push_back(training);
        std::uniform_int_distribution<int> bit(0, 1);
        for (int m = 0; m < config.n_data_symbols; ++m)
        {
            std::vector<std::uint8_t> b(static_cast<size_t>(config.n_subcarriers) * qam.bits_per_symbol());
            for (auto &v : b)
                v = static_cast<std::uint8_t>(bit(rng));
            p.symbols.push_back(make_symbol(qam.map(b), config.cp_len));
            p.bits.push_back(std::move(b));
        }
        p.channel = sample_realization(config, rng);
        p.rx = receive_stream(transmit_stream(p.symbols), p.channel, config.n_subcarriers, config.cp_len,
                              config.noise_var, rng);
        return p;
    }

    namespace
    {
        SimConfig at_snr(const ExperimentSpec &spec, double snr_db)
        {
            SimConfig c = spec.config;
            c.noise_var = snr_to_noise_var(snr_db);
            return c;
        }

        std::uint64_t count_bit_errors(const std::vector<std::uint8_t> &a, const std::vector<std::uint8_t> &b)
        {
            std::uint64_t e = 0;
            for (size_t i = 0; i < a.size(); ++i)
                e += a[i] != b[i];
            return e;
        }

        std::uint64_t count_symbol_errors(const CVec &a, const CVec &b)
        {
            std::uint64_t e = 0;
            for (Eigen::Index i = 0; i < a.size(); ++i)
                e += std::abs(a(i) - b(i)) > 1e-9;
            return e;
        }

        bool non_increasing(const std::vector<double> &c, double tol)
        {
            for (size_t i = 1; i < c.size(); ++i)
                if (c[i] > c[i - 1] + tol)
                    return false;
            return true;
        }
    }

    std::vector<EstimateTrial> run_estimate_trials(const ExperimentSpec &spec, std::size_t snr_index)
    {
        spec.validate();
        const double snr = spec.snr_grid_db.at(snr_index);
        SimConfig cfg = at_snr(spec, snr);
        cfg.n_data_symbols = 0;
        const int n = cfg.n_subcarriers, l = cfg.n_taps;
        const DftOperators ops(n, l);
        const OfdmSymbol training = modulate_training(cfg);
        const TrainingModel model(training.freq, ops);
        const Constellation qam(cfg.data_mod);

        return parallel_map<EstimateTrial>(
            static_cast<size_t>(spec.trials), spec.threads, [&](size_t t)
            {
                EstimateTrial res;
                res.snr_db = snr;
                res.trial = static_cast<long>(t);
                Rng rng = trial_rng(cfg.rng_seed, snr_index, t);
                PacketTrial pk = simulate_packet(cfg, training, qam, rng);
                const ChannelRealization &ch = pk.channel;
                RVec theta = ch.phn.segment(cfg.cp_len, n);
                try
                {
                    EcmEstimate est = ecm_estimate(symbol_samples(pk.rx, 0, n, cfg.cp_len), model, cfg);
                    res.mse_channel = (est.h_hat - ch.cir).squaredNorm();
                    res.mse_cfo = (est.eps_hat - ch.cfo) * (est.eps_hat - ch.cfo);
                    res.mse_phn = (est.theta_hat - theta).tail(n - 1).squaredNorm() / double(n - 1);
                    res.iters = est.iters;
                    res.converged = est.converged;
                    res.cost_monotone = non_increasing(est.cost_history, 1e-9 * est.cost_history.front());
                }
                catch (const std::exception &)
                {
                    res.failed = true;
                }
                try
                {
                    HcrbReport rep = hcrb_report(build_him(training.freq, ch.cir, ch.cfo, cfg.phn_var, cfg.noise_var, n, l, spec.prior));
                    res.hcrb_ok = true;
                    res.hcrb_channel = rep.channel_bound;
                    res.hcrb_cfo = rep.cfo_bound;
                    res.hcrb_phn = rep.phn_mean;
                }
                catch (const std::exception &)
                {
                    res.hcrb_ok = false;
                }
                return res; });
    }

    std::vector<BerTrial> run_ber_trials(const ExperimentSpec &spec, std::size_t snr_index)
    {
        spec.validate();
        const double snr = spec.snr_grid_db.at(snr_index);
        const SimConfig cfg = at_snr(spec, snr);
        const int n = cfg.n_subcarriers, l = cfg.n_taps, cp = cfg.cp_len;
        const DftOperators ops(n, l);
        const OfdmSymbol training = modulate_training(cfg);
        const TrainingModel model(training.freq, ops);
        const Constellation qam(cfg.data_mod);

        return parallel_map<BerTrial>(
            static_cast<size_t>(spec.trials), spec.threads, [&](size_t t)
            {
                BerTrial res;
                res.snr_db = snr;
                res.trial = static_cast<long>(t);
                Rng rng = trial_rng(cfg.rng_seed, snr_index, t);
                PacketTrial pk = simulate_packet(cfg, training, qam, rng);
                const ChannelRealization &ch = pk.channel;
                const RVec zero = RVec::Zero(n);

                try
                {
                    EcmEstimate est = ecm_estimate(symbol_samples(pk.rx, 0, n, cp), model, cfg);
                    res.ecm_iters = est.iters;
                    auto det = detect_packet(pk.rx, est, cfg, ops, qam);

                    for (int m = 1; m <= cfg.n_data_symbols; ++m)
                    {
                        const auto &bits = pk.bits[static_cast<size_t>(m - 1)];
                        const CVec &d_true = pk.symbols[static_cast<size_t>(m)].freq;
                        CVec r_m = symbol_samples(pk.rx, m, n, cp);
                        long off = ramp_offset(m, n, cp);

                        const DetectionResult &dr = det[static_cast<size_t>(m - 1)];
                        res.err_proposed += count_bit_errors(qam.demap(dr.d_hat), bits);
                        res.sym_err_proposed += count_symbol_errors(dr.d_hat, d_true);
                        res.det_iters.push_back(dr.iters);
                        res.det_monotone.push_back(non_increasing(dr.cost_history, 1e-9 * dr.cost_history.front()));

                        CVec d_nt = qam.slice(equalize(derotate_cfo(r_m, est.eps_hat, off), est.h_hat, zero, cfg.noise_var, ops));
                        res.err_no_tracking += count_bit_errors(qam.demap(d_nt), bits);
                        res.sym_err_no_tracking += count_symbol_errors(d_nt, d_true);

                        RVec th = ch.phn.segment(off + cp, n);
                        CVec d_g = equalize(derotate_cfo(r_m, ch.cfo, off), ch.cir, th, cfg.noise_var, ops);
                        res.err_genie += count_bit_errors(qam.demap(d_g), bits);

                        res.bits += bits.size();
                        res.symbols += static_cast<std::uint64_t>(n);
                    }
                }
                catch (const std::exception &)
                {
                    res = BerTrial{};
                    res.snr_db = snr;
                    res.trial = static_cast<long>(t);
                    res.failed = true;
                }
                return res; });
    }

    Moments moments(const std::vector<double> &x)
    {
        Moments m;
        m.n = static_cast<long>(x.size());
        if (x.empty())
            return m;
        m.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
        if (x.size() > 1)
        {
            double ss = 0.0;
            for (double v : x)
                ss += (v - m.mean) * (v - m.mean);
            m.stderr_ = std::sqrt(ss / double(x.size() - 1) / double(x.size()));
        }
        return m;
    }

    double median(std::vector<double> x)
    {
        if (x.empty())
            return std::numeric_limits<double>::quiet_NaN();
        std::sort(x.begin(), x.end());
        size_t h = x.size() / 2;
        return x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
    }

    namespace
    {
        void push(std::vector<ResultRow> &rows, double snr, double phn_var, const std::string &metric, const Moments &m)
        {
            rows.push_back({snr, phn_var, metric, m.mean, m.stderr_, m.n});
        }

        template <typename T, typename F>
        std::vector<double> collect(const std::vector<T> &v, F f, bool (*keep)(const T &))
        {
            std::vector<double> out;
            for (const auto &x : v)
                if (keep(x))
                    out.push_back(f(x));
            return out;
        }
    }

    std::vector<ResultRow> run_mse_sweep(const ExperimentSpec &spec, std::vector<EstimateTrial> *per_trial)
    {
        std::vector<ResultRow> rows;
        const double pv = spec.config.phn_var;
        for (size_t k = 0; k < spec.snr_grid_db.size(); ++k)
        {
            auto tr = run_estimate_trials(spec, k);
            const double snr = spec.snr_grid_db[k];
            auto ok = +[](const EstimateTrial &t) { return !t.failed; };
            auto hk = +[](const EstimateTrial &t) { return t.hcrb_ok; };

            push(rows, snr, pv, "mse_channel", moments(collect(tr, [](auto &t) { return t.mse_channel; }, ok)));
            push(rows, snr, pv, "mse_cfo", moments(collect(tr, [](auto &t) { return t.mse_cfo; }, ok)));
            push(rows, snr, pv, "mse_phn", moments(collect(tr, [](auto &t) { return t.mse_phn; }, ok)));
            auto hc = collect(tr, [](auto &t) { return t.hcrb_channel; }, hk);
            if (!hc.empty())
            {
                push(rows, snr, pv, "hcrb_channel", moments(hc));
                push(rows, snr, pv, "hcrb_cfo", moments(collect(tr, [](auto &t) { return t.hcrb_cfo; }, hk)));
                push(rows, snr, pv, "hcrb_phn", moments(collect(tr, [](auto &t) { return t.hcrb_phn; }, hk)));
            }
            auto it = collect(tr, [](auto &t) { return double(t.iters); }, ok);
            push(rows, snr, pv, "ecm_iters", moments(it));
            rows.push_back({snr, pv, "ecm_iters_median", median(it), 0.0, static_cast<long>(it.size())});
            double fails = 0.0, nonconv = 0.0;
            for (const auto &t : tr)
            {
                fails += t.failed;
                nonconv += !t.failed && !t.converged;
            }
            rows.push_back({snr, pv, "failures", fails, 0.0, static_cast<long>(tr.size())});
            rows.push_back({snr, pv, "nonconverged", nonconv, 0.0, static_cast<long>(tr.size())});
            if (per_trial)
                per_trial->insert(per_trial->end(), tr.begin(), tr.end());
        }
        return rows;
    }

    std::vector<ResultRow> run_ber_sweep(const ExperimentSpec &spec)
    {
        std::vector<ResultRow> rows;
        const double pv = spec.config.phn_var;
        for (size_t k = 0; k < spec.snr_grid_db.size(); ++k)
        {
            auto tr = run_ber_trials(spec, k);
            const double snr = spec.snr_grid_db[k];
            std::vector<double> p, nt, g;
            for (const auto &t : tr)
            {
                if (t.failed || t.bits == 0)
                    continue;
                double b = double(t.bits);
                p.push_back(double(t.err_proposed) / b);
                nt.push_back(double(t.err_no_tracking) / b);
                g.push_back(double(t.err_genie) / b);
            }
            push(rows, snr, pv, "ber_proposed", moments(p));
            push(rows, snr, pv, "ber_no_tracking", moments(nt));
            push(rows, snr, pv, "ber_genie", moments(g));
        }
        return rows;
    }

    std::vector<ResultRow> run_hcrb_sweep(const ExperimentSpec &spec)
    {
        spec.validate();
        std::vector<ResultRow> rows;
        const SimConfig &base = spec.config;
        const int n = base.n_subcarriers, l = base.n_taps;
        const OfdmSymbol training = modulate_training(base);
        for (size_t k = 0; k < spec.snr_grid_db.size(); ++k)
        {
            const double snr = spec.snr_grid_db[k];
            const double nv = snr_to_noise_var(snr);
            auto reps = parallel_map<HcrbReport>(
                static_cast<size_t>(spec.trials), spec.threads, [&](size_t t)
                {
                    Rng rng = trial_rng(base.rng_seed, k, t);
                    CVec h = sample_channel(base, rng);
                    return hcrb_report(build_him(training.freq, h, 0.0, base.phn_var, nv, n, l, spec.prior)); });
            std::vector<double> c, e, p;
            for (const auto &r : reps)
            {
                c.push_back(r.channel_bound);
                e.push_back(r.cfo_bound);
                p.push_back(r.phn_mean);
            }
            push(rows, snr, base.phn_var, "hcrb_channel", moments(c));
            push(rows, snr, base.phn_var, "hcrb_cfo", moments(e));
            push(rows, snr, base.phn_var, "hcrb_phn", moments(p));
        }
        return rows;
    }

    std::vector<ComplexityReport> run_complexity(const ComplexityGrid &g)
    {
        std::vector<ComplexityReport> out;
        for (auto n : g.n)
            for (auto l : g.l)
                for (auto te : g.t_ecm)
                    for (auto ti : g.t_init)
                        for (auto td : g.t_det)
                            for (auto t8 : g.t8)
                                for (auto t20 : g.t20)
                                {
                                    if (l > n)
                                        throw ConfigError("complexity: L must not exceed N");
                                    ComplexityReport c = complexity_proposed(n, l, te, ti, td);
                                    c.t8 = t8;
                                    c.t20 = t20;
                                    out.push_back(c);
                                }
        return out;
    }

    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    }

    void write_csv(std::ostream &os, const std::vector<ResultRow> &rows, const std::vector<std::string> &comments)
    {
        for (const auto &c : comments)
            os << "# " << c << '\n';
        os << "snr_db,phn_var,metric,value,stderr,n_trials\n";
        for (const auto &r : rows)
            os << format_double(r.snr_db) << ',' << format_double(r.phn_var) << ',' << r.metric << ','
               << format_double(r.value) << ',' << format_double(r.stderr_) << ',' << r.n_trials << '\n';
    }

    void write_estimate_trials_csv(std::ostream &os, const std::vector<EstimateTrial> &trials)
    {
        os << "snr_db,trial,mse_channel,mse_cfo,mse_phn,ecm_iters,converged,failed\n";
        for (const auto &t : trials)
            os << format_double(t.snr_db) << ',' << t.trial << ',' << format_double(t.mse_channel) << ','
               << format_double(t.mse_cfo) << ',' << format_double(t.mse_phn) << ',' << t.iters << ','
               << int(t.converged) << ',' << int(t.failed) << '\n';
    }

    void write_complexity_csv(std::ostream &os, const std::vector<ComplexityReport> &rows)
    {
        os << "# ofdm-sim complexity csv v1 (complex multiplications / additions of the analytic model)\n";
        os << "n,l,t_ecm,t_init,t_det,t8,t20,est_mults,est_adds,det_mults,det_adds,proposed_total,"
              "baseline_est_mults,baseline_est_adds,baseline_det_mults,baseline_det_adds,baseline_total,ratio\n";
        for (const auto &c : rows)
        {
            auto e = complexity_proposed_est(c.n, c.l, c.t_ecm, c.t_init);
            auto d = complexity_proposed_det(c.n, c.l, c.t_det);
            auto be = complexity_baseline_est(c.n, c.l, c.t8);
            auto bd = complexity_baseline_det(c.n, c.t20);
            auto b = complexity_baseline(c.n, c.l, c.t8, c.t20);
            os << c.n << ',' << c.l << ',' << c.t_ecm << ',' << c.t_init << ',' << c.t_det << ',' << c.t8 << ','
               << c.t20 << ',' << e.mults << ',' << e.adds << ',' << d.mults << ',' << d.adds << ',' << c.total() << ','
               << be.mults << ',' << be.adds << ',' << bd.mults << ',' << bd.adds << ',' << b.total() << ','
               << format_double(complexity_ratio(b, c)) << '\n';
        }
    }
}
