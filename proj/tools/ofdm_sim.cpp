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

// Monte Carlo front end: hcrb | estimate | ber | complexity

#include "ofdm/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace
{
    std::string mode_name(ofdm::Mode m)
    {
        switch (m)
        {
        case ofdm::Mode::Hcrb: return "hcrb";
        case ofdm::Mode::Estimate: return "estimate";
        case ofdm::Mode::Ber: return "ber";
        default: return "complexity";
        }
    }

    std::string join(const std::vector<double> &v)
    {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i)
            s += (i ? ";" : "") + ofdm::format_double(v[i]);
        return s;
    }

    std::vector<std::string> header_comments(const ofdm::ExperimentSpec &spec)
    {
        const auto &c = spec.config;
        std::ostringstream os;
        os << "ofdm-sim csv v1 mode=" << mode_name(spec.mode) << " seed=" << c.rng_seed << " trials=" << spec.trials
           << " N=" << c.n_subcarriers << " L=" << c.n_taps << " cp=" << c.cp_len << " M=" << c.n_data_symbols
           << " mod=" << c.data_mod << " cfo=(" << ofdm::format_double(c.cfo_lo) << ","
           << ofdm::format_double(c.cfo_hi) << ") pdp_db=" << join(c.pdp_db)
           << " zeta_rel=" << ofdm::format_double(c.est.zeta_rel)
           << " cfo_step=" << (c.est.cfo_phase_profile ? "profiled" : "plain")
           << " reject_increase=" << int(c.est.reject_increase)
           << " prior=" << (spec.prior == ofdm::PhnPrior::Anchored ? "anchored" : "printed");
        std::vector<std::string> out{os.str()};
        if (spec.mode == ofdm::Mode::Estimate)
            out.push_back("mse_channel = sum_l |h_hat_l - h_l|^2; mse_cfo = (eps_hat - eps)^2; "
                          "mse_phn = mean over n=1..N-1 of (theta_hat_n - theta_n)^2; hcrb_* = mean of per-trial bounds at the true channel");
        if (spec.mode == ofdm::Mode::Ber)
            out.push_back("ber_* = mean over packets of the per-packet uncoded bit error rate; stderr across packets");
        return out;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"OFDM joint channel / phase noise / CFO estimation simulator"};
    app.set_config("--config", "", "Declarative key = value config file (INI or TOML)", false);
    app.fallthrough();
    app.require_subcommand(1);

    ofdm::ExperimentSpec spec;
    auto &cfg = spec.config;
    std::string snr_text = "20";
    std::string gain = "standard", prior = "anchored";

    app.add_option("--seed", cfg.rng_seed, "Base RNG seed")->capture_default_str();
    app.add_option("--trials", spec.trials, "Monte Carlo trials (packets) per SNR point")->capture_default_str();
    app.add_option("--out", spec.output_path, "Output CSV path (stdout if omitted)");
    app.add_option("--snr", snr_text, "SNR grid in dB, a:step:b or a,b,c")->capture_default_str();
    app.add_option("--phn-var", cfg.phn_var, "Phase-noise innovation variance (rad^2)")->capture_default_str();
    app.add_option("--mod", cfg.data_mod, "Data QAM order (4, 16, 64, 128, 256)")->capture_default_str();
    app.add_option("--subcarriers", cfg.n_subcarriers, "Number of subcarriers N")->capture_default_str();
    app.add_option("--taps", cfg.n_taps, "Channel taps L")->capture_default_str();
    app.add_option("--cp", cfg.cp_len, "Cyclic prefix length")->capture_default_str();
    app.add_option("--symbols", cfg.n_data_symbols, "Data symbols per packet")->capture_default_str();
    app.add_option("--pdp-db", cfg.pdp_db, "Tap powers in dB (one per tap)")->delimiter(',');
    app.add_option("--cfo-lo", cfg.cfo_lo, "Lower end of the CFO range")->capture_default_str();
    app.add_option("--cfo-hi", cfg.cfo_hi, "Upper end of the CFO range")->capture_default_str();
    app.add_option("--zeta-rel", cfg.est.zeta_rel, "Stopping threshold relative to N * noise_var")->capture_default_str();
    app.add_option("--ecm-max-iters", cfg.est.ecm_max_iters, "Estimator iteration cap")->capture_default_str();
    app.add_option("--det-max-iters", cfg.est.det_max_iters, "Detector iteration cap per symbol")->capture_default_str();
    app.add_option("--grid-step", cfg.est.grid_step, "CFO initialization grid step")->capture_default_str();
    app.add_option("--gain", gain, "EKF gain form")->check(CLI::IsMember({"standard", "printed"}))->capture_default_str();
    std::string cfo_step = "profiled";
    app.add_option("--cfo-step", cfo_step, "CFO Newton step: profiled over the common phase, or plain")
        ->check(CLI::IsMember({"profiled", "plain"}))
        ->capture_default_str();
    bool keep_increase = false;
    app.add_flag("--keep-increase", keep_increase, "Accept iterations that raise the residual cost");
    app.add_flag("--reinit-covariance", cfg.est.reinit_covariance, "Restart the detector EKF variance every symbol");
    app.add_option("--prior", prior, "Phase-noise prior of the bound")->check(CLI::IsMember({"anchored", "printed"}))->capture_default_str();
    app.add_option("--threads", spec.threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto *hcrb = app.add_subcommand("hcrb", "Hybrid Cramer-Rao bounds versus SNR");
    auto *est = app.add_subcommand("estimate", "ECM estimator MSE versus SNR with bounds");
    app.add_subcommand("ber", "Uncoded BER of proposed, no-tracking and genie receivers");
    auto *cx = app.add_subcommand("complexity", "Analytic operation counts");

    std::string per_trial;
    est->add_option("--per-trial", per_trial, "Also write per-trial records to this CSV");

    ofdm::ComplexityGrid grid;
    cx->add_option("--n", grid.n, "Subcarriers")->capture_default_str();
    cx->add_option("--l", grid.l, "Channel taps")->capture_default_str();
    cx->add_option("--t-ecm", grid.t_ecm, "Estimator iterations")->capture_default_str();
    cx->add_option("--t-init", grid.t_init, "CFO grid points")->capture_default_str();
    cx->add_option("--t-det", grid.t_det, "Detector iterations")->capture_default_str();
    cx->add_option("--t8", grid.t8, "Baseline CFO search points")->capture_default_str();
    cx->add_option("--t20", grid.t20, "Baseline detector iterations")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        cfg.est.cfo_phase_profile = cfo_step == "profiled";
        cfg.est.reject_increase = !keep_increase;
        cfg.est.gain = gain == "printed" ? ofdm::GainVariant::Printed : ofdm::GainVariant::Standard;
        spec.prior = prior == "printed" ? ofdm::PhnPrior::Printed : ofdm::PhnPrior::Anchored;
        if (*cx)
            spec.mode = ofdm::Mode::Complexity;
        else
        {
            spec.mode = *hcrb ? ofdm::Mode::Hcrb : *est ? ofdm::Mode::Estimate : ofdm::Mode::Ber;
            spec.snr_grid_db = ofdm::parse_snr_grid(snr_text);
            spec.validate();
        }

        std::ofstream file;
        std::ostream *os = &std::cout;
        if (!spec.output_path.empty())
        {
            file.open(spec.output_path);
            if (!file)
                throw std::runtime_error("cannot open output file " + spec.output_path);
            os = &file;
        }

        switch (spec.mode)
        {
        case ofdm::Mode::Complexity:
            ofdm::write_complexity_csv(*os, ofdm::run_complexity(grid));
            break;
        case ofdm::Mode::Hcrb:
            ofdm::write_csv(*os, ofdm::run_hcrb_sweep(spec), header_comments(spec));
            break;
        case ofdm::Mode::Ber:
            ofdm::write_csv(*os, ofdm::run_ber_sweep(spec), header_comments(spec));
            break;
        case ofdm::Mode::Estimate:
        {
            std::vector<ofdm::EstimateTrial> trials;
            auto rows = ofdm::run_mse_sweep(spec, per_trial.empty() ? nullptr : &trials);
            ofdm::write_csv(*os, rows, header_comments(spec));
            if (!per_trial.empty())
            {
                std::ofstream pt(per_trial);
                if (!pt)
                    throw std::runtime_error("cannot open per-trial file " + per_trial);
                ofdm::write_estimate_trials_csv(pt, trials);
                if (!pt)
                    throw std::runtime_error("write failed: " + per_trial);
            }
            break;
        }
        }
        os->flush();
        if (!*os)
            throw std::runtime_error("write failed");
    }
    catch (const ofdm::ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
