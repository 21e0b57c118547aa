// Command-line harness: synthetic sequence generation, end-to-end tracking,
// metric evaluation and complexity accounting.
//
// Exit codes: 0 success, 1 usage, 2 I/O failure, 3 validation failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tpat/bench.hpp"
#include "tpat/config.hpp"
#include "tpat/errors.hpp"
#include "tpat/log.hpp"
#include "tpat/metrics.hpp"
#include "tpat/pipeline.hpp"
#include "tpat/synth.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
};

tpat::KvMap load_kv(const CommonOpts& opts) {
    tpat::KvMap kv;
    if (!opts.config_path.empty()) kv = tpat::parse_kv_file(opts.config_path);
    tpat::apply_overrides(kv, opts.overrides);
    return kv;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--set", opts.overrides, "override, key=value (repeatable)");
}

int run_synth(const CommonOpts& opts, const std::string& out_dir) {
    const tpat::SynthConfig cfg = tpat::synth_config_from(load_kv(opts));
    tpat::synth_write(cfg, out_dir);
    tpat::log::info("wrote " + std::to_string(cfg.num_frames) + " frames to " + out_dir);
    return 0;
}

int run_track(const CommonOpts& opts, const std::string& seq_dir, const std::string& out_path) {
    const tpat::RunConfig cfg = tpat::run_config_from(load_kv(opts));
    const tpat::SequenceDir seq = tpat::load_sequence_dir(seq_dir);
    const tpat::ModelParams model = tpat::make_model_params(cfg);
    const std::vector<tpat::BBox> boxes = tpat::track_sequence(seq, cfg, model);
    tpat::write_boxes(boxes, out_path);
    tpat::log::info("tracked " + std::to_string(boxes.size()) + " frames");
    return 0;
}

int run_eval(const std::string& results_path, const std::string& gt_path, bool as_json,
             bool as_csv) {
    const tpat::SequenceResult seq = tpat::make_sequence_result(
        tpat::read_boxes(results_path), tpat::read_boxes(gt_path));
    const tpat::MetricReport report = tpat::evaluate(seq);
    if (as_json) {
        std::fputs(tpat::report_json(report).c_str(), stdout);
    } else if (as_csv) {
        std::fputs(tpat::report_csv(report).c_str(), stdout);
    } else {
        std::printf("success_auc %.10g\n", report.success_auc);
        std::printf("precision_at_20 %.10g\n", report.precision_at_20);
        std::printf("norm_precision_auc %.10g\n", report.norm_precision_auc);
        std::printf("ao %.10g\n", report.ao);
        std::printf("sr_050 %.10g\n", report.sr_050);
        std::printf("sr_075 %.10g\n", report.sr_075);
    }
    return 0;
}

int run_bench(const CommonOpts& opts) {
    const tpat::RunConfig cfg = tpat::run_config_from(load_kv(opts));
    const tpat::CostReport report = tpat::count_costs(cfg);
    std::fputs(tpat::cost_table(report).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal pyramid-attention tracker harness"};
    app.require_subcommand(1);

    CommonOpts synth_opts;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    add_common(synth, synth_opts);
    synth->add_option("--out", synth_out, "output directory")->required();

    CommonOpts track_opts;
    std::string track_seq, track_out;
    CLI::App* track = app.add_subcommand("track", "track a sequence directory");
    add_common(track, track_opts);
    track->add_option("--seq", track_seq, "sequence directory")->required();
    track->add_option("--out", track_out, "results file")->required();

    std::string eval_results, eval_gt;
    bool eval_json = false, eval_csv = false;
    CLI::App* eval = app.add_subcommand("eval", "score results against ground truth");
    eval->add_option("--results", eval_results, "results file")->required();
    eval->add_option("--gt", eval_gt, "ground-truth file")->required();
    eval->add_flag("--json", eval_json, "emit JSON report");
    eval->add_flag("--csv", eval_csv, "emit CSV curve tables");

    CommonOpts bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "parameter and MAC accounting");
    add_common(bench, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return run_synth(synth_opts, synth_out);
        if (track->parsed()) return run_track(track_opts, track_seq, track_out);
        if (eval->parsed()) return run_eval(eval_results, eval_gt, eval_json, eval_csv);
        if (bench->parsed()) return run_bench(bench_opts);
    } catch (const tpat::IoError& e) {
        tpat::log::error(e.what());
        return 2;
    } catch (const tpat::Error& e) {
        tpat::log::error(e.what());
        return 3;
    }
    return 1;
}
