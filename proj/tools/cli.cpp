// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "ocdl/data.hpp"
#include "ocdl/dictionary_io.hpp"
#include "ocdl/eval.hpp"
#include "ocdl/train.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <regex>

namespace ocdl::cli {
namespace {

namespace fs = std::filesystem;

struct Dims {
    Index rows = 0;
    Index cols = 0;
};

// Parses "RxC" (or a single "N" for N x N).
std::string parse_dims(const std::string& text, Dims& out)
{
    static const std::regex re(R"((\d+)(?:[xX](\d+))?)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        return "expected RxC, got '" + text + "'";
    out.rows = std::stol(m[1]);
    out.cols = m[2].matched ? std::stol(m[2]) : out.rows;
    if (out.rows < 1 || out.cols < 1)
        return "dimensions must be positive";
    return {};
}

CLI::Option* add_dims(CLI::App* app, const std::string& name, std::optional<Dims>& target, const std::string& help)
{
    return app
        ->add_option_function<std::string>(
            name,
            [&target](const std::string& v) {
                Dims d;
                if (auto err = parse_dims(v, d); !err.empty())
                    throw CLI::ValidationError(err);
                target = d;
            },
            help)
        ->type_name("RxC");
}

fs::path mask_path(const fs::path& image)
{
    return image.parent_path() / (image.stem().string() + ".mask.pgm");
}

struct Loaded {
    Image signal;
    Mask mask;  // empty when no mask file exists
};

std::vector<Loaded> load_dir(const fs::path& dir, const std::optional<Dims>& crop, bool with_masks)
{
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir.string() + ": not a directory");
    std::vector<Loaded> out;
    for (const fs::path& p : list_images(dir)) {
        Loaded l{load_grayscale(p), {}};
        if (with_masks && fs::exists(mask_path(p)))
            l.mask = load_mask(mask_path(p));
        if (crop) {
            l.signal = crop_center(l.signal, crop->rows, crop->cols);
            if (l.mask.size() != 0)
                l.mask = crop_center(l.mask, crop->rows, crop->cols);
        }
        if (l.mask.size() != 0 && (l.mask.rows() != l.signal.rows() || l.mask.cols() != l.signal.cols()))
            throw std::runtime_error(mask_path(p).string() + ": mask size differs from the image");
        out.push_back(std::move(l));
    }
    if (out.empty())
        throw std::runtime_error(dir.string() + ": no images found");
    return out;
}

// Highpass each image (masked highpass where a mask exists) and cut it into tiles.
std::vector<Sample> training_tiles(const std::vector<Loaded>& images, const std::optional<Dims>& split)
{
    std::vector<Sample> tiles;
    for (const Loaded& l : images) {
        const Image hp = l.mask.size() != 0 ? tikhonov_highpass_masked(l.signal, l.mask) : tikhonov_highpass(l.signal);
        if (!split) {
            tiles.push_back({hp, l.mask});
            continue;
        }
        const TileSpec spec{split->rows, split->cols};
        const auto parts = split_image(hp, spec);
        std::vector<Image> masks;
        if (l.mask.size() != 0)
            masks = split_image(l.mask, spec);
        for (std::size_t i = 0; i < parts.size(); ++i)
            tiles.push_back({parts[i], masks.empty() ? Mask() : masks[i]});
    }
    return tiles;
}

std::vector<Signal> test_signals(const fs::path& dir, const std::optional<Dims>& crop)
{
    std::vector<Signal> out;
    for (const Loaded& l : load_dir(dir, crop, false))
        out.push_back(tikhonov_highpass(l.signal));
    return out;
}

struct TrainArgs {
    std::string algo = "sgd";
    std::string domain = "frequency";
    bool masked = false;
    std::string data;
    std::string test;
    std::string out = "dictionary.ocdl";
    std::string log;
    std::optional<Dims> kernel;
    std::optional<Dims> split;
    std::optional<Dims> crop;
    std::optional<double> eta_fixed;
    TrainConfig cfg;
};

void add_train(CLI::App& app, TrainArgs& a)
{
    CLI::App* sub = app.add_subcommand("train", "Learn a dictionary from a directory of images");
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    // Expanded by expand_config before parsing; registered for --help and validation only.
    sub->add_option("--config", "Read `key = value` options from a file; flags override it")->type_name("FILE");
    sub->add_option("--algo", a.algo, "Learner")->check(CLI::IsMember({"sgd", "surrogate"}))->capture_default_str();
    sub->add_option("--domain", a.domain, "Gradient domain")
        ->check(CLI::IsMember({"spatial", "frequency"}))
        ->capture_default_str();
    sub->add_flag("--masked", a.masked, "Weight the data term by <stem>.mask.pgm files");
    sub->add_option("--data", a.data, "Training image directory")->required();
    sub->add_option("--test", a.test, "Test image directory for --eval-every");
    sub->add_option("--out", a.out, "Dictionary output file")->capture_default_str();
    sub->add_option("--log", a.log, "CSV log output file");
    sub->add_option("--lambda", a.cfg.lambda, "Sparsity weight")->capture_default_str();
    sub->add_option("--filters", a.cfg.num_filters, "Number of filters M")->capture_default_str();
    add_dims(sub, "--kernel", a.kernel, "Filter size (default 12x12)");
    add_dims(sub, "--split", a.split, "Cut images into non-overlapping tiles");
    add_dims(sub, "--crop", a.crop, "Keep the central region of each image");
    sub->add_option("--p", a.cfg.p, "Forgetting exponent (surrogate)")->capture_default_str();
    sub->add_option("--tau0", a.cfg.stop.tau0, "Inner tolerance scale: tau0 / t (surrogate)")->capture_default_str();
    sub->add_option("--eta-a", a.cfg.step.a, "Step size a / (b + t) (sgd)")->capture_default_str();
    sub->add_option("--eta-b", a.cfg.step.b, "Step size a / (b + t) (sgd)")->capture_default_str();
    sub->add_option("--eta-fixed", a.eta_fixed, "Use a fixed step size instead (sgd)");
    sub->add_option("--epochs", a.cfg.epochs, "Passes over the tiles")->capture_default_str();
    sub->add_option("--seed", a.cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--eval-every", a.cfg.eval_every, "Test objective period in steps; 0 disables")
        ->capture_default_str();
}

int cmd_train(TrainArgs& a, std::ostream& out, std::ostream& err)
{
    TrainConfig& cfg = a.cfg;
    cfg.algo = a.algo == "sgd" ? Algorithm::sgd : Algorithm::surrogate;
    cfg.domain = a.domain == "spatial" ? Domain::spatial : Domain::frequency;
    cfg.masked = a.masked;
    if (a.kernel) {
        cfg.kernel_rows = a.kernel->rows;
        cfg.kernel_cols = a.kernel->cols;
    }
    if (a.eta_fixed) {
        cfg.step.kind = StepSchedule::Kind::fixed;
        cfg.step.eta0 = *a.eta_fixed;
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << "train: " << e.what() << '\n';
        return kExitUsage;
    }
    if (cfg.eval_every > 0 && a.test.empty()) {
        err << "train: --eval-every needs --test\n";
        return kExitUsage;
    }

    try {
        const auto tiles = training_tiles(load_dir(a.data, a.crop, cfg.masked), a.split);
        const auto test = a.test.empty() ? std::vector<Signal>{} : test_signals(a.test, a.crop);
        out << "training on " << tiles.size() << " tiles of " << tiles.front().signal.rows() << "x"
            << tiles.front().signal.cols() << '\n';
        const TrainResult r = train(tiles, cfg, test);
        for (const auto& w : r.warnings)
            err << "warning: " << w << '\n';
        save_dictionary(a.out, r.dictionary);
        if (!a.log.empty()) {
            std::ofstream log(a.log);
            if (!log)
                throw std::runtime_error(a.log + ": cannot open for writing");
            write_log_csv(log, r.log);
        }
        out << "wrote " << a.out << " (" << r.log.size() << " steps, final sample objective "
            << r.log.back().sample_obj << ")\n";
    } catch (const std::exception& e) {
        err << "train: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

struct EvalArgs {
    std::string dict;
    std::string data;
    double lambda = 0.1;
    std::optional<Dims> crop;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err)
{
    try {
        const Dictionary d = load_dictionary(a.dict);
        const auto tests = test_signals(a.data, a.crop);
        int missed = 0;
        const double f = test_objective(d, tests, evaluation_settings(a.lambda), &missed);
        if (missed > 0)
            err << "warning: sparse coding did not converge on " << missed << " of " << tests.size() << " images\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", f);
        out << "test_objective " << buf << '\n';
    } catch (const std::exception& e) {
        err << "eval: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

struct CorruptArgs {
    std::string data;
    std::string out;
    double fraction = 0.3;
    std::uint64_t seed = 0;
};

int cmd_corrupt(const CorruptArgs& a, std::ostream& out, std::ostream& err)
{
    try {
        fs::create_directories(a.out);
        std::mt19937_64 rng(a.seed);
        int n = 0;
        for (const fs::path& p : list_images(a.data)) {
            const Corrupted c = salt_pepper_corrupt(load_grayscale(p), a.fraction, rng);
            const fs::path target = fs::path(a.out) / (p.stem().string() + ".pgm");
            save_grayscale(target, c.signal);
            save_mask(mask_path(target), c.mask);
            ++n;
        }
        out << "corrupted " << n << " images into " << a.out << '\n';
    } catch (const std::exception& e) {
        err << "corrupt: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

struct ExportArgs {
    std::string dict;
    std::string out;
};

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err)
{
    try {
        const Dictionary d = load_dictionary(a.dict);
        save_grayscale(a.out, dictionary_grid(d));
        out << "wrote " << d.num_filters << " filters of " << d.kernel_rows << "x" << d.kernel_cols << " to " << a.out
            << '\n';
    } catch (const std::exception& e) {
        err << "export: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

// Splices the lines of `train --config FILE` in as flags right after the
// subcommand, so that flags given on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    const auto sub = std::find(args.begin(), args.end(), "train");
    if (sub == args.end())
        return args;
    for (auto it = sub + 1; it != args.end(); ++it) {
        std::string path;
        auto last = it + 1;
        if (*it == "--config" && it + 1 != args.end()) {
            path = *(it + 1);
            last = it + 2;
        } else if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
        } else {
            continue;
        }
        std::ifstream in(path);
        if (!in)
            throw CLI::ValidationError("--config", path + ": cannot open");
        std::vector<std::string> injected;
        std::string line;
        while (std::getline(in, line)) {
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            line = trim(line.substr(0, line.find('#')));
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--config", "expected key = value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "config")
                throw CLI::ValidationError("--config", "config files cannot include other config files");
            if (key == "masked") {
                if (value == "true" || value == "1")
                    injected.push_back("--masked");
                else if (value != "false" && value != "0")
                    throw CLI::ValidationError("--config", "masked must be true or false");
                continue;
            }
            injected.push_back("--" + key);
            injected.push_back(value);
        }
        args.erase(it, last);
        args.insert(std::find(args.begin(), args.end(), "train") + 1, injected.begin(), injected.end());
        return expand_config(std::move(args));
    }
    return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app("Online convolutional dictionary learning", "ocdl");
    app.require_subcommand(1);

    TrainArgs train_args;
    add_train(app, train_args);

    EvalArgs eval_args;
    CLI::App* ev = app.add_subcommand("eval", "Sum of CBPDN objectives of a dictionary over a directory");
    ev->add_option("--dict", eval_args.dict, "Dictionary file")->required();
    ev->add_option("--data", eval_args.data, "Test image directory")->required();
    ev->add_option("--lambda", eval_args.lambda, "Sparsity weight")->capture_default_str();
    add_dims(ev, "--crop", eval_args.crop, "Keep the central region of each image");

    CorruptArgs corrupt_args;
    CLI::App* co = app.add_subcommand("corrupt", "Salt-and-pepper corrupt images, writing <stem>.mask.pgm files");
    co->add_option("--data", corrupt_args.data, "Input image directory")->required();
    co->add_option("--out", corrupt_args.out, "Output directory")->required();
    co->add_option("--fraction", corrupt_args.fraction, "Fraction of corrupted pixels")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    co->add_option("--seed", corrupt_args.seed, "Random seed")->capture_default_str();

    ExportArgs export_args;
    CLI::App* ex = app.add_subcommand("export", "Render a dictionary as a filter grid image (.png or .pgm)");
    ex->add_option("--dict", export_args.dict, "Dictionary file")->required();
    ex->add_option("--out", export_args.out, "Output image")->required();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (app.got_subcommand("train"))
        return cmd_train(train_args, out, err);
    if (app.got_subcommand(ev))
        return cmd_eval(eval_args, out, err);
    if (app.got_subcommand(co))
        return cmd_corrupt(corrupt_args, out, err);
    return cmd_export(export_args, out, err);
}

}  // namespace ocdl::cli
