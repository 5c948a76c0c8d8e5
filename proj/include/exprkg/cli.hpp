#pragma once
// Command-line front end: synth, build-kg, embed, represent, experiment.
//
// Settings come from flags and, optionally, an INI file given with --config.
// Every `key = value` of every section is turned into `--key value` for the
// running subcommand when that subcommand has the flag; flags given on the
// command line win. A key no subcommand knows is a configuration error.
//
// Exit codes: 0 success, 1 internal error, 2 input or configuration error.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "exprkg/domain_ingest.hpp"
#include "exprkg/embedder.hpp"
#include "exprkg/errors.hpp"
#include "exprkg/experiment.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/kg_builder.hpp"
#include "exprkg/ntriples.hpp"
#include "exprkg/patient_repr.hpp"
#include "exprkg/pipeline.hpp"
#include "exprkg/synthkit.hpp"
#include "exprkg/text.hpp"
#include "exprkg/walker.hpp"

namespace exprkg::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

struct InputPaths {
    std::vector<std::string> expression;
    std::string obo, gaf, string_links, mapping;
    int min_string_score = kDefaultMinStringScore;
};

struct Options {
    std::string out_dir;
    bool verbose = false;
    InputPaths inputs;
    KgBuildConfig kg;
    std::string encoder = "links";
    WalkConfig walk;
    TrainConfig train;
    std::string walk_entities = "auto";
    unsigned workers = 1;
    SynthConfig synth;
    // represent
    std::string embeddings;
    std::string strategy = "weighted-average";
    // experiment
    std::string target;
    std::vector<std::string> aux;
    std::vector<std::string> variants;
    bool ablation = false;
    std::size_t folds = 5;
    std::uint64_t experiment_seed = 42;
    std::size_t max_depth = 0;
};

class Logger {
public:
    Logger(std::ostream& err, bool verbose) : err_(err), verbose_(verbose), start_(std::chrono::steady_clock::now()) {}
    void info(const std::string& msg) const {
        if (!verbose_) return;
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        err_ << "[" << text::format_fixed(s, 2) << "s] " << msg << '\n';
    }

private:
    std::ostream& err_;
    bool verbose_;
    std::chrono::steady_clock::time_point start_;
};

namespace detail {

inline void require_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw ConfigError(flag + " is required");
    if (!fs::is_regular_file(path)) throw ConfigError("input path does not exist: " + path);
}

inline fs::path prepare_out_dir(const std::string& dir) {
    if (dir.empty()) throw ConfigError("--out-dir is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
    return fs::path(dir);
}

inline std::vector<ExpressionDataset> load_expression(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("at least one --expression file is required");
    std::vector<ExpressionDataset> out;
    std::set<std::string> ids;
    for (const auto& p : paths) {
        require_file(p, "--expression");
        std::ifstream in(p);
        const std::string id = fs::path(p).stem().string();
        if (!ids.insert(id).second) throw ConfigError("two expression files share the dataset id " + id);
        try {
            out.push_back(parse_expression_tsv(in, id));
        } catch (const ParseError& e) {
            throw ParseError(p + ": " + e.what());
        }
    }
    return out;
}

template <class F>
auto parse_file(const std::string& path, F&& parse) {
    std::ifstream in(path);
    try {
        return parse(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Domain sources and mapping; empty when domain knowledge is off.
inline std::pair<DomainSources, IdMapping> load_domain(const InputPaths& p, bool include_domain) {
    DomainSources d;
    IdMapping m;
    if (!include_domain) return {d, m};
    require_file(p.obo, "--obo");
    require_file(p.gaf, "--gaf");
    require_file(p.string_links, "--string");
    require_file(p.mapping, "--mapping");
    d.ontology = parse_file(p.obo, [](std::istream& in) { return parse_obo(in); });
    d.annotations = parse_file(p.gaf, [](std::istream& in) { return parse_gaf(in); });
    d.interactions = parse_file(p.string_links, [&](std::istream& in) { return parse_string_links(in, p.min_string_score); });
    m = parse_file(p.mapping, [](std::istream& in) { return parse_id_mapping(in); });
    return {std::move(d), std::move(m)};
}

inline Encoder parse_encoder(const std::string& s) {
    if (s == "links") return Encoder::Links;
    if (s == "binning") return Encoder::Binning;
    throw ConfigError("unknown encoder " + s + " (links|binning)");
}

inline void add_input_flags(CLI::App* app, Options& o, bool with_expression = true) {
    if (with_expression)
        app->add_option("--expression", o.inputs.expression, "Expression TSV files; dataset id = file stem")
            ->group("Inputs");
    app->add_option("--obo", o.inputs.obo, "Gene Ontology OBO file")->group("Inputs");
    app->add_option("--gaf", o.inputs.gaf, "GO annotation (GAF) file")->group("Inputs");
    app->add_option("--string", o.inputs.string_links, "STRING protein links file")->group("Inputs");
    app->add_option("--mapping", o.inputs.mapping, "gene-to-protein mapping TSV")->group("Inputs");
    app->add_option("--min-string-score", o.inputs.min_string_score, "keep PPI edges with combined score >= this")
        ->check(CLI::Range(0, 1000))
        ->capture_default_str()
        ->group("Inputs");
}

inline void add_kg_flags(CLI::App* app, Options& o, bool with_encoder = true) {
    if (with_encoder)
        app->add_option("--encoder", o.encoder, "expression encoder")
            ->check(CLI::IsMember({"links", "binning"}))
            ->capture_default_str();
    app->add_option("--bin-percentage", o.kg.bin_percentage, "bins per gene as a fraction of its distinct values")
        ->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();
    app->add_flag("--domain-knowledge,!--no-domain-knowledge", o.kg.include_domain,
                  "add GO / PPI knowledge and the gene-protein bridge (default: on)");
    app->add_option("--namespace", o.kg.namespace_prefix, "IRI prefix for generated nodes")->capture_default_str();
}

inline void add_walk_train_flags(CLI::App* app, Options& o) {
    app->add_option("--walk-entities", o.walk_entities, "walk start set")
        ->check(CLI::IsMember({"auto", "genes", "patients", "patients-and-genes"}))
        ->capture_default_str();
    app->add_option("--walks-per-entity", o.walk.walks_per_entity, "walks started from each entity")
        ->capture_default_str();
    app->add_option("--depth", o.walk.max_depth, "maximum hops per walk")->capture_default_str();
    app->add_option("--dimension", o.train.dimension, "embedding dimension")->capture_default_str();
    app->add_option("--window", o.train.window, "context window")->capture_default_str();
    app->add_option("--negatives", o.train.negatives, "negative samples per positive pair")->capture_default_str();
    app->add_option("--epochs", o.train.epochs, "training epochs")->capture_default_str();
    app->add_option("--learning-rate", o.train.learning_rate, "initial learning rate")->capture_default_str();
    app->add_option("--min-count", o.train.min_count, "drop tokens rarer than this")->capture_default_str();
    app->add_option("--seed", o.walk.seed, "seed for walks and training")->capture_default_str();
    app->add_option("--workers", o.workers, "threads for walking and training (1 = deterministic)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

/// INI items as flag arguments for `sub`, skipping flags the user already gave.
inline std::vector<std::string> config_arguments(const std::string& path, const CLI::App& root, const CLI::App* sub,
                                                 const std::vector<std::string>& user_args) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }

    auto has_flag = [](const CLI::App* app, const std::string& name) {
        return app->get_option_no_throw("--" + name) != nullptr;
    };
    auto known_anywhere = [&](const std::string& name) {
        for (const CLI::App* a : root.get_subcommands([](const CLI::App*) { return true; }))
            if (has_flag(a, name)) return true;
        return false;
    };
    auto given = [&](const CLI::Option* opt) {
        for (const auto& a : user_args)
            for (const auto& n : opt->get_lnames())
                if (a == "--" + n || a.rfind("--" + n + "=", 0) == 0) return true;
        for (const auto& a : user_args)
            for (const auto& n : opt->get_fnames())
                if (a == "--" + n || a.rfind("--" + n + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> args;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!known_anywhere(item.name))
            throw ConfigError("config file " + path + ": unknown key '" + item.fullname() + "'");
        if (!sub || !has_flag(sub, item.name)) continue;
        const CLI::Option* opt = sub->get_option("--" + item.name);
        if (given(opt)) continue;
        if (item.inputs.size() == 1) {
            args.push_back("--" + item.name + "=" + item.inputs[0]);
        } else {
            args.push_back("--" + item.name);
            for (const auto& v : item.inputs) args.push_back(v);
        }
    }
    return args;
}

} // namespace detail

inline void cmd_synth(const Options& o, std::ostream& out, const Logger& log) {
    const auto dir = detail::prepare_out_dir(o.out_dir);
    auto suite = generate_suite(o.synth);
    for (std::size_t d = 0; d < suite.datasets.size(); ++d)
        text::write_file_atomic(dir / (suite.datasets[d].id + ".tsv"), suite.expression_tsv[d]);
    text::write_file_atomic(dir / "go.obo", suite.obo);
    text::write_file_atomic(dir / "annotations.gaf", suite.gaf);
    text::write_file_atomic(dir / "string_links.txt", suite.string_links);
    text::write_file_atomic(dir / "gene_protein.tsv", suite.mapping);
    std::string signal = "dataset_id\tgene_id\n";
    for (std::size_t d = 0; d < suite.datasets.size(); ++d)
        for (const auto& g : suite.signal_genes[d]) signal += suite.datasets[d].id + "\t" + g + "\n";
    text::write_file_atomic(dir / "signal_genes.tsv", signal);
    log.info("wrote synthetic suite");
    out << "wrote " << suite.datasets.size() << " datasets and domain files to " << dir.string() << '\n';
}

inline void cmd_build_kg(Options o, std::ostream& out, const Logger& log) {
    o.kg.encoder = detail::parse_encoder(o.encoder);
    const auto dir = detail::prepare_out_dir(o.out_dir);
    auto datasets = detail::load_expression(o.inputs.expression);
    auto [domain, mapping] = detail::load_domain(o.inputs, o.kg.include_domain);
    log.info("inputs loaded");
    auto kg = assemble_kg(datasets, domain, mapping, o.kg);
    log.info("graph assembled: " + std::to_string(kg.graph.size()) + " triples");
    text::write_file_atomic(dir / "kg.nt", ntriples::to_string(kg.graph));
    const std::string report = render_report(kg.report);
    text::write_file_atomic(dir / "build_report.txt", report);
    out << report;
}

inline void cmd_embed(Options o, std::ostream& out, const Logger& log) {
    o.kg.encoder = detail::parse_encoder(o.encoder);
    const auto dir = detail::prepare_out_dir(o.out_dir);
    auto datasets = detail::load_expression(o.inputs.expression);
    auto [domain, mapping] = detail::load_domain(o.inputs, o.kg.include_domain);
    auto kg = assemble_kg(datasets, domain, mapping, o.kg);
    log.info("graph assembled: " + std::to_string(kg.graph.size()) + " triples");
    const Namespace ns{o.kg.namespace_prefix};
    const StartSet set = *parse_start_set(o.walk_entities);
    // auto follows the default representation of `represent` (weighted average: genes).
    auto starts = start_entities(datasets, resolve_start_set(set, Representation::WeightedAverage), ns);
    auto corpus = generate_walks(kg.graph, starts, o.walk, o.workers);
    log.info("walks generated: " + std::to_string(corpus.sentences.size()) + " sentences");
    TrainConfig tc = o.train;
    tc.seed = o.walk.seed;
    tc.workers = o.workers;
    auto model = train(corpus, tc);
    log.info("embedding trained");

    std::ostringstream c, e;
    write_corpus(c, corpus);
    write_word2vec(e, model);
    text::write_file_atomic(dir / "corpus.txt", c.str());
    text::write_file_atomic(dir / "embeddings.txt", e.str());
    out << "sentences: " << corpus.sentences.size() << '\n' << "vocabulary: " << model.vocabulary().size() << '\n';
    for (std::size_t i = 0; i < model.epoch_losses().size(); ++i)
        out << "epoch " << i + 1 << " loss: " << text::format_fixed(model.epoch_losses()[i], 6) << '\n';
}

inline void cmd_represent(const Options& o, std::ostream& out, const Logger& log) {
    const auto dir = detail::prepare_out_dir(o.out_dir);
    detail::require_file(o.embeddings, "--embeddings");
    auto model = detail::parse_file(o.embeddings, [](std::istream& in) { return read_word2vec(in); });
    auto datasets = detail::load_expression(o.inputs.expression);
    const Namespace ns{o.kg.namespace_prefix};
    PatientMatrix m = o.strategy == "direct" ? direct_representation(model, datasets, ns)
                                             : weighted_average_representation(model, datasets, ns);
    log.info("represented " + std::to_string(m.rows.size()) + " patients");
    std::ostringstream s;
    write_patient_tsv(s, m);
    text::write_file_atomic(dir / "patients.tsv", s.str());
    out << "patients: " << m.rows.size() << '\n' << "dimension: " << m.dimension << '\n';
}

inline void cmd_experiment(Options o, std::ostream& out, const Logger& log) {
    o.kg.encoder = detail::parse_encoder(o.encoder);
    const auto dir = detail::prepare_out_dir(o.out_dir);
    std::vector<Variant> variants;
    if (o.variants.empty()) variants.assign(std::begin(kAllVariants), std::end(kAllVariants));
    for (const auto& v : o.variants) {
        auto parsed = parse_variant(v);
        if (!parsed) throw ConfigError("unknown variant " + v);
        variants.push_back(*parsed);
    }
    if (o.target.empty()) throw ConfigError("--target is required");

    ExperimentInputs in;
    in.datasets = detail::load_expression(o.inputs.expression);
    const bool needs_domain = o.kg.include_domain &&
                              std::any_of(variants.begin(), variants.end(), [](Variant v) { return is_kg_variant(v); });
    std::tie(in.domain, in.mapping) = detail::load_domain(o.inputs, needs_domain);
    in.pipeline.kg = o.kg;
    in.pipeline.walk = o.walk;
    in.pipeline.train = o.train;
    in.pipeline.train.seed = o.walk.seed;
    in.pipeline.start_set = *parse_start_set(o.walk_entities);
    in.pipeline.workers = o.workers;

    std::vector<EvaluationReport> reports;
    for (Variant v : variants) {
        std::vector<bool> domain_settings{o.kg.include_domain};
        if (o.ablation && is_kg_variant(v) && o.kg.include_domain) domain_settings.push_back(false);
        for (bool dom : domain_settings) {
            ExperimentConfig c;
            c.target = o.target;
            c.aux = o.aux;
            c.variant = v;
            c.include_domain = dom;
            c.folds = o.folds;
            c.seed = o.experiment_seed;
            if (o.max_depth > 0) c.tree.max_depth = o.max_depth;
            log.info("running " + c.label());
            reports.push_back(run_experiment(c, in));
        }
    }
    std::ostringstream csv, txt;
    write_csv(csv, reports);
    write_text_report(txt, reports);
    text::write_file_atomic(dir / "report.csv", csv.str());
    text::write_file_atomic(dir / "report.txt", txt.str());
    out << txt.str();
}

/// Runs the command line; diagnostics go to `err`, results to `out`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Options o;
    CLI::App app{"Knowledge-graph integration of gene expression datasets", "exprkg"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "INI file; [section] key = value sets --key for the running command");
    app.add_flag("-v,--verbose", o.verbose, "progress messages on stderr");

    auto* synth = app.add_subcommand("synth", "write a synthetic multi-study suite");
    synth->add_option("--out-dir", o.out_dir, "output directory")->required();
    synth->add_option("--seed", o.synth.seed, "generator seed")->capture_default_str();
    synth->add_option("--target-samples", o.synth.target_samples, "samples in the target dataset")->capture_default_str();
    synth->add_option("--aux-samples", o.synth.aux_samples, "samples per auxiliary dataset")->capture_default_str();
    synth->add_option("--aux-datasets", o.synth.aux_datasets, "auxiliary datasets (1 or 2)")->capture_default_str();
    synth->add_option("--case-fraction", o.synth.case_fraction, "fraction of case samples")->capture_default_str();
    synth->add_option("--target-panel", o.synth.target_panel, "genes in the target panel")->capture_default_str();
    synth->add_option("--aux-panel", o.synth.aux_panel, "genes per auxiliary panel")->capture_default_str();
    synth->add_option("--target-aux-overlap", o.synth.target_aux_overlap,
                      "fraction of each auxiliary panel shared with the target")
        ->capture_default_str();
    synth->add_option("--aux-overlap", o.synth.aux_overlap, "fraction of the second auxiliary panel shared with the first")
        ->capture_default_str();
    synth->add_option("--signal-genes", o.synth.signal_genes, "signal genes per dataset")->capture_default_str();
    synth->add_option("--effect-size", o.synth.effect_size, "case mean shift of signal genes (noise sd units)")
        ->capture_default_str();
    synth->add_option("--missing-rate", o.synth.missing_rate, "fraction of NA cells")->capture_default_str();
    synth->add_option("--go-terms", o.synth.go_terms, "ontology size")->capture_default_str();
    synth->add_option("--signal-terms", o.synth.signal_terms, "GO terms shared by all signal proteins")
        ->capture_default_str();
    synth->add_option("--annotation-density", o.synth.annotation_density, "mean random annotations per protein")
        ->capture_default_str();
    synth->add_option("--interaction-density", o.synth.interaction_density, "mean random PPI edges per protein")
        ->capture_default_str();
    synth->add_option("--signal-interactions", o.synth.signal_interactions, "PPI edges between signal proteins, per protein")
        ->capture_default_str();

    auto* build = app.add_subcommand("build-kg", "build the knowledge graph (kg.nt, build_report.txt)");
    build->add_option("--out-dir", o.out_dir, "output directory")->required();
    detail::add_input_flags(build, o);
    detail::add_kg_flags(build, o);

    auto* embed = app.add_subcommand("embed", "walk the graph and train embeddings (corpus.txt, embeddings.txt)");
    embed->add_option("--out-dir", o.out_dir, "output directory")->required();
    detail::add_input_flags(embed, o);
    detail::add_kg_flags(embed, o);
    detail::add_walk_train_flags(embed, o);

    auto* represent = app.add_subcommand("represent", "patient vectors from embeddings (patients.tsv)");
    represent->add_option("--out-dir", o.out_dir, "output directory")->required();
    represent->add_option("--embeddings", o.embeddings, "embedding file written by embed")->required();
    represent->add_option("--expression", o.inputs.expression, "Expression TSV files; dataset id = file stem");
    represent->add_option("--strategy", o.strategy, "patient representation")
        ->check(CLI::IsMember({"direct", "weighted-average"}))
        ->capture_default_str();
    represent->add_option("--namespace", o.kg.namespace_prefix, "IRI prefix used when the graph was built")
        ->capture_default_str();

    auto* experiment = app.add_subcommand("experiment", "cross-validated comparison of variants (report.csv, report.txt)");
    experiment->add_option("--out-dir", o.out_dir, "output directory")->required();
    detail::add_input_flags(experiment, o);
    detail::add_kg_flags(experiment, o);
    experiment->get_option("--encoder")->description("encoder of the graph behind kg-weighted-avg");
    detail::add_walk_train_flags(experiment, o);
    experiment->add_option("--target", o.target, "target dataset id");
    experiment->add_option("--aux", o.aux, "auxiliary dataset ids");
    experiment->add_option("--variants", o.variants,
                           "variants to run (default: all of baseline-single baseline-merged-zeros kg-binning "
                           "kg-links kg-weighted-avg)");
    experiment->add_flag("--ablation", o.ablation, "also run every KG variant without domain knowledge")
        ->capture_default_str();
    experiment->add_option("--folds", o.folds, "cross-validation folds")->capture_default_str();
    experiment->add_option("--fold-seed", o.experiment_seed, "seed for fold assignment")->capture_default_str();
    experiment->add_option("--max-depth", o.max_depth, "tree depth limit (0 = unlimited)")->capture_default_str();

    std::vector<std::string> user_args(argv + 1, argv + argc);
    std::vector<std::string> args = user_args;
    try {
        // The config file is resolved before parsing so its values can be spliced in as flags.
        for (std::size_t i = 0; i < user_args.size(); ++i) {
            if (user_args[i] == "--config" && i + 1 < user_args.size()) config_path = user_args[i + 1];
            else if (user_args[i].rfind("--config=", 0) == 0) config_path = user_args[i].substr(9);
        }
        if (!config_path.empty()) {
            CLI::App* sub = nullptr;
            std::size_t sub_pos = args.size();
            for (std::size_t i = 0; i < args.size() && !sub; ++i)
                for (CLI::App* s : {synth, build, embed, represent, experiment})
                    if (args[i] == s->get_name()) {
                        sub = s;
                        sub_pos = i;
                    }
            auto extra = detail::config_arguments(config_path, app, sub, user_args);
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(sub_pos + 1, args.size())), extra.begin(),
                        extra.end());
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    Logger log(err, o.verbose);
    try {
        if (*synth) cmd_synth(o, out, log);
        else if (*build) cmd_build_kg(o, out, log);
        else if (*embed) cmd_embed(o, out, log);
        else if (*represent) cmd_represent(o, out, log);
        else if (*experiment) cmd_experiment(o, out, log);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const LookupError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const UndefinedError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInput;
}

} // namespace exprkg::cli
