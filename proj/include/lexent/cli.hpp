#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexent/corpus.hpp"
#include "lexent/csv.hpp"
#include "lexent/entropy.hpp"
#include "lexent/errors.hpp"
#include "lexent/markov.hpp"
#include "lexent/rng.hpp"
#include "lexent/sem_info.hpp"
#include "lexent/sem_net.hpp"
#include "lexent/word_order.hpp"

namespace lexent::cli {

namespace detail {

inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << content;
}

inline std::uint64_t parse_seed(const std::string& s) {
    if (s == "random") {
        return static_cast<std::uint64_t>(
            std::chrono::steady_clock::now().time_since_epoch().count());
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw input_error("seed must be an unsigned integer or 'random', got '" + s + "'");
    }
}

inline unsigned jobs_from_env() {
    if (const char* env = std::getenv("LEXENT_JOBS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Work items processed in parallel, results kept in input order.
template <typename Item, typename Fn>
void parallel_for(const std::vector<Item>& items, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(items.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= items.size()) return;
                    fn(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
                next.store(items.size());
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct DocInput {
    std::string path;
    std::string language;
    std::string family;
    std::string doc_id;
};

inline std::vector<DocInput> collect_inputs(const std::vector<std::string>& files,
                                            const std::string& manifest_path,
                                            CorpusManifest* manifest_out = nullptr) {
    std::vector<DocInput> docs;
    if (!manifest_path.empty()) {
        CorpusManifest m = load_manifest(manifest_path);
        for (const auto& e : m.entries) docs.push_back({e.path, e.language, e.family, e.doc_id});
        if (manifest_out) *manifest_out = std::move(m);
    }
    for (const auto& f : files) {
        if (!std::filesystem::exists(f)) throw input_error("no such file: " + f);
        docs.push_back({f, "", "", std::filesystem::path(f).stem().string()});
    }
    if (docs.empty()) throw input_error("no input files (pass files or --manifest)");
    return docs;
}

inline std::string report_csv_header() {
    return "doc_id,language,family,N,K,H,Hs_exact,Hs_empirical,Ds,mode,seed\n";
}

inline std::string report_csv_row(const DocInput& doc, const OrderAnalysis& a) {
    std::string row = doc.doc_id + "," + doc.language + "," + doc.family + "," +
                      fmt_u64(a.n_tokens) + "," + fmt_u64(a.vocab_size) + "," +
                      fmt_double(a.h.bits_per_word) + "," + fmt_double(a.hs_exact) + ",";
    if (a.hs_empirical) row += fmt_double(a.hs_empirical->bits_per_word);
    row += "," + fmt_double(a.ds) + "," + std::string(mode_name(a.mode)) + "," +
           fmt_u64(a.seed) + "\n";
    return row;
}

inline nlohmann::json report_json_row(const DocInput& doc, const OrderAnalysis& a) {
    nlohmann::json j{{"doc_id", doc.doc_id},
                     {"language", doc.language},
                     {"family", doc.family},
                     {"N", a.n_tokens},
                     {"K", a.vocab_size},
                     {"H", a.h.bits_per_word},
                     {"Hs_exact", a.hs_exact},
                     {"Ds", a.ds},
                     {"mode", mode_name(a.mode)},
                     {"seed", a.seed}};
    if (a.hs_empirical) j["Hs_empirical"] = a.hs_empirical->bits_per_word;
    else j["Hs_empirical"] = nullptr;
    return j;
}

} // namespace detail

inline int run(std::vector<std::string> args) {
    CLI::App app{"lexent: word-order entropy and word-distribution information analysis"};
    app.require_subcommand(1);

    // shared options
    std::vector<std::string> files;
    std::string manifest_path, out_path, format = "csv", seed_str = "default";
    unsigned jobs = detail::jobs_from_env();

    // ---- tokenize ----
    auto* cmd_tok = app.add_subcommand("tokenize", "Token and vocabulary statistics per document");
    std::string tok_words_out;
    cmd_tok->add_option("files", files, "input text files");
    cmd_tok->add_option("--manifest", manifest_path, "corpus manifest CSV");
    cmd_tok->add_option("-o,--out", out_path, "output path (default stdout)");
    cmd_tok->add_option("--words", tok_words_out, "also write word,count table (single input only)");
    cmd_tok->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ---- entropy ----
    auto* cmd_ent = app.add_subcommand("entropy", "Per-document H, H_s and D_s");
    std::string mode_str = "shuffle";
    bool skip_empirical = false, empirical_ds = false;
    std::uint64_t min_tokens = kMinTokensGate;
    cmd_ent->add_option("files", files, "input text files");
    cmd_ent->add_option("--manifest", manifest_path, "corpus manifest CSV");
    cmd_ent->add_option("--mode", mode_str, "randomization mode: shuffle or frequency")
        ->check(CLI::IsMember({"shuffle", "frequency"}));
    cmd_ent->add_option("--seed", seed_str, "seed (integer or 'random'; default fixed)");
    cmd_ent->add_flag("--skip-empirical", skip_empirical,
                      "do not run the estimator on the randomized text");
    cmd_ent->add_flag("--empirical-ds", empirical_ds,
                      "compute D_s from the empirical shuffled estimate instead of Eq-exact H_s");
    cmd_ent->add_option("--min-tokens", min_tokens, "short-text warning threshold");
    cmd_ent->add_option("--jobs", jobs, "parallel documents (env LEXENT_JOBS)");
    cmd_ent->add_option("-o,--out", out_path, "output path (default stdout)");
    cmd_ent->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ---- corpus ----
    auto* cmd_cor = app.add_subcommand("corpus", "Corpus report, family summary and histograms");
    std::string summary_out, hist_out;
    cmd_cor->add_option("--manifest", manifest_path, "corpus manifest CSV")->required();
    cmd_cor->add_option("--mode", mode_str, "randomization mode: shuffle or frequency")
        ->check(CLI::IsMember({"shuffle", "frequency"}));
    cmd_cor->add_option("--seed", seed_str, "seed (integer or 'random'; default fixed)");
    cmd_cor->add_flag("--skip-empirical", skip_empirical,
                      "do not run the estimator on the randomized text");
    cmd_cor->add_option("--min-tokens", min_tokens, "short-text warning threshold");
    cmd_cor->add_option("--jobs", jobs, "parallel documents (env LEXENT_JOBS)");
    cmd_cor->add_option("-o,--out", out_path, "per-document report path (default stdout)");
    cmd_cor->add_option("--summary", summary_out, "family summary CSV path");
    cmd_cor->add_option("--hist", hist_out, "pooled histogram CSV path");
    cmd_cor->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ---- info-scan ----
    auto* cmd_scan = app.add_subcommand("info-scan", "Delta I(s) curve over a scale grid");
    std::string scan_file;
    std::vector<std::uint64_t> explicit_scales;
    int per_decade = kGridPointsPerDecade;
    std::uint64_t smin = kGridMinScale;
    bool grid_default = false;
    cmd_scan->add_option("file", scan_file, "input text file")->required();
    cmd_scan->add_flag("--grid-default", grid_default, "use the default geometric grid");
    cmd_scan->add_option("--scales", explicit_scales, "explicit ascending scale list");
    cmd_scan->add_option("--per-decade", per_decade, "grid points per decade");
    cmd_scan->add_option("--smin", smin, "smallest scale of the default grid");
    cmd_scan->add_option("-o,--out", out_path, "curve output path (default stdout)");
    cmd_scan->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ---- keywords ----
    auto* cmd_kw = app.add_subcommand("keywords", "Rank words by their information delta_i");
    std::string kw_file;
    std::uint64_t kw_scale = 0;
    bool at_optimal = false;
    std::size_t top_n = 50;
    cmd_kw->add_option("file", kw_file, "input text file")->required();
    cmd_kw->add_option("--scale", kw_scale, "partition scale s in words");
    cmd_kw->add_flag("--at-optimal", at_optimal, "use s* from a default-grid scan (default)");
    cmd_kw->add_option("--top", top_n, "how many words to emit (0 = all)");
    cmd_kw->add_option("-o,--out", out_path, "output path (default stdout)");
    cmd_kw->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // ---- network ----
    auto* cmd_net = app.add_subcommand("network", "Co-occurrence network of informative words");
    std::string net_file, net_format = "dot";
    std::uint64_t net_scale = 0, net_reps = 200;
    std::uint32_t net_top = 500;
    double net_z = 3.0;
    cmd_net->add_option("file", net_file, "input text file")->required();
    cmd_net->add_option("--scale", net_scale, "partition scale s in words");
    cmd_net->add_flag("--at-optimal", at_optimal, "use s* from a default-grid scan (default)");
    cmd_net->add_option("--top", net_top, "number of most informative words");
    cmd_net->add_option("--z", net_z, "z-score threshold for keeping edges");
    cmd_net->add_option("--reps", net_reps, "Monte Carlo realizations for the null");
    cmd_net->add_option("--seed", seed_str, "seed (integer or 'random'; default fixed)");
    cmd_net->add_option("--format", net_format, "dot, graphml or json")
        ->check(CLI::IsMember({"dot", "graphml", "json"}));
    cmd_net->add_option("-o,--out", out_path, "output path (default stdout)");

    // ---- markov-frontier ----
    auto* cmd_mk = app.add_subcommand("markov-frontier",
                                      "Constancy frontier of symmetric toy chains");
    double d_target = 0.531, mk_tol = kFrontierTolerance;
    std::size_t k_min = 2, k_max = 64;
    cmd_mk->add_option("--d-target", d_target, "relative entropy to hold constant");
    cmd_mk->add_option("--k-min", k_min, "smallest vocabulary size");
    cmd_mk->add_option("--k-max", k_max, "largest vocabulary size");
    cmd_mk->add_option("--tol", mk_tol, "bisection tolerance in D");
    cmd_mk->add_option("-o,--out", out_path, "output path (default stdout)");
    cmd_mk->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    static const char* prog = "lexent";
    argv.push_back(prog);
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help/version exit 0, any parse problem exits 1
    }

    try {
        const std::uint64_t seed =
            seed_str == "default" ? kDefaultSeed : detail::parse_seed(seed_str);
        const RandomizationMode mode = mode_str == "frequency"
                                           ? RandomizationMode::frequency_sample
                                           : RandomizationMode::shuffle;

        if (*cmd_tok) {
            auto docs = detail::collect_inputs(files, manifest_path);
            if (!tok_words_out.empty() && docs.size() != 1)
                throw input_error("--words needs exactly one input document");
            std::string csv = "doc_id,N,K,short_text\n";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& d : docs) {
                const TokenizedText t = load_text(d.path, d.doc_id);
                const bool short_text = t.size() < kMinTokensGate;
                if (short_text)
                    std::cerr << "warning: " << d.doc_id << " has only " << t.size()
                              << " tokens (gate " << kMinTokensGate << ")\n";
                csv += d.doc_id + "," + fmt_u64(t.size()) + "," + fmt_u64(t.vocab_size()) + "," +
                       (short_text ? "1" : "0") + "\n";
                rows.push_back({{"doc_id", d.doc_id},
                                {"N", t.size()},
                                {"K", t.vocab_size()},
                                {"short_text", short_text}});
                if (!tok_words_out.empty()) {
                    std::string wcsv = "word_id,word,count\n";
                    for (std::uint32_t w = 0; w < t.vocab_size(); ++w)
                        wcsv += fmt_u64(w) + "," + t.word(w) + "," + fmt_u64(t.counts[w]) + "\n";
                    detail::write_output(tok_words_out, wcsv);
                }
            }
            detail::write_output(out_path, format == "json" ? rows.dump(2) + "\n" : csv);
            return 0;
        }

        if (*cmd_ent || *cmd_cor) {
            CorpusManifest manifest;
            auto docs = detail::collect_inputs(files, manifest_path, &manifest);
            std::vector<OrderAnalysis> analyses(docs.size());
            AnalyzeOptions opt;
            opt.mode = mode;
            opt.seed = seed;
            opt.estimate_empirical = !skip_empirical;
            opt.ds_from_empirical = empirical_ds;
            opt.min_tokens = min_tokens;
            detail::parallel_for(docs, jobs, [&](std::size_t i) {
                TokenizedText t = load_text(docs[i].path, docs[i].doc_id);
                analyses[i] = analyze_order(t, opt);
            });
            std::string csv = detail::report_csv_header();
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < docs.size(); ++i) {
                if (analyses[i].short_text)
                    std::cerr << "warning: " << docs[i].doc_id << " is below the "
                              << min_tokens << "-token gate (N=" << analyses[i].n_tokens << ")\n";
                csv += detail::report_csv_row(docs[i], analyses[i]);
                rows.push_back(detail::report_json_row(docs[i], analyses[i]));
            }
            detail::write_output(out_path, format == "json" ? rows.dump(2) + "\n" : csv);

            if (*cmd_cor) {
                const auto families = summarize_corpus(analyses, manifest);
                std::string fcsv =
                    "family,languages,texts,mean_Hs,mean_H,mean_Ds,sd_Hs,sd_H,sd_Ds,"
                    "rv_Hs,rv_H,rv_Ds\n";
                for (const auto& f : families)
                    fcsv += f.family + "," + fmt_u64(f.languages) + "," + fmt_u64(f.texts) + "," +
                            fmt_double(f.mean_hs) + "," + fmt_double(f.mean_h) + "," +
                            fmt_double(f.mean_ds) + "," + fmt_double(f.sd_hs) + "," +
                            fmt_double(f.sd_h) + "," + fmt_double(f.sd_ds) + "," +
                            fmt_double(f.rv_hs) + "," + fmt_double(f.rv_h) + "," +
                            fmt_double(f.rv_ds) + "\n";
                if (!summary_out.empty()) detail::write_output(summary_out, fcsv);
                const auto hist = pooled_histograms(analyses);
                std::string hcsv = "quantity,bin_left,bin_right,count\n";
                for (const auto& b : hist)
                    hcsv += b.quantity + "," + fmt_double(b.lo) + "," + fmt_double(b.hi) + "," +
                            fmt_u64(b.count) + "\n";
                if (!hist_out.empty()) detail::write_output(hist_out, hcsv);
            }
            return 0;
        }

        if (*cmd_scan) {
            const TokenizedText t = load_text(scan_file);
            std::vector<std::uint64_t> grid = explicit_scales;
            if (grid.empty()) grid = default_scale_grid(t.size(), per_decade, smin);
            const InfoCurve curve = scan_scales(t, grid);
            std::string csv = "s,P,delta_i_bits\n";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& p : curve.points) {
                csv += fmt_u64(p.s) + "," + fmt_u64(p.parts) + "," + fmt_double(p.delta_i) + "\n";
                rows.push_back({{"s", p.s}, {"P", p.parts}, {"delta_i_bits", p.delta_i}});
            }
            detail::write_output(out_path, format == "json" ? rows.dump(2) + "\n" : csv);
            std::cerr << "s_star=" << curve.s_star << " delta_i_max="
                      << fmt_double(curve.delta_i_max) << "\n";
            return 0;
        }

        if (*cmd_kw || *cmd_net) {
            const std::string& file = *cmd_kw ? kw_file : net_file;
            std::uint64_t scale = *cmd_kw ? kw_scale : net_scale;
            const TokenizedText t = load_text(file);
            if (scale == 0) {
                const InfoCurve curve = scan_scales(t, default_scale_grid(t.size()));
                scale = curve.s_star;
                std::cerr << "using optimal scale s*=" << scale << "\n";
            }
            if (*cmd_kw) {
                auto ranked = rank_keywords(t, scale);
                if (top_n > 0 && ranked.size() > top_n) ranked.resize(top_n);
                std::string csv = "rank,word,n,H_obs,H_rand,delta_i\n";
                nlohmann::json rows = nlohmann::json::array();
                for (std::size_t i = 0; i < ranked.size(); ++i) {
                    const auto& w = ranked[i];
                    csv += fmt_u64(i + 1) + "," + t.word(w.word) + "," + fmt_u64(w.n) + "," +
                           fmt_double(w.h_obs) + "," + fmt_double(w.h_rand) + "," +
                           fmt_double(w.delta_i) + "\n";
                    rows.push_back({{"rank", i + 1},
                                    {"word", t.word(w.word)},
                                    {"n", w.n},
                                    {"H_obs", w.h_obs},
                                    {"H_rand", w.h_rand},
                                    {"delta_i", w.delta_i}});
                }
                detail::write_output(out_path, format == "json" ? rows.dump(2) + "\n" : csv);
            } else {
                const SemanticGraph g = build_network(t, scale, net_top, net_z, net_reps, seed);
                if (g.top_m_clamped)
                    std::cerr << "warning: top_m clamped to vocabulary size "
                              << g.params.top_m << "\n";
                detail::write_output(out_path, export_graph(g, parse_graph_format(net_format)));
            }
            return 0;
        }

        if (*cmd_mk) {
            std::vector<std::size_t> ks;
            if (k_min < 2 || k_max < k_min) throw input_error("need 2 <= k-min <= k-max");
            for (std::size_t k = k_min; k <= k_max; ++k) ks.push_back(k);
            const auto frontier = constancy_frontier(ks, d_target, mk_tol);
            for (std::size_t k = k_min, i = 0; k <= k_max; ++k) {
                if (i < frontier.size() && frontier[i].n_states == k) { ++i; continue; }
                std::cerr << "warning: no solution at K=" << k << " for D=" << d_target << "\n";
            }
            std::string csv = "K,q,unigram_entropy,entropy_rate,D\n";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& p : frontier) {
                csv += fmt_u64(p.n_states) + "," + fmt_double(p.q) + "," + fmt_double(p.unigram) +
                       "," + fmt_double(p.rate) + "," + fmt_double(p.d) + "\n";
                rows.push_back({{"K", p.n_states},
                                {"q", p.q},
                                {"unigram_entropy", p.unigram},
                                {"entropy_rate", p.rate},
                                {"D", p.d}});
            }
            detail::write_output(out_path, format == "json" ? rows.dump(2) + "\n" : csv);
            return 0;
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const compute_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace lexent::cli
