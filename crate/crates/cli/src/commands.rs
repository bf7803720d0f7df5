//! One function per subcommand. Each writes its tables under the configured
//! output directory and returns a short human-readable summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mcwm::corpus::{
    compare_distributions, corpus_stats, read_corpus, ComparisonReport, ReadOptions,
};
use mcwm::generator::{
    analysis_count, exact_word_distribution, generate_corpus, CorpusCounts, CorpusOptions,
};
use mcwm::length::{
    empirical_length_hist, exact_length_pmf, length_moments, length_pmf_from_distribution,
    n_morpheme_distribution, n_morpheme_moments, LengthPmf, LengthTable,
};
use mcwm::lexicon::{Lexicon, MorphemeClass};
use mcwm::zipf::{fit_zipf_exponent, rank_frequency, render_svg, RankFrequencyTable, ZipfFit};

use crate::config::ExperimentConfig;
use crate::CliError;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn read_file(path: &Path, hint: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e} ({hint})", path.display())))
}

/// Per-class size, length range and mass of the heaviest item.
pub fn lexicon_summary(lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for class in MorphemeClass::ALL {
        match lexicon.inventory(class) {
            Some(inv) => {
                let range = inv.length_range();
                let top = inv.weights().iter().cloned().fold(0.0, f64::max);
                let _ = writeln!(
                    out,
                    "{:<7} {:>5} items  lengths {}..{}  top weight {:.4}",
                    class.name(),
                    inv.len(),
                    range.min,
                    range.max,
                    top
                );
            }
            None => {
                let _ = writeln!(out, "{:<7}     0 items", class.name());
            }
        }
    }
    let _ = writeln!(out, "total   {:>5} morphemes", lexicon.total_morphemes());
    out
}

pub fn cmd_gen_lexicon(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let lexicon = cfg.lexicon()?;
    let path = write_file(&cfg.out, "lexicon.tsv", &lexicon.to_tsv())?;
    Ok(format!(
        "{}wrote {}\n",
        lexicon_summary(&lexicon),
        path.display()
    ))
}

/// Headline numbers of one generation run, shared by `generate` and `sweep`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub generated: u64,
    pub surviving: u64,
    pub types: usize,
    pub mode: Option<usize>,
    pub alpha: Option<f64>,
    /// Closed-form E[L] for the free, unfiltered generator, otherwise the surviving-token mean.
    pub mean_length: f64,
}

impl RunSummary {
    pub fn render(&self) -> String {
        let opt_usize = |v: Option<usize>| v.map_or_else(|| "none".into(), |v| v.to_string());
        let opt_f = |v: Option<f64>| v.map_or_else(|| "none".into(), |v| format!("{v:.6}"));
        format!(
            "tokens_generated={}\ntokens_surviving={}\ntypes={}\nmode={}\nalpha={}\nmean_length={:.6}\n",
            self.generated,
            self.surviving,
            self.types,
            opt_usize(self.mode),
            opt_f(self.alpha),
            self.mean_length
        )
    }
}

/// Everything `generate` computes before touching the file system.
pub struct GenerationRun {
    pub lexicon: Lexicon,
    pub counts: CorpusCounts,
    pub lengths: LengthTable,
    pub ranks: RankFrequencyTable,
    pub fit: Option<ZipfFit>,
    pub summary: RunSummary,
}

pub fn run_generation(cfg: &ExperimentConfig) -> Result<GenerationRun, CliError> {
    cfg.validate()?;
    let lexicon = cfg.lexicon()?;
    let constraint = cfg.constraint(&lexicon)?;
    let acts = cfg.activations()?;
    let filter = cfg.survival_spec()?;
    let counts = generate_corpus(
        &lexicon,
        &acts,
        constraint.as_ref(),
        &filter,
        CorpusOptions {
            n_tokens: cfg.n_tokens,
            seed: cfg.seed,
            threads: cfg.threads,
        },
    )?;
    let sorted = counts.sorted();
    let lengths = empirical_length_hist(sorted.iter().copied());
    let ranks = rank_frequency(sorted.iter().copied(), counts.surviving);
    let fit = cfg
        .window_for(ranks.len())
        .and_then(|(lo, hi)| fit_zipf_exponent(&ranks, lo, hi).ok());
    let mean_length = if constraint.is_free() && filter.is_identity() {
        length_moments(&lexicon, &acts)?.mean
    } else {
        lengths.to_pmf().mean()
    };
    let summary = RunSummary {
        generated: counts.generated,
        surviving: counts.surviving,
        types: counts.types(),
        mode: lengths.mode(),
        alpha: fit.map(|f| f.alpha),
        mean_length,
    };
    Ok(GenerationRun {
        lexicon,
        counts,
        lengths,
        ranks,
        fit,
        summary,
    })
}

fn fit_report(fit: Option<&ZipfFit>) -> String {
    match fit {
        Some(f) => f.to_string(),
        None => "fit=unavailable\n".to_string(),
    }
}

fn write_rank_outputs(
    cfg: &ExperimentConfig,
    ranks: &RankFrequencyTable,
    fit: Option<&ZipfFit>,
    title: &str,
) -> Result<(), CliError> {
    write_file(&cfg.out, "ranks.tsv", &ranks.to_tsv())?;
    write_file(&cfg.out, "loglog.csv", &ranks.to_loglog_csv())?;
    write_file(&cfg.out, "fit.txt", &fit_report(fit))?;
    if cfg.svg {
        write_file(
            &cfg.out,
            "rank_frequency.svg",
            &render_svg(ranks, fit, title),
        )?;
    }
    Ok(())
}

pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let run = run_generation(cfg)?;
    write_file(&cfg.out, "lexicon.tsv", &run.lexicon.to_tsv())?;
    write_file(&cfg.out, "counts.tsv", &run.counts.to_tsv())?;
    write_file(&cfg.out, "lengths.tsv", &run.lengths.to_tsv())?;
    write_rank_outputs(
        cfg,
        &run.ranks,
        run.fit.as_ref(),
        "Generated rank-frequency curve",
    )?;
    let summary = run.summary.render();
    write_file(&cfg.out, "summary.txt", &summary)?;
    let mut out = summary;
    if run.counts.surviving == 0 {
        out.push_str("warning: the filter removed every token; outputs are empty\n");
    }
    Ok(out)
}

pub fn cmd_exact(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let lexicon = cfg.lexicon()?;
    let constraint = cfg.constraint(&lexicon)?;
    let acts = cfg.activations()?;
    let mut notes = String::new();

    let n_pmf = n_morpheme_distribution(&acts);
    let n_moments = n_morpheme_moments(&acts);
    let mut n_table = String::from("n_morphemes\tprobability\n");
    for (i, p) in n_pmf.iter().enumerate() {
        let _ = writeln!(n_table, "{}\t{p:.12}", i + 1);
    }
    write_file(&cfg.out, "n_morphemes.tsv", &n_table)?;

    let count = analysis_count(&lexicon);
    let within_budget = count <= cfg.enumeration_budget as u128;
    let dist = if within_budget {
        Some(exact_word_distribution(
            &lexicon,
            &acts,
            constraint.as_ref(),
            cfg.enumeration_budget,
        )?)
    } else {
        let _ = writeln!(
            notes,
            "notice: {count} analyses exceed the enumeration budget of {}; word tables skipped (use `generate`)",
            cfg.enumeration_budget
        );
        None
    };

    let length_pmf: Option<LengthPmf> = if constraint.is_free() {
        Some(exact_length_pmf(&lexicon, &acts)?)
    } else {
        dist.as_ref().map(length_pmf_from_distribution)
    };
    match &length_pmf {
        Some(pmf) => {
            write_file(&cfg.out, "length_pmf.tsv", &pmf.to_tsv())?;
        }
        None => notes
            .push_str("notice: constrained length law needs enumeration; length_pmf.tsv skipped\n"),
    }

    let mut moments = format!(
        "E[N]={:.6}\nVar[N]={:.6}\n",
        n_moments.mean, n_moments.variance
    );
    if constraint.is_free() {
        let m = length_moments(&lexicon, &acts)?;
        let _ = write!(moments, "E[L]={:.6}\nVar[L]={:.6}\n", m.mean, m.variance);
    } else if let Some(pmf) = &length_pmf {
        let _ = write!(
            moments,
            "E[L]={:.6}\nVar[L]={:.6}\n",
            pmf.mean(),
            pmf.variance()
        );
    }
    if let Some(pmf) = &length_pmf {
        if let Some(mode) = pmf.mode() {
            let _ = writeln!(moments, "mode_L={mode}");
        }
    }
    write_file(&cfg.out, "moments.txt", &moments)?;

    if let Some(dist) = &dist {
        let mut words = String::from("analysis\tsurface\tlength\tprobability\n");
        for (w, p) in &dist.analyses {
            let _ = writeln!(
                words,
                "{}\t{}\t{}\t{p:.15e}",
                w.analysis().gloss(&lexicon),
                w.surface(),
                w.length()
            );
        }
        write_file(&cfg.out, "words.tsv", &words)?;
        let mut merged = String::from("surface\tprobability\n");
        for (s, p) in dist.merged_by_surface() {
            let _ = writeln!(merged, "{s}\t{p:.15e}");
        }
        write_file(&cfg.out, "words_by_surface.tsv", &merged)?;
        let _ = writeln!(
            notes,
            "analyses={}\nprobability_sum={:.15}",
            dist.analyses.len(),
            dist.total()
        );
    }
    Ok(format!("{moments}{notes}"))
}

pub fn cmd_corpus(
    cfg: &ExperimentConfig,
    path: &Path,
    opts: ReadOptions,
) -> Result<String, CliError> {
    if !path.exists() {
        return Err(CliError::Validation(format!(
            "corpus file {} does not exist",
            path.display()
        )));
    }
    let stream = read_corpus(path, opts)?;
    let stats = corpus_stats(&stream);
    let fit = cfg
        .window_for(stats.ranks.len())
        .and_then(|(lo, hi)| fit_zipf_exponent(&stats.ranks, lo, hi).ok());
    write_file(&cfg.out, "lengths.tsv", &stats.lengths.to_tsv())?;
    write_rank_outputs(
        cfg,
        &stats.ranks,
        fit.as_ref(),
        "Corpus rank-frequency curve",
    )?;
    let summary = format!(
        "tokens={}\ntypes={}\nmode={}\nalpha={}\n",
        stats.tokens,
        stats.types,
        stats
            .lengths
            .mode()
            .map_or_else(|| "none".into(), |m| m.to_string()),
        fit.map_or_else(|| "none".into(), |f| format!("{:.6}", f.alpha))
    );
    write_file(&cfg.out, "summary.txt", &summary)?;
    Ok(summary)
}

fn load_tables(dir: &Path) -> Result<(LengthTable, RankFrequencyTable), CliError> {
    let hint = "run `mcwm generate` or `mcwm corpus` with --out pointing at this directory";
    let lengths_path = dir.join("lengths.tsv");
    let ranks_path = dir.join("ranks.tsv");
    let lengths = LengthTable::parse_tsv(
        &read_file(&lengths_path, hint)?,
        &lengths_path.display().to_string(),
    )?;
    let ranks = RankFrequencyTable::parse_tsv(
        &read_file(&ranks_path, hint)?,
        &ranks_path.display().to_string(),
    )?;
    Ok((lengths, ranks))
}

pub fn compare_dirs(model_dir: &Path, corpus_dir: &Path) -> Result<ComparisonReport, CliError> {
    let (ml, mr) = load_tables(model_dir)?;
    let (cl, cr) = load_tables(corpus_dir)?;
    Ok(compare_distributions(&ml, &mr, &cl, &cr)?)
}

pub fn cmd_compare(
    cfg: &ExperimentConfig,
    model_dir: &Path,
    corpus_dir: &Path,
) -> Result<String, CliError> {
    let report = compare_dirs(model_dir, corpus_dir)?.to_string();
    write_file(&cfg.out, "comparison.txt", &report)?;
    Ok(report)
}

/// Cartesian product of the declared sweep lists, first key varying slowest.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<Vec<(String, String)>> {
    let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in &cfg.sweep {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((key.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

pub struct SweepRow {
    pub point: Vec<(String, String)>,
    pub seed: u64,
    pub summary: RunSummary,
}

/// Runs one generation per grid point. Unless `seed` itself is swept, point `i`
/// generates with seed `seed + i` while every point shares the lexicon built from `seed`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let total: usize = cfg.sweep.iter().map(|(_, v)| v.len()).product();
    if total > cfg.sweep_max_points {
        return Err(CliError::Validation(format!(
            "sweep grid has {total} points, above sweep.max_points = {}",
            cfg.sweep_max_points
        )));
    }
    let mut rows = Vec::with_capacity(total);
    for (i, point) in sweep_points(cfg).into_iter().enumerate() {
        let mut local = cfg.clone();
        for (k, v) in &point {
            local.set(k, v)?;
        }
        if !point.iter().any(|(k, _)| k == "seed") {
            local.seed = cfg.seed.wrapping_add(i as u64);
            local.lexicon_seed.get_or_insert(cfg.seed);
        }
        let run = run_generation(&local)?;
        rows.push(SweepRow {
            point,
            seed: local.seed,
            summary: run.summary,
        });
    }
    Ok(rows)
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let rows = run_sweep(cfg)?;
    let keys: Vec<&str> = cfg.sweep.iter().map(|(k, _)| k.as_str()).collect();
    let mut csv = String::from("point");
    for k in &keys {
        let _ = write!(csv, ",{k}");
    }
    csv.push_str(",run_seed,alpha,mode,mean_length,types,tokens_surviving\n");
    for (i, row) in rows.iter().enumerate() {
        let (point, seed, s) = (&row.point, row.seed, &row.summary);
        let _ = write!(csv, "{i}");
        for (_, v) in point {
            let _ = write!(csv, ",{v}");
        }
        let _ = writeln!(
            csv,
            ",{seed},{},{},{:.6},{},{}",
            s.alpha.map_or_else(String::new, |a| format!("{a:.6}")),
            s.mode.map_or_else(String::new, |m| m.to_string()),
            s.mean_length,
            s.types,
            s.surviving
        );
    }
    let path = write_file(&cfg.out, "sweep.csv", &csv)?;
    Ok(format!("{} points\nwrote {}\n", rows.len(), path.display()))
}
