//! Rank–frequency tables, log-log least-squares exponent fits, and reference
//! power-law curves.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

/// Default upper rank of the fit window.
pub const DEFAULT_FIT_MAX_RANK: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct RankRecord {
    pub rank: usize,
    pub surface: String,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RankFrequencyTable {
    pub records: Vec<RankRecord>,
    pub total_tokens: u64,
}

impl RankFrequencyTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.frequency).collect()
    }

    /// `rank<TAB>surface<TAB>count<TAB>frequency`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\tsurface\tcount\tfrequency\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.9e}",
                r.rank, r.surface, r.count, r.frequency
            );
        }
        out
    }

    /// `log_rank,log_frequency` rows (natural logarithms).
    pub fn to_loglog_csv(&self) -> String {
        let mut out = String::from("log_rank,log_frequency\n");
        for r in &self.records {
            let _ = writeln!(out, "{:.9},{:.9}", (r.rank as f64).ln(), r.frequency.ln());
        }
        out
    }

    /// Reads the table written by [`RankFrequencyTable::to_tsv`]. Ranks and
    /// frequencies are recomputed from the counts.
    pub fn parse_tsv(text: &str, source: &str) -> Result<RankFrequencyTable> {
        let mut counts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let count: u64 = fields[2]
                .parse()
                .map_err(|_| err(format!("bad count {:?}", fields[2])))?;
            counts.push((fields[1].to_string(), count));
        }
        let total = counts.iter().map(|(_, c)| c).sum();
        Ok(rank_frequency(counts, total))
    }
}

/// Sorts types by count descending, ties by surface ascending, and assigns
/// ranks `1..=K`. Zero counts are dropped; `frequency = count / total_tokens`.
pub fn rank_frequency<S: Into<String>>(
    type_counts: impl IntoIterator<Item = (S, u64)>,
    total_tokens: u64,
) -> RankFrequencyTable {
    let mut types: Vec<(String, u64)> = type_counts
        .into_iter()
        .map(|(s, c)| (s.into(), c))
        .filter(|&(_, c)| c > 0)
        .collect();
    if types.is_empty() || total_tokens == 0 {
        return RankFrequencyTable {
            records: Vec::new(),
            total_tokens,
        };
    }
    types.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let records = types
        .into_iter()
        .enumerate()
        .map(|(i, (surface, count))| RankRecord {
            rank: i + 1,
            surface,
            count,
            frequency: count as f64 / total_tokens as f64,
        })
        .collect();
    RankFrequencyTable {
        records,
        total_tokens,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfFit {
    /// Negated slope of log f(r) against log r.
    pub alpha: f64,
    /// Intercept of the regression line (natural logarithms).
    pub intercept: f64,
    pub r_min: usize,
    pub r_max: usize,
    /// Residual standard error, `sqrt(SSE / (n − 2))`.
    pub residual_stderr: f64,
}

impl fmt::Display for ZipfFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alpha={:.9}", self.alpha)?;
        writeln!(f, "intercept={:.9}", self.intercept)?;
        writeln!(f, "window={}..{}", self.r_min, self.r_max)?;
        writeln!(f, "stderr={:.9}", self.residual_stderr)
    }
}

/// `1..=min(100, K)`.
pub fn default_window(table_len: usize) -> (usize, usize) {
    (1, table_len.min(DEFAULT_FIT_MAX_RANK))
}

/// Ordinary least squares of `ln f(r)` on `ln r` for `r` in `r_min..=r_max`.
/// `frequencies[r - 1]` is the frequency at rank `r`.
pub fn fit_power_law(frequencies: &[f64], r_min: usize, r_max: usize) -> Result<ZipfFit> {
    if r_min < 1 || r_max > frequencies.len() || r_min > r_max {
        return Err(Error::InvalidArgument(format!(
            "fit window {r_min}..{r_max} does not fit a table of {} ranks",
            frequencies.len()
        )));
    }
    let n = r_max - r_min + 1;
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "fit window {r_min}..{r_max} has {n} points, need at least 3"
        )));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for r in r_min..=r_max {
        let f = frequencies[r - 1];
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "frequency at rank {r} is {f}; log-log fit needs positive values"
            )));
        }
        xs.push((r as f64).ln());
        ys.push(f.ln());
    }
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ZipfFit {
        alpha: -slope,
        intercept,
        r_min,
        r_max,
        residual_stderr: (sse / (nf - 2.0)).sqrt(),
    })
}

pub fn fit_zipf_exponent(
    table: &RankFrequencyTable,
    r_min: usize,
    r_max: usize,
) -> Result<ZipfFit> {
    fit_power_law(&table.frequencies(), r_min, r_max)
}

/// Fit over [`default_window`].
pub fn fit_zipf_default(table: &RankFrequencyTable) -> Result<ZipfFit> {
    let (lo, hi) = default_window(table.len());
    fit_zipf_exponent(table, lo, hi)
}

/// Reference curve `f(r) = r^{-alpha}` for `r = 1..=ranks`, optionally
/// rescaled to sum to one.
pub fn synthetic_zipf(alpha: f64, ranks: usize, normalized: bool) -> Vec<f64> {
    debug_assert!(alpha.is_finite() && alpha >= 0.0);
    let raw: Vec<f64> = (1..=ranks).map(|r| (r as f64).powf(-alpha)).collect();
    if !normalized {
        return raw;
    }
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|f| f / z).collect()
}

/// Secondary estimator, not used by the acceptance path: discrete power-law
/// maximum likelihood on the type-count distribution (continuous
/// approximation with `x_min − 1/2`) over counts `≥ x_min`, mapped to a rank
/// exponent by `alpha = 1 / (beta − 1)`.
pub fn mle_zipf_exponent(table: &RankFrequencyTable, x_min: u64) -> Result<f64> {
    if x_min == 0 {
        return Err(Error::InvalidArgument("x_min must be at least 1".into()));
    }
    let shift = x_min as f64 - 0.5;
    let logs: Vec<f64> = table
        .records
        .iter()
        .filter(|r| r.count >= x_min)
        .map(|r| (r.count as f64 / shift).ln())
        .collect();
    if logs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "only {} types have count >= {x_min}",
            logs.len()
        )));
    }
    let beta = 1.0 + logs.len() as f64 / logs.iter().sum::<f64>();
    Ok(1.0 / (beta - 1.0))
}

/// Log-log scatter of the table with the fitted line, as a standalone SVG.
pub fn render_svg(table: &RankFrequencyTable, fit: Option<&ZipfFit>, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const M: f64 = 56.0;
    let pts: Vec<(f64, f64)> = table
        .records
        .iter()
        .map(|r| ((r.rank as f64).log10(), r.frequency.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let x_max = pts.iter().map(|p| p.0).fold(0.0f64, f64::max).max(1.0);
    let y_hi = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max).ceil();
    let y_lo = pts
        .iter()
        .map(|p| p.1)
        .fold(f64::MAX, f64::min)
        .floor()
        .min(y_hi - 1.0);
    let sx = |x: f64| M + x / x_max * (W - 2.0 * M);
    let sy = |y: f64| M + (y_hi - y) / (y_hi - y_lo) * (H - 2.0 * M);

    let _ = writeln!(
        svg,
        r#"<g stroke="black" fill="none"><line x1="{M}" y1="{}" x2="{}" y2="{}"/><line x1="{M}" y1="{M}" x2="{M}" y2="{}"/></g>"#,
        H - M,
        W - M,
        H - M,
        H - M
    );
    for decade in 0..=(x_max.floor() as i32) {
        let x = sx(decade as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{decade}</text>"#,
            H - M + 16.0
        );
    }
    for decade in (y_lo as i32)..=(y_hi as i32) {
        let y = sy(decade as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="end">1e{decade}</text>"#,
            M - 6.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">rank</text>"#,
        W / 2.0,
        H - 12.0
    );
    svg.push_str(r##"<g fill="#1f5fbf">"##);
    svg.push('\n');
    for (x, y) in &pts {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    svg.push_str("</g>\n");
    if let Some(fit) = fit {
        // ln f = intercept − alpha ln r  ⇒  log10 f = intercept/ln10 − alpha log10 r
        let line = |lr: f64| fit.intercept / std::f64::consts::LN_10 - fit.alpha * lr;
        let (a, b) = ((fit.r_min as f64).log10(), (fit.r_max as f64).log10());
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="2"/>"##,
            sx(a),
            sy(line(a)),
            sx(b),
            sy(line(b))
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">alpha = {:.3}</text>"#,
            W - M,
            M + 14.0,
            fit.alpha
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
