use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::aeks::MonteCarloConfig;
use crate::error::{AeError, Result};
use crate::scalar::Num;
use crate::stats::derive_seed;

use super::generate::{generate, SimConfig};
use super::methods::{run_methods, Method};
use super::roc::{roc, RocCurve};

const METHOD_SEED_TAG: u64 = 0x6d63_6d63;

/// One-sided paired comparison, alternative: mean(a − b) > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedTest {
    pub n: usize,
    pub mean_diff: f64,
    pub t_stat: f64,
    /// Paired t-test p-value; `None` with fewer than two pairs.
    pub p_t: Option<f64>,
    pub wins: usize,
    pub losses: usize,
    /// Exact sign-test p-value over non-zero differences.
    pub p_sign: f64,
}

pub fn paired_comparison(a: &[f64], b: &[f64]) -> PairedTest {
    assert_eq!(a.len(), b.len(), "paired samples differ in length");
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let mean = d.iter().sum::<f64>() / n as f64;
    let wins = d.iter().filter(|&&x| x > 0.0).count();
    let losses = d.iter().filter(|&&x| x < 0.0).count();

    let (t_stat, p_t) = if n < 2 {
        (f64::NAN, None)
    } else {
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        if se == 0.0 {
            if mean > 0.0 {
                (f64::INFINITY, Some(0.0))
            } else {
                (f64::NAN, Some(1.0))
            }
        } else {
            let t = mean / se;
            let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df >= 1");
            (t, Some(1.0 - dist.cdf(t)))
        }
    };

    // P(Bin(wins + losses, 1/2) >= wins)
    let m = wins + losses;
    let mut p_sign = 0.0;
    let mut c = 1.0f64;
    for k in 0..=m {
        if k >= wins {
            p_sign += c;
        }
        c = c * (m - k) as f64 / (k + 1) as f64;
    }
    p_sign /= 2f64.powi(m as i32);

    PairedTest {
        n,
        mean_diff: mean,
        t_stat,
        p_t,
        wins,
        losses,
        p_sign: p_sign.min(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_auc: f64,
    /// Sample standard deviation; `None` for a single dataset.
    pub sd_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    /// `curves[d][k]` is the ROC of `Method::ALL[k]` on dataset `d`.
    pub curves: Vec<Vec<RocCurve<f64>>>,
    pub summaries: Vec<MethodSummary>,
    /// (proposed method, baseline, test).
    pub comparisons: Vec<(Method, Method, PairedTest)>,
}

impl BenchmarkReport {
    pub fn aucs(&self, method: Method) -> Vec<f64> {
        let k = Method::ALL.iter().position(|&m| m == method).expect("known method");
        self.curves.iter().map(|c| c[k].auc).collect()
    }

    pub fn summary_csv(&self, header: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = header {
            let _ = writeln!(out, "# {h}");
        }
        out.push_str("method,mean_auc,sd_auc\n");
        for s in &self.summaries {
            let sd = s.sd_auc.map_or("NA".to_string(), |v| v.to_string());
            let _ = writeln!(out, "{},{},{}", s.method.name(), s.mean_auc, sd);
        }
        out
    }

    pub fn comparison_csv(&self, header: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = header {
            let _ = writeln!(out, "# {h}");
        }
        out.push_str("method,baseline,n,mean_diff,t_stat,p_t,wins,losses,p_sign\n");
        for (m, b, t) in &self.comparisons {
            let p_t = t.p_t.map_or("NA".to_string(), |v| Num(v).to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                m.name(),
                b.name(),
                t.n,
                Num(t.mean_diff),
                Num(t.t_stat),
                p_t,
                t.wins,
                t.losses,
                Num(t.p_sign)
            );
        }
        out
    }

    /// Writes `roc/<method>_<dataset>.csv`, `summary.csv`, `comparison.csv`
    /// and `roc_overlay.svg` under `dir`.
    pub fn write_to(&self, dir: &Path, header: Option<&str>) -> Result<()> {
        let roc_dir = dir.join("roc");
        fs::create_dir_all(&roc_dir)?;
        for (d, curves) in self.curves.iter().enumerate() {
            for (k, curve) in curves.iter().enumerate() {
                let mut out = String::new();
                if let Some(h) = header {
                    let _ = writeln!(out, "# {h}");
                }
                out.push_str("fpr,tpr,threshold\n");
                for p in &curve.points {
                    let _ = writeln!(out, "{},{},{}", Num(p.fpr), Num(p.tpr), Num(p.threshold));
                }
                fs::write(roc_dir.join(format!("{}_{}.csv", Method::ALL[k].name(), d + 1)), out)?;
            }
        }
        fs::write(dir.join("summary.csv"), self.summary_csv(header))?;
        fs::write(dir.join("comparison.csv"), self.comparison_csv(header))?;
        fs::write(dir.join("roc_overlay.svg"), self.overlay_svg())?;
        Ok(())
    }

    /// Two panels (KS family, Fisher family), every dataset's curve drawn
    /// per method.
    pub fn overlay_svg(&self) -> String {
        const PANEL: f64 = 360.0;
        const MARGIN: f64 = 50.0;
        let colors = ["#c0392b", "#7f8c8d", "#2471a3", "#7f8c8d"];
        let panels = [
            ("AEKS vs GSEA", [Method::Aeks, Method::Gsea]),
            ("AEFisher vs Fisher", [Method::AeFisher, Method::Fisher]),
        ];
        let width = 2.0 * (PANEL + 2.0 * MARGIN);
        let height = PANEL + 2.0 * MARGIN;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
        );
        for (p, (title, methods)) in panels.iter().enumerate() {
            let ox = p as f64 * (PANEL + 2.0 * MARGIN) + MARGIN;
            let oy = MARGIN;
            let _ = writeln!(s, r#"<g>"#);
            let _ = writeln!(
                s,
                r#"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
            );
            let _ = writeln!(
                s,
                r##"<line x1="{ox}" y1="{}" x2="{}" y2="{oy}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
                oy + PANEL,
                ox + PANEL
            );
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{title}</text>"#, ox + PANEL / 2.0, oy - 15.0);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">False positive rate</text>"#,
                ox + PANEL / 2.0,
                oy + PANEL + 35.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">True positive rate</text>"#,
                ox - 30.0,
                oy + PANEL / 2.0,
                ox - 30.0,
                oy + PANEL / 2.0
            );
            for (li, method) in methods.iter().enumerate() {
                let k = Method::ALL.iter().position(|m| m == method).expect("known method");
                let color = colors[k];
                let dash = if method.baseline().is_none() { r#" stroke-dasharray="6 3""# } else { "" };
                for curves in &self.curves {
                    let pts: Vec<String> = curves[k]
                        .points
                        .iter()
                        .map(|pt| format!("{:.2},{:.2}", ox + pt.fpr * PANEL, oy + PANEL - pt.tpr * PANEL))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-opacity="0.5"{dash}/>"#,
                        pts.join(" ")
                    );
                }
                let mean = self
                    .summaries
                    .iter()
                    .find(|x| x.method == *method)
                    .map_or(f64::NAN, |x| x.mean_auc);
                let ly = oy + PANEL - 40.0 + 18.0 * li as f64;
                let _ = writeln!(
                    s,
                    r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
                    ox + PANEL - 150.0,
                    ox + PANEL - 125.0
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}">{} (AUC {:.3})</text>"#,
                    ox + PANEL - 120.0,
                    ly + 4.0,
                    method.name(),
                    mean
                );
            }
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Seed for the Monte Carlo nulls of dataset `dataset`.
pub(crate) fn dataset_mc(mc: &MonteCarloConfig, master: u64, dataset: u64) -> MonteCarloConfig {
    MonteCarloConfig {
        seed: derive_seed(derive_seed(master, METHOD_SEED_TAG), dataset),
        ..*mc
    }
}

/// Generates `cfg.replicates` datasets, runs all four methods on each and
/// summarizes their ROC AUCs. The Monte Carlo seed of each dataset is derived
/// from `mc.seed` and the dataset index.
pub fn benchmark(cfg: &SimConfig, mc: &MonteCarloConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    mc.validate()?;
    let mut curves = Vec::with_capacity(cfg.replicates);
    for d in 0..cfg.replicates as u64 {
        let ds = generate(cfg, d)?;
        let scores = run_methods::<f64>(&ds, &dataset_mc(mc, mc.seed, d))?;
        let per_method = scores
            .iter()
            .map(|s| roc(&ds.truth, &s.p_values, true))
            .collect::<Result<Vec<_>>>()?;
        log::info!(
            "dataset {}: AUC {}",
            d + 1,
            per_method
                .iter()
                .zip(Method::ALL)
                .map(|(c, m)| format!("{}={:.4}", m.name(), c.auc))
                .collect::<Vec<_>>()
                .join(" ")
        );
        curves.push(per_method);
    }
    if curves.is_empty() {
        return Err(AeError::Config("no datasets generated".into()));
    }
    let mut report = BenchmarkReport {
        curves,
        summaries: Vec::new(),
        comparisons: Vec::new(),
    };
    for method in Method::ALL {
        let aucs = report.aucs(method);
        let n = aucs.len();
        let mean = aucs.iter().sum::<f64>() / n as f64;
        let sd = (n > 1).then(|| (aucs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
        report.summaries.push(MethodSummary {
            method,
            mean_auc: mean,
            sd_auc: sd,
        });
    }
    for method in Method::ALL {
        if let Some(base) = method.baseline() {
            let t = paired_comparison(&report.aucs(method), &report.aucs(base));
            report.comparisons.push((method, base, t));
        }
    }
    Ok(report)
}
