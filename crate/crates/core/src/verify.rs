//! Cross-check of a full analysis against the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analyze::{analyze, Analysis, AnalysisConfig, Mode};
use crate::classes::Class;
use crate::error::Result;
use crate::index::BwtIndex;
use crate::oracle::{self, NaiveCounter};
use crate::score::{MarkovModel, ZScore};
use crate::text::Text;

/// Longest string whose variance is compared with the covariance sum.
pub const MOMENT_CHECK_LEN: usize = 500;
pub const PHI_TOLERANCE: f64 = 1e-12;
pub const MOMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub kind: &'static str,
    pub detail: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub set_checks: u64,
    pub border_checks: u64,
    pub count_checks: u64,
    pub phi_checks: u64,
    pub moment_checks: u64,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn fail(&mut self, kind: &'static str, detail: String) {
        self.mismatches.push(Mismatch { kind, detail });
    }
}

fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

/// Analyzes `text` in [`Mode::All`] with probes and compares every class set,
/// count, border, `π`, `φ`, `γ`, expectation and variance with the oracle.
pub fn verify(text: &Text, index: &BwtIndex, model: &MarkovModel) -> Result<(VerifyReport, Analysis)> {
    let naive = oracle::naive_classes(text)?;
    let config = AnalysisConfig {
        mode: Mode::All,
        collect_probes: true,
        ..AnalysisConfig::default()
    };
    let analysis = analyze(text, index, model, &ZScore::default(), config)?;
    let mut report = VerifyReport::default();
    let render = |s: &Vec<u8>| format!("{:?}", text.render(s));

    let mut right_maximal: BTreeSet<Vec<u8>> = BTreeSet::from([Vec::new()]);
    let mut maximal = BTreeSet::new();
    let mut rare = BTreeMap::new();
    let mut absent = BTreeSet::new();
    for p in &analysis.probes {
        match p.class {
            Class::RightMaximal => {
                right_maximal.insert(p.codes.clone());
            }
            Class::MaximalRepeat => {
                right_maximal.insert(p.codes.clone());
                maximal.insert(p.codes.clone());
            }
            Class::MinimalRare => {
                rare.insert(p.codes.clone(), p.count as usize);
            }
            Class::MinimalAbsent => {
                absent.insert(p.codes.clone());
            }
            Class::RightExtension => {}
        }
    }

    let mut compare_sets = |name: &'static str, got: &BTreeSet<Vec<u8>>, want: &BTreeSet<Vec<u8>>| {
        report.set_checks += 1;
        if got != want {
            let extra: Vec<String> = got.difference(want).take(5).map(render).collect();
            let missing: Vec<String> = want.difference(got).take(5).map(render).collect();
            report.fail(name, format!("extra {extra:?}, missing {missing:?}"));
        }
    };
    compare_sets("right-maximal set", &right_maximal, &naive.right_maximal);
    compare_sets("maximal repeat set", &maximal, &naive.maximal_repeats);
    compare_sets("minimal absent set", &absent, &naive.minimal_absent);
    let rare_keys: BTreeSet<Vec<u8>> = rare.keys().cloned().collect();
    let naive_rare: BTreeSet<Vec<u8>> = naive.minimal_rare.keys().cloned().collect();
    compare_sets("minimal rare set", &rare_keys, &naive_rare);

    let counter = NaiveCounter::new(text.body());
    let probs = model.probs();
    let n = model.scoring_len();
    for p in &analysis.probes {
        let name = || format!("{} {}", p.class.label(p.count), render(&p.codes));

        report.count_checks += 1;
        let count = counter.count(&p.codes);
        if count as u64 != p.count {
            report.fail("count", format!("{}: {} vs {count}", name(), p.count));
        }

        report.border_checks += 1;
        let bord = oracle::longest_border(&p.codes);
        if bord != p.bord as usize {
            report.fail("border", format!("{}: {} vs {bord}", name(), p.bord));
        }

        report.phi_checks += 1;
        let pi = oracle::probability(&p.codes, probs);
        let (phi, gamma, scale) = oracle::definitional_phi_gamma(&p.codes, probs, n);
        if !close(p.pi, pi, PHI_TOLERANCE, 0.0) {
            report.fail("pi", format!("{}: {:e} vs {pi:e}", name(), p.pi));
        }
        if !close(p.phi, phi, PHI_TOLERANCE, scale) || !close(p.gamma, gamma, PHI_TOLERANCE, 0.0) {
            report.fail(
                "phi/gamma",
                format!("{}: ({:e}, {:e}) vs ({phi:e}, {gamma:e})", name(), p.phi, p.gamma),
            );
        }

        let m = p.codes.len();
        if m <= n && m <= MOMENT_CHECK_LEN && pi > 0.0 {
            report.moment_checks += 1;
            let (e, v) = oracle::exact_moments(&p.codes, probs, n);
            if !close(p.expectation, e, MOMENT_TOLERANCE, 0.0)
                || !close(p.variance, v.max(0.0), MOMENT_TOLERANCE, e)
            {
                report.fail(
                    "moments",
                    format!("{}: ({:e}, {:e}) vs ({e:e}, {v:e})", name(), p.expectation, p.variance),
                );
            }
        }
    }
    Ok((report, analysis))
}
