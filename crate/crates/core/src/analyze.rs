//! Single-pass analysis: classification, borders and scores computed while
//! the suffix-link tree is traversed.

use serde::Serialize;

use crate::border::{BorderCounters, BorderEngine, NodeSeed};
use crate::classes::{rare_and_absent, Candidate, Class};
use crate::error::{Error, Result};
use crate::index::BwtIndex;
use crate::score::{f_star, moments, needs_correction, overlap_correction, MarkovModel, ScoreFn};
use crate::text::Text;
use crate::traversal::{traverse, NodeEvent, TraversalConfig, TraversalStats, Visitor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Maximal repeats with `z >= z_min`.
    Over,
    /// Minimal rare and minimal absent words with `z <= z_max`.
    Under,
    Both,
    /// Every node, right extension, minimal rare and absent word, unfiltered by score.
    All,
}

impl Mode {
    fn wants(self, class: Class) -> bool {
        match self {
            Self::Over => class == Class::MaximalRepeat,
            Self::Under => class.is_under(),
            Self::Both => class == Class::MaximalRepeat || class.is_under(),
            Self::All => true,
        }
    }

    fn keeps(self, class: Class, z: f64, z_min: f64, z_max: f64) -> bool {
        match self {
            Self::All => true,
            _ if class == Class::MaximalRepeat => z >= z_min,
            _ => z <= z_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub mode: Mode,
    pub z_min: f64,
    pub z_max: f64,
    /// Longest reported string; also bounds the traversal depth.
    pub max_len: Option<usize>,
    /// Keep variance data only for maximal repeats and their one-character
    /// left extensions. Not available in [`Mode::All`].
    pub fast_path: bool,
    /// Record a [`Probe`] for every classified string regardless of mode,
    /// thresholds and `max_len`.
    pub collect_probes: bool,
    /// Stack telemetry sampling period in nodes (0 = off).
    pub sample_every: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Both,
            z_min: 3.0,
            z_max: -3.0,
            max_len: None,
            fast_path: false,
            collect_probes: false,
            sample_every: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.z_min.is_nan() || self.z_max.is_nan() {
            return Err(Error::Config("thresholds must be numbers".into()));
        }
        if self.mode == Mode::Both && self.z_max > self.z_min {
            return Err(Error::Config(format!(
                "z-max {} exceeds z-min {}: a score could be both over- and under-represented",
                self.z_max, self.z_min
            )));
        }
        if self.fast_path && self.mode == Mode::All {
            return Err(Error::Config("the fast path keeps too little data for mode all".into()));
        }
        if self.fast_path && self.collect_probes {
            return Err(Error::Config("probes need the full path data".into()));
        }
        if self.max_len == Some(0) {
            return Err(Error::Config("max length must be positive".into()));
        }
        Ok(())
    }
}

/// Smallest `k` with `σ^k >= N`, plus `slack`; `None` (no cutoff) for a unary alphabet.
pub fn default_max_len(sigma: usize, scoring_len: usize, slack: usize) -> Option<usize> {
    if sigma < 2 {
        return None;
    }
    let mut k = 0usize;
    let mut reach = 1u128;
    while reach < scoring_len as u128 {
        reach *= sigma as u128;
        k += 1;
    }
    Some(k.max(1) + slack)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub class: Class,
    /// Codes of the string, terminator-free.
    pub codes: Vec<u8>,
    pub count: u64,
    pub expectation: f64,
    pub variance: f64,
    pub z: f64,
    pub f_star: u64,
}

impl ScoreRecord {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn label(&self) -> &'static str {
        self.class.label(self.count)
    }
}

/// Everything computed for one classified string. Moments are `NaN` when the
/// string is longer than the scoring length.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub class: Class,
    pub codes: Vec<u8>,
    pub count: u64,
    pub bord: u32,
    pub pi: f64,
    pub phi: f64,
    pub gamma: f64,
    pub expectation: f64,
    pub variance: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClassCounters {
    /// Right-maximal nodes other than the root.
    pub right_maximal: u64,
    pub maximal_repeats: u64,
    pub minimal_rare: u64,
    pub minimal_absent: u64,
    /// Strings longer than the scoring length.
    pub unscored: u64,
    /// Strings whose probability underflowed to zero.
    pub underflow: u64,
    /// Variances below `-1e-9·max(E, 1)` before clamping to zero.
    pub negative_variance: u64,
}

struct Analyzer<'a> {
    model: &'a MarkovModel,
    score: &'a dyn ScoreFn,
    config: AnalysisConfig,
    max_len: usize,
    engine: BorderEngine,
    freq: Vec<usize>,
    candidates: Vec<Candidate>,
    records: Vec<ScoreRecord>,
    probes: Vec<Probe>,
    counters: ClassCounters,
}

/// Facts about one classified string, before scoring.
struct Scored {
    class: Class,
    m: usize,
    count: u64,
    bord: u32,
    pi: f64,
    phi: f64,
    gamma: f64,
}

/// How to spell and walk the borders of a scored string relative to the path.
#[derive(Clone, Copy)]
enum Shape {
    /// The path top.
    Node,
    /// `a · top · b`, or `top · b` without `a`.
    Wrapped { a: Option<u8>, b: u8 },
}

impl<'a> Analyzer<'a> {
    fn wants(&self, class: Class, m: usize) -> bool {
        self.config.collect_probes || (self.config.mode.wants(class) && m <= self.max_len)
    }

    fn spell(&self, shape: Shape) -> Vec<u8> {
        let top = self.engine.spell();
        let mut codes = Vec::with_capacity(top.len() + 2);
        if let Shape::Wrapped { a: Some(a), .. } = shape {
            codes.push(a);
        }
        codes.extend(top);
        if let Shape::Wrapped { b, .. } = shape {
            codes.push(b);
        }
        codes
    }

    fn emit(&mut self, s: Scored, shape: Shape) -> Result<()> {
        let n = self.model.scoring_len();
        let (mut e, mut v, mut z) = (f64::NAN, f64::NAN, f64::NAN);
        let mut fs = 0;
        let scorable = s.m <= n && s.pi > 0.0;
        if s.m > n {
            self.counters.unscored += 1;
        } else if s.pi == 0.0 {
            self.counters.underflow += 1;
        } else {
            (e, v) = moments(s.m, s.pi, s.phi, n);
            if needs_correction(s.m, n) {
                let borders = match shape {
                    Shape::Node => self.engine.node_borders(s.m),
                    Shape::Wrapped { b, .. } => self.engine.extension_borders(s.m - 1, s.bord, b)?,
                };
                v += overlap_correction(s.m, s.pi, n, &borders);
            }
            if v < 0.0 {
                if v < -1e-9 * e.max(1.0) {
                    self.counters.negative_variance += 1;
                    log::debug!("negative variance {v:e} at length {} clamped", s.m);
                }
                v = 0.0;
            }
            fs = f_star(s.m, s.bord as usize, n);
            z = self.score.score(s.count as f64, e, v, s.m, fs);
        }

        let mode = self.config.mode;
        if scorable
            && s.m <= self.max_len
            && mode.wants(s.class)
            && mode.keeps(s.class, z, self.config.z_min, self.config.z_max)
        {
            self.records.push(ScoreRecord {
                class: s.class,
                codes: self.spell(shape),
                count: s.count,
                expectation: e,
                variance: v,
                z,
                f_star: fs,
            });
        }
        if self.config.collect_probes {
            self.probes.push(Probe {
                class: s.class,
                codes: self.spell(shape),
                count: s.count,
                bord: s.bord,
                pi: s.pi,
                phi: s.phi,
                gamma: s.gamma,
                expectation: e,
                variance: v,
                z,
            });
        }
        Ok(())
    }
}

impl Visitor for Analyzer<'_> {
    type Seed = NodeSeed;

    const SEED_BITS: u64 = 32 + 3 * 64;

    fn enter(&mut self, node: &NodeEvent<'_, NodeSeed>, child_seeds: &mut Vec<NodeSeed>) -> Result<()> {
        let m = node.length;
        let maximal = node.left_degree() >= 2;
        let fast = self.config.fast_path;
        let mut seed = if node.is_root() { NodeSeed::default() } else { *node.seed };

        match node.lead {
            None => self.engine.enter_root(node.repr.chars())?,
            Some(lead) => {
                let retain = !fast || self.engine.entry(m - 1).maximal;
                if fast {
                    (seed.phi, seed.gamma) = if maximal {
                        self.engine.node_phi_gamma(seed.bord, m)?
                    } else {
                        (f64::NAN, f64::NAN)
                    };
                }
                self.engine.enter(lead, m, seed, maximal, node.repr.chars(), retain)?;
                let class = if maximal {
                    self.counters.maximal_repeats += 1;
                    Class::MaximalRepeat
                } else {
                    Class::RightMaximal
                };
                self.counters.right_maximal += 1;
                if self.wants(class, m) {
                    let s = Scored {
                        class,
                        m,
                        count: node.repr.width() as u64,
                        bord: seed.bord,
                        pi: seed.pi,
                        phi: seed.phi,
                        gamma: seed.gamma,
                    };
                    self.emit(s, Shape::Node)?;
                }
            }
        }

        if self.wants(Class::RightExtension, m + 1) {
            for (b, count) in node.repr.counts().filter(|&(b, _)| b != 0) {
                let ext = self.engine.top_extension(b)?;
                let s = Scored {
                    class: Class::RightExtension,
                    m: m + 1,
                    count: count as u64,
                    bord: ext.bord,
                    pi: ext.pi,
                    phi: ext.phi,
                    gamma: ext.gamma,
                };
                self.emit(s, Shape::Wrapped { a: None, b })?;
            }
        }

        self.engine.load_buffer();

        let child_len = m + 1;
        let descend = child_len <= self.max_len;
        for ext in node.extensions {
            let mut child = NodeSeed::default();
            if descend && ext.code != 0 && ext.repr.is_right_maximal() {
                child.bord = self.engine.left_border(ext.code);
                child.pi = seed.pi * self.model.prob(ext.code);
                (child.phi, child.gamma) = if fast {
                    (f64::NAN, f64::NAN)
                } else {
                    self.engine.node_phi_gamma(child.bord, child_len)?
                };
            }
            child_seeds.push(child);
        }

        if maximal {
            self.candidates.clear();
            rare_and_absent(node, &mut self.freq, &mut self.candidates);
            let candidates = std::mem::take(&mut self.candidates);
            for c in &candidates {
                match c.class {
                    Class::MinimalRare => self.counters.minimal_rare += 1,
                    _ => self.counters.minimal_absent += 1,
                }
                if !self.wants(c.class, m + 2) {
                    continue;
                }
                let bord_aw = self.engine.left_border(c.a);
                let pi_aw = seed.pi * self.model.prob(c.a);
                let ext = self.engine.extension(c.a, m + 1, bord_aw, pi_aw, c.b)?;
                let s = Scored {
                    class: c.class,
                    m: m + 2,
                    count: c.count as u64,
                    bord: ext.bord,
                    pi: ext.pi,
                    phi: ext.phi,
                    gamma: ext.gamma,
                };
                self.emit(s, Shape::Wrapped { a: Some(c.a), b: c.b })?;
            }
            self.candidates = candidates;
        }

        self.engine.reset_buffer();
        Ok(())
    }

    fn exit(&mut self, depth: usize) -> Result<()> {
        self.engine.exit(depth)
    }

    fn aux_bits(&self) -> u64 {
        self.engine.live_bits()
    }
}

/// Outcome of [`analyze`]: report records (unsorted), optional probes and telemetry.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub records: Vec<ScoreRecord>,
    pub probes: Vec<Probe>,
    pub classes: ClassCounters,
    pub traversal: TraversalStats,
    pub borders: BorderCounters,
    /// Read requests to path and char stacks, per depth.
    pub read_histogram: Vec<u64>,
    /// Text length including the terminator.
    pub n: usize,
    pub sigma: usize,
    pub scoring_len: usize,
    pub max_len: Option<usize>,
}

/// A violated structural bound, with the observed and allowed values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub observed: u64,
    pub limit: u64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.observed <= self.limit
    }
}

impl Analysis {
    /// Size bounds every run must respect.
    pub fn bound_checks(&self) -> Vec<BoundCheck> {
        let n = self.n as u64;
        let t = &self.traversal;
        let log_n = u64::from(usize::BITS - (self.n.max(1) - 1).leading_zeros());
        vec![
            BoundCheck {
                name: "right-maximal nodes <= n - 1",
                observed: t.nodes,
                limit: n - 1,
            },
            BoundCheck {
                name: "minimal absent words <= sigma * n",
                observed: self.classes.minimal_absent,
                limit: self.sigma as u64 * n,
            },
            BoundCheck {
                name: "return arcs <= 2 (nodes + Weiner links)",
                observed: self.borders.return_arcs,
                limit: 2 * (t.nodes + t.left_extensions),
            },
            BoundCheck {
                name: "left extensions <= 4n - 4",
                observed: t.left_extensions,
                limit: 4 * n - 4,
            },
            BoundCheck {
                name: "frames <= sigma (ceil(log2 n) + 1)",
                observed: t.max_frames as u64,
                limit: self.sigma as u64 * (log_n + 1),
            },
        ]
    }

    /// Average live auxiliary stack bits per node.
    pub fn average_stack_bits(&self) -> f64 {
        self.traversal.average_stack_bits()
    }
}

/// Runs the traversal and scores every requested string.
pub fn analyze(
    text: &Text,
    index: &BwtIndex,
    model: &MarkovModel,
    score: &dyn ScoreFn,
    config: AnalysisConfig,
) -> Result<Analysis> {
    config.validate()?;
    if model.probs().len() != text.sigma() + 1 || index.sigma() != text.sigma() {
        return Err(Error::Config("model, index and text disagree on the alphabet".into()));
    }
    let max_len = if config.collect_probes { None } else { config.max_len };
    let mut analyzer = Analyzer {
        model,
        score,
        config,
        max_len: max_len.unwrap_or(usize::MAX),
        engine: BorderEngine::new(model.probs().to_vec(), model.scoring_len()),
        freq: vec![0; text.sigma() + 1],
        candidates: Vec::new(),
        records: Vec::new(),
        probes: Vec::new(),
        counters: ClassCounters::default(),
    };
    let traversal = traverse(
        index,
        &mut analyzer,
        TraversalConfig {
            max_depth: max_len,
            sample_every: config.sample_every,
        },
    )?;
    if analyzer.engine.depth().is_some() || !analyzer.engine.buffer_is_clear() {
        return Err(Error::Desync("border state not unwound after traversal".into()));
    }
    let analysis = Analysis {
        records: analyzer.records,
        probes: analyzer.probes,
        classes: analyzer.counters,
        traversal,
        borders: analyzer.engine.counters().clone(),
        read_histogram: analyzer.engine.read_histogram().to_vec(),
        n: text.len(),
        sigma: text.sigma(),
        scoring_len: model.scoring_len(),
        max_len,
    };
    for check in analysis.bound_checks() {
        if !check.holds() {
            log::warn!("bound violated: {} ({} > {})", check.name, check.observed, check.limit);
        }
    }
    Ok(analysis)
}
