//! Pixel and connected-component metrics, per-class breakdown, fold
//! aggregation and F1<sub>qual</sub> histograms.
//!
//! Every ratio whose denominator is zero evaluates to 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::mask::{connected_components, BinaryMask, ClassMask, LabelMap, TextClass};
use crate::matching::{match_with_assignment, ratio, watershed_assign, GtMatch, GtViews, MatchResult};

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Normal,
    Relaxed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Normal => "normal",
            Mode::Relaxed => "relaxed",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Mode::Normal),
            "relaxed" => Ok(Mode::Relaxed),
            other => Err(Error::InvalidParam(format!("unknown mode {other:?}"))),
        }
    }
}

/// Depth of the erosion/dilation used by relaxed views.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxConfig {
    pub iterations: usize,
}

impl RelaxConfig {
    pub fn new(iterations: usize) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidParam("relax iterations must be >= 1".into()));
        }
        Ok(Self { iterations })
    }
}

impl Default for RelaxConfig {
    fn default() -> Self {
        Self { iterations: 1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelCounts {
    pub tp_px: usize,
    pub fp_px: usize,
    pub fn_px: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelScores {
    pub precision: f64,
    pub recall: f64,
    pub pf1: f64,
    pub counts: PixelCounts,
}

impl PixelScores {
    pub fn from_counts(counts: PixelCounts) -> Self {
        let precision = ratio(counts.tp_px, counts.tp_px + counts.fp_px);
        let recall = ratio(counts.tp_px, counts.tp_px + counts.fn_px);
        Self {
            precision,
            recall,
            pf1: harmonic(precision, recall),
            counts,
        }
    }
}

/// Precision, recall and F1 over pixels.
pub fn pixel_metrics(gt: &BinaryMask, pred: &BinaryMask) -> Result<PixelScores> {
    check_dims(gt.dims(), pred.dims())?;
    let mut c = PixelCounts::default();
    for (&g, &p) in gt.data().iter().zip(pred.data()) {
        match (g, p) {
            (true, true) => c.tp_px += 1,
            (false, true) => c.fp_px += 1,
            (true, false) => c.fn_px += 1,
            _ => {}
        }
    }
    Ok(PixelScores::from_counts(c))
}

/// Relaxed pixel counts: a predicted pixel is correct inside `accept`
/// (dilated truth) and a miss is only counted on `require` (eroded truth).
fn relaxed_pixel_counts(require: &BinaryMask, accept: &BinaryMask, pred: &BinaryMask) -> PixelCounts {
    let mut c = PixelCounts::default();
    for ((&r, &a), &p) in require.data().iter().zip(accept.data()).zip(pred.data()) {
        if p {
            if a {
                c.tp_px += 1;
            } else {
                c.fp_px += 1;
            }
        } else if r {
            c.fn_px += 1;
        }
    }
    c
}

pub(crate) fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Quantity, quality and global scores of a [`MatchResult`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentMetrics {
    pub r_quant: f64,
    pub p_quant: f64,
    pub r_qual: f64,
    pub p_qual: f64,
    pub f1_qual: f64,
    pub gr: f64,
    pub gp: f64,
    pub gf1: f64,
}

/// Raw component tallies behind [`ComponentMetrics`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub m: usize,
    pub tp: usize,
    pub fp: usize,
    pub n_detections: usize,
    pub sum_cov: f64,
    pub sum_acc: f64,
}

impl ComponentCounts {
    pub fn of(result: &MatchResult) -> Self {
        let matched = result.per_gt.iter().filter(|g| g.matched);
        let (sum_cov, sum_acc) = matched.fold((0.0, 0.0), |(c, a), g| (c + g.cov, a + g.acc));
        Self {
            m: result.m,
            tp: result.tp,
            fp: result.fp,
            n_detections: result.n_detections,
            sum_cov,
            sum_acc,
        }
    }

    pub fn metrics(&self) -> ComponentMetrics {
        let fdiv = |n: f64, d: usize| if d == 0 { 0.0 } else { n / d as f64 };
        let r_quant = ratio(self.tp, self.m);
        let p_quant = ratio(self.tp, self.tp + self.fp);
        let r_qual = fdiv(self.sum_cov, self.tp);
        let p_qual = fdiv(self.sum_acc, self.tp);
        let gr = fdiv(self.sum_cov, self.m);
        let gp = fdiv(self.sum_acc, self.tp + self.fp);
        ComponentMetrics {
            r_quant,
            p_quant,
            r_qual,
            p_qual,
            f1_qual: harmonic(r_qual, p_qual),
            gr,
            gp,
            gf1: harmonic(gr, gp),
        }
    }
}

pub fn component_metrics(result: &MatchResult) -> ComponentMetrics {
    ComponentCounts::of(result).metrics()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub pixel: PixelScores,
    pub component: ComponentMetrics,
    pub counts: ComponentCounts,
}

/// F1<sub>qual</sub> of a single ground-truth component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentScore {
    pub gt_label: u32,
    pub class: TextClass,
    pub matched: bool,
    pub cov: f64,
    pub acc: f64,
    pub f1_qual: f64,
}

/// Everything measured on one image pair in one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub image_id: String,
    pub mode: Mode,
    pub relax_iterations: usize,
    pub pixel: PixelScores,
    pub component: ComponentMetrics,
    pub counts: ComponentCounts,
    pub per_class: BTreeMap<TextClass, Section>,
    pub per_component_f1: Vec<ComponentScore>,
    /// Degenerate-input markers such as `"no_ground_truth_text"`.
    pub flags: Vec<String>,
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Scalar metrics keyed as `"pf1"`, `"gf1"`, `"easy.gf1"`, ...
    pub fn scalars(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        push_section(&mut out, "", &self.pixel, &self.component);
        for (class, s) in &self.per_class {
            let prefix = match class {
                TextClass::Easy => "easy.",
                TextClass::Hard => "hard.",
                TextClass::NonText => continue,
            };
            push_section(&mut out, prefix, &s.pixel, &s.component);
        }
        out
    }
}

fn push_section(out: &mut BTreeMap<String, f64>, prefix: &str, p: &PixelScores, c: &ComponentMetrics) {
    let entries = [
        ("precision", p.precision),
        ("recall", p.recall),
        ("pf1", p.pf1),
        ("r_quant", c.r_quant),
        ("p_quant", c.p_quant),
        ("r_qual", c.r_qual),
        ("p_qual", c.p_qual),
        ("f1_qual", c.f1_qual),
        ("gr", c.gr),
        ("gp", c.gp),
        ("gf1", c.gf1),
    ];
    for (k, v) in entries {
        out.insert(format!("{prefix}{k}"), v);
    }
}

/// Class of a component: the majority class of its pixels, hard on ties.
fn component_classes(gt: &ClassMask, labels: &LabelMap) -> Vec<TextClass> {
    let n = labels.n_components() as usize;
    let mut votes = vec![(0usize, 0usize); n];
    for (&l, &c) in labels.labels().iter().zip(gt.data()) {
        if l == 0 {
            continue;
        }
        match c {
            TextClass::Easy => votes[l as usize - 1].0 += 1,
            TextClass::Hard => votes[l as usize - 1].1 += 1,
            TextClass::NonText => {}
        }
    }
    votes
        .into_iter()
        .map(|(e, h)| if e > h { TextClass::Easy } else { TextClass::Hard })
        .collect()
}

/// Evaluates a binary prediction against three-class ground truth.
///
/// Relaxed views are built per component, so the dilations of two touching
/// characters keep separate identities. Per-class sections reuse the global
/// pixel attribution and count false positives globally.
pub fn evaluate(
    gt: &ClassMask,
    pred: &BinaryMask,
    mode: Mode,
    relax: RelaxConfig,
    image_id: &str,
) -> Result<MetricsReport> {
    check_dims(gt.dims(), pred.dims())?;
    let text = gt.text_mask();
    let labels = connected_components(&text);
    let classes = component_classes(gt, &labels);
    let views = match mode {
        Mode::Normal => GtViews::normal(labels.clone(), relax.iterations),
        Mode::Relaxed => GtViews::relaxed(labels.clone(), relax.iterations),
    };
    let assignment = watershed_assign(&labels, pred)?;
    let result = match_with_assignment(&views, pred, &assignment);

    let require = views.cov_union();
    let accept = views.acc_union();
    let pixel = PixelScores::from_counts(relaxed_pixel_counts(&require, &accept, pred));
    let counts = ComponentCounts::of(&result);

    let mut per_class = BTreeMap::new();
    for class in [TextClass::Easy, TextClass::Hard] {
        let members: Vec<&GtMatch> = result
            .per_gt
            .iter()
            .filter(|g| classes[g.gt_label as usize - 1] == class)
            .collect();
        let sub = MatchResult {
            tp: members.iter().filter(|g| g.matched).count(),
            m: members.len(),
            fp: result.fp,
            n_detections: result.n_detections,
            per_gt: members.into_iter().cloned().collect(),
        };
        let of_class = |label: u32| classes[label as usize - 1] == class;
        let require_c = views.cov_union_where(of_class);
        let accept_c = views.acc_union_where(of_class);
        // predicted pixels on other classes' truth are neither hits nor
        // false positives for this class
        let other = accept.and(&accept_c.not())?;
        let pred_c = pred.and(&other.not())?;
        let sc = ComponentCounts::of(&sub);
        per_class.insert(
            class,
            Section {
                pixel: PixelScores::from_counts(relaxed_pixel_counts(&require_c, &accept_c, &pred_c)),
                component: sc.metrics(),
                counts: sc,
            },
        );
    }

    let per_component_f1 = result
        .per_gt
        .iter()
        .map(|g| {
            let (cov, acc) = if g.matched { (g.cov, g.acc) } else { (0.0, 0.0) };
            ComponentScore {
                gt_label: g.gt_label,
                class: classes[g.gt_label as usize - 1],
                matched: g.matched,
                cov,
                acc,
                f1_qual: harmonic(cov, acc),
            }
        })
        .collect();

    let mut flags = Vec::new();
    if result.m == 0 {
        flags.push("no_ground_truth_text".to_string());
    }
    if pred.is_empty() {
        flags.push("empty_prediction".to_string());
    }

    Ok(MetricsReport {
        schema_version: SCHEMA_VERSION,
        image_id: image_id.to_string(),
        mode,
        relax_iterations: relax.iterations,
        pixel,
        component: counts.metrics(),
        counts,
        per_class,
        per_component_f1,
        flags,
    })
}

/// Fold name → image ids, as read from a fold manifest.
pub type FoldMap = BTreeMap<String, Vec<String>>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample (n − 1) standard deviation across groups; 0 for a single group.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: 0.0, std: 0.0 };
        }
        // shifted by the first value so identical inputs give their exact value
        let base = values[0];
        let mean = base + values.iter().map(|v| v - base).sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Self { mean, std }
    }
}

impl std::fmt::Display for MeanStd {
    /// Percent with two decimals, spread with one: `72.63 ± 1.8`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.2} ± {:.1}", self.mean * 100.0, self.std * 100.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMeans {
    pub n_reports: usize,
    pub means: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub n_reports: usize,
    pub groups: BTreeMap<String, GroupMeans>,
    pub overall: BTreeMap<String, MeanStd>,
    /// Image ids that no fold claimed.
    pub unassigned: Vec<String>,
}

/// Averages reports within each fold, then reports mean ± sample standard
/// deviation of the fold averages. Keys are prefixed with the mode, e.g.
/// `"relaxed.gf1"`. Without a fold map every report lands in one group.
pub fn aggregate(reports: &[MetricsReport], folds: Option<&FoldMap>) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::Usage("no reports to aggregate".into()));
    }
    let mut buckets: BTreeMap<String, Vec<&MetricsReport>> = BTreeMap::new();
    let mut unassigned = Vec::new();
    for r in reports {
        match folds {
            None => buckets.entry("all".into()).or_default().push(r),
            Some(map) => {
                let mut placed = false;
                for (fold, ids) in map {
                    if ids.iter().any(|id| id == &r.image_id) {
                        buckets.entry(fold.clone()).or_default().push(r);
                        placed = true;
                    }
                }
                if !placed {
                    unassigned.push(r.image_id.clone());
                }
            }
        }
    }
    unassigned.sort();
    unassigned.dedup();

    let mut groups = BTreeMap::new();
    for (name, members) in &buckets {
        let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in members {
            for (k, v) in r.scalars() {
                let e = sums.entry(format!("{}.{k}", r.mode.as_str())).or_default();
                e.0 += v;
                e.1 += 1;
            }
        }
        let means = sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();
        groups.insert(
            name.clone(),
            GroupMeans {
                n_reports: members.len(),
                means,
            },
        );
    }

    let mut per_key: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for g in groups.values() {
        for (k, &v) in &g.means {
            per_key.entry(k.clone()).or_default().push(v);
        }
    }
    let overall = per_key.into_iter().map(|(k, v)| (k, MeanStd::of(&v))).collect();
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        n_reports: reports.len(),
        groups,
        overall,
        unassigned,
    })
}

/// Bin of `value` among `bins` equal-width bins over [0, 1]; 1.0 falls in
/// the last bin.
pub fn bin_index(value: f64, bins: usize) -> usize {
    let v = value.clamp(0.0, 1.0);
    let mut i = ((v * bins as f64) as usize).min(bins - 1);
    // guard against products that round across an edge
    while i > 0 && v < i as f64 / bins as f64 {
        i -= 1;
    }
    while i + 1 < bins && v >= (i + 1) as f64 / bins as f64 {
        i += 1;
    }
    i
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub class: TextClass,
    pub mode: Mode,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

/// Counts of per-component F1<sub>qual</sub> split by class and mode.
#[derive(Clone, Debug, PartialEq)]
pub struct F1Histogram {
    pub bins: usize,
    pub counts: BTreeMap<(TextClass, Mode), Vec<usize>>,
}

impl F1Histogram {
    /// One row per (class, mode, bin), zero counts included.
    pub fn rows(&self) -> Vec<HistogramRow> {
        let mut out = Vec::new();
        for (&(class, mode), counts) in &self.counts {
            for (i, &count) in counts.iter().enumerate() {
                out.push(HistogramRow {
                    class,
                    mode,
                    bin_lo: i as f64 / self.bins as f64,
                    bin_hi: (i + 1) as f64 / self.bins as f64,
                    count,
                });
            }
        }
        out
    }

    pub fn total(&self) -> usize {
        self.counts.values().flatten().sum()
    }
}

pub fn f1_histogram(reports: &[MetricsReport], bins: usize) -> Result<F1Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParam("bins must be >= 1".into()));
    }
    let mut counts = BTreeMap::new();
    for class in [TextClass::Easy, TextClass::Hard] {
        for mode in [Mode::Normal, Mode::Relaxed] {
            counts.insert((class, mode), vec![0usize; bins]);
        }
    }
    for r in reports {
        for c in &r.per_component_f1 {
            if let Some(v) = counts.get_mut(&(c.class, r.mode)) {
                v[bin_index(c.f1_qual, bins)] += 1;
            }
        }
    }
    Ok(F1Histogram { bins, counts })
}
