//! Deterministic adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Cells are refined greedily from a priority queue keyed on their local
//! error estimate. In 2-D the worst cells are refined in fixed-size batches
//! whose children are evaluated in parallel; the batch size does not depend on
//! the number of workers, so results are bit-identical for any thread count.
//! Final totals are compensated sums taken in cell-creation order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::{compensated_sum, NeumaierSum};

/// Tolerances and rule selection for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Number of Kronrod points: 15 (G7/K15) or 21 (G10/K21).
    pub rule_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 1 << 20,
            rule_order: 15,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::invalid("rel_tol", format!("must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::invalid("abs_tol", format!("must be non-negative, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        self.rule().map(|_| ())
    }

    fn rule(&self) -> Result<&'static KronrodRule> {
        match self.rule_order {
            15 => Ok(gk15()),
            21 => Ok(gk21()),
            n => Err(Error::invalid("rule_order", format!("supported Kronrod orders are 15 and 21, got {n}"))),
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
    /// False when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }
}

/// A rectangle together with interior break lines for the initial grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub rect: Rect,
    pub u_breaks: Vec<f64>,
    pub v_breaks: Vec<f64>,
}

impl Window {
    pub fn new(rect: Rect) -> Self {
        Self {
            rect,
            u_breaks: Vec::new(),
            v_breaks: Vec::new(),
        }
    }

    pub fn with_breaks(mut self, u_breaks: &[f64], v_breaks: &[f64]) -> Self {
        self.u_breaks.extend_from_slice(u_breaks);
        self.v_breaks.extend_from_slice(v_breaks);
        self
    }

    /// Sorted, deduplicated break list for the `u` axis, endpoints included.
    pub fn u_nodes(&self) -> Vec<f64> {
        nodes(self.rect.u, &self.u_breaks)
    }

    pub fn v_nodes(&self) -> Vec<f64> {
        nodes(self.rect.v, &self.v_breaks)
    }
}

fn nodes((lo, hi): (f64, f64), interior: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = interior.iter().copied().filter(|&s| lo < s && s < hi).collect();
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `int f` over a window.
pub fn try_integrate_window<F>(f: F, window: &Window, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    try_integrate_2d(f, &window.u_nodes(), &window.v_nodes(), spec)
}

/// Axis-aligned rectangle in a parameter plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Rect {
    pub const fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u: (u0, u1), v: (v0, v1) }
    }

    pub fn square(half_width: f64) -> Self {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.0 <= u && u <= self.u.1 && self.v.0 <= v && v <= self.v.1
    }

    pub fn area(&self) -> f64 {
        (self.u.1 - self.u.0) * (self.v.1 - self.v.0)
    }

    /// Common part of two rectangles, `None` when it has empty interior.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.u.0.max(other.u.0),
            self.u.1.min(other.u.1),
            self.v.0.max(other.v.0),
            self.v.1.min(other.v.1),
        );
        (r.u.0 < r.u.1 && r.v.0 < r.v.1).then_some(r)
    }

    fn validate(&self) -> Result<()> {
        let ok = |a: f64, b: f64| a.is_finite() && b.is_finite() && a < b;
        if ok(self.u.0, self.u.1) && ok(self.v.0, self.v.1) {
            Ok(())
        } else {
            Err(Error::invalid("box", format!("need finite bounds with lo < hi, got {self:?}")))
        }
    }
}

/// Gauss-Kronrod pair expanded to full node arrays on [-1, 1].
struct KronrodRule {
    nodes: Vec<f64>,
    kronrod: Vec<f64>,
    /// Zero on Kronrod-only nodes.
    gauss: Vec<f64>,
}

impl KronrodRule {
    /// `xgk`/`wgk` list the non-negative half in decreasing order (center
    /// last); Gauss nodes sit at the odd positions.
    fn expand(xgk: &[f64], wgk: &[f64], wg: &[f64]) -> Self {
        let n = xgk.len();
        let mut nodes = Vec::with_capacity(2 * n - 1);
        let mut kronrod = Vec::with_capacity(2 * n - 1);
        let mut gauss = Vec::with_capacity(2 * n - 1);
        let gauss_weight = |i: usize| if i % 2 == 1 { wg[i / 2] } else { 0.0 };
        for i in 0..n - 1 {
            nodes.push(-xgk[i]);
            kronrod.push(wgk[i]);
            gauss.push(gauss_weight(i));
        }
        nodes.push(0.0);
        kronrod.push(wgk[n - 1]);
        gauss.push(gauss_weight(n - 1));
        for i in (0..n - 1).rev() {
            nodes.push(xgk[i]);
            kronrod.push(wgk[i]);
            gauss.push(gauss_weight(i));
        }
        Self { nodes, kronrod, gauss }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

fn gk15() -> &'static KronrodRule {
    static RULE: OnceLock<KronrodRule> = OnceLock::new();
    RULE.get_or_init(|| {
        KronrodRule::expand(
            &[
                0.991_455_371_120_812_639_206_854_697_526_329,
                0.949_107_912_342_758_524_526_189_684_047_851,
                0.864_864_423_359_769_072_789_712_788_640_926,
                0.741_531_185_599_394_439_863_864_773_280_788,
                0.586_087_235_467_691_130_294_144_845_693_013,
                0.405_845_151_377_397_166_906_606_412_076_961,
                0.207_784_955_007_898_467_600_689_403_773_245,
                0.0,
            ],
            &[
                0.022_935_322_010_529_224_963_732_008_058_970,
                0.063_092_092_629_978_553_290_700_663_189_204,
                0.104_790_010_322_250_183_839_876_322_541_518,
                0.140_653_259_715_525_918_745_189_590_510_238,
                0.169_004_726_639_267_902_826_583_426_598_550,
                0.190_350_578_064_785_409_913_256_402_421_014,
                0.204_432_940_075_298_892_414_161_999_234_649,
                0.209_482_141_084_727_828_012_999_174_891_714,
            ],
            &[
                0.129_484_966_168_869_693_270_611_432_679_082,
                0.279_705_391_489_276_667_901_467_771_423_780,
                0.381_830_050_505_118_944_950_369_775_488_975,
                0.417_959_183_673_469_387_755_102_040_816_327,
            ],
        )
    })
}

fn gk21() -> &'static KronrodRule {
    static RULE: OnceLock<KronrodRule> = OnceLock::new();
    RULE.get_or_init(|| {
        KronrodRule::expand(
            &[
                0.995_657_163_025_808_080_735_527_280_689_003,
                0.973_906_528_517_171_720_077_964_012_084_452,
                0.930_157_491_355_708_226_001_207_180_059_508,
                0.865_063_366_688_984_510_732_096_688_423_493,
                0.780_817_726_586_416_897_063_717_578_345_042,
                0.679_409_568_299_024_406_234_327_365_114_874,
                0.562_757_134_668_604_683_339_000_099_272_694,
                0.433_395_394_129_247_190_799_265_943_165_784,
                0.294_392_862_701_460_198_131_126_603_103_866,
                0.148_874_338_981_631_210_884_826_001_129_720,
                0.0,
            ],
            &[
                0.011_694_638_867_371_874_278_064_396_062_192,
                0.032_558_162_307_964_727_478_818_972_459_390,
                0.054_755_896_574_351_996_031_381_300_244_580,
                0.075_039_674_810_919_952_767_043_140_916_190,
                0.093_125_454_583_697_605_535_065_465_083_366,
                0.109_387_158_802_297_641_899_210_590_325_805,
                0.123_491_976_262_065_851_077_958_109_831_074,
                0.134_709_217_311_473_325_928_054_001_771_707,
                0.142_775_938_577_060_080_797_094_273_138_717,
                0.147_739_104_901_338_491_374_841_515_972_068,
                0.149_445_554_002_916_905_664_936_468_389_821,
            ],
            &[
                0.066_671_344_308_688_137_593_568_809_893_332,
                0.149_451_349_150_580_593_145_776_339_657_697,
                0.219_086_362_515_982_043_995_534_934_228_163,
                0.269_266_719_309_996_355_091_226_921_569_469,
                0.295_524_224_714_752_870_173_892_994_651_338,
            ],
        )
    })
}

/// QUADPACK-style rescaling of the raw |K - G| difference.
fn rescale_error(raw: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = raw.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

#[derive(Clone, Copy, Debug)]
struct Cell1 {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

#[derive(Clone, Copy, Debug)]
struct Cell2 {
    rect: Rect,
    value: f64,
    error: f64,
    split_u: bool,
}

#[derive(PartialEq)]
struct Ranked {
    error: f64,
    id: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn eval_cell_1d<F>(f: &F, rule: &KronrodRule, a: f64, b: f64) -> Result<Cell1>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut samples = [0.0; 21];
    let n = rule.len();
    for i in 0..n {
        let s = c + h * rule.nodes[i];
        let fx = f(s)?;
        if !fx.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: vec![s] });
        }
        samples[i] = fx;
    }
    let samples = &samples[..n];
    let k: f64 = (0..n).map(|i| rule.kronrod[i] * samples[i]).sum();
    let g: f64 = (0..n).map(|i| rule.gauss[i] * samples[i]).sum();
    let resabs: f64 = (0..n).map(|i| rule.kronrod[i] * samples[i].abs()).sum();
    let mean = 0.5 * k;
    let resasc: f64 = (0..n).map(|i| rule.kronrod[i] * (samples[i] - mean).abs()).sum();
    let h = h.abs();
    Ok(Cell1 {
        a,
        b,
        value: k * h,
        error: rescale_error((k - g) * h, resabs * h, resasc * h),
    })
}

/// Adaptive 1-D integral of `f` over `[a, b]`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    try_integrate_1d(|s| Ok(f(s)), &[a, b], spec)
}

/// Adaptive 1-D integral over consecutive pieces `breaks[0]..breaks[n]`, with
/// a fallible integrand.
pub fn try_integrate_1d<F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    check_breaks(breaks, "interval")?;
    let rule = spec.rule()?;
    let mut cells: Vec<Option<Cell1>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = NeumaierSum::new();
    let mut total_err = NeumaierSum::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let cell = eval_cell_1d(&f, rule, w[0], w[1])?;
        evaluations += rule.len();
        total.add(cell.value);
        total_err.add(cell.error);
        heap.push(Ranked { error: cell.error, id: cells.len() });
        cells.push(Some(cell));
    }
    let mut subdivisions = 0;
    let converged = loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.value().abs());
        if total_err.value() <= tol {
            break true;
        }
        if subdivisions >= spec.max_subdivisions {
            break false;
        }
        let Some(worst) = heap.pop() else { break false };
        let cell = cells[worst.id].expect("queued cell is live");
        let mid = 0.5 * (cell.a + cell.b);
        if !(cell.a < mid && mid < cell.b) {
            // at roundoff resolution; leave it out of the queue
            continue;
        }
        cells[worst.id] = None;
        total.add(-cell.value);
        total_err.add(-cell.error);
        for (lo, hi) in [(cell.a, mid), (mid, cell.b)] {
            let child = eval_cell_1d(&f, rule, lo, hi)?;
            evaluations += rule.len();
            total.add(child.value);
            total_err.add(child.error);
            heap.push(Ranked { error: child.error, id: cells.len() });
            cells.push(Some(child));
        }
        subdivisions += 1;
    };
    let live: Vec<Cell1> = cells.into_iter().flatten().collect();
    Ok(Estimate {
        value: compensated_sum(live.iter().map(|c| c.value)),
        error: compensated_sum(live.iter().map(|c| c.error)),
        evaluations,
        subdivisions,
        converged,
    })
}

fn check_breaks(breaks: &[f64], name: &'static str) -> Result<()> {
    if breaks.len() < 2 {
        return Err(Error::invalid(name, "need at least two break points"));
    }
    if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(name, format!("break points must be finite and increasing: {breaks:?}")));
    }
    Ok(())
}

fn eval_cell_2d<F>(f: &F, rule: &KronrodRule, rect: Rect) -> Result<Cell2>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let n = rule.len();
    let (cu, hu) = (0.5 * (rect.u.0 + rect.u.1), 0.5 * (rect.u.1 - rect.u.0));
    let (cv, hv) = (0.5 * (rect.v.0 + rect.v.1), 0.5 * (rect.v.1 - rect.v.0));
    let mut samples = vec![0.0; n * n];
    for i in 0..n {
        let u = cu + hu * rule.nodes[i];
        for j in 0..n {
            let v = cv + hv * rule.nodes[j];
            let fx = f(u, v)?;
            if !fx.is_finite() {
                return Err(Error::NonFiniteIntegrand { at: vec![u, v] });
            }
            samples[i * n + j] = fx;
        }
    }
    let (mut kk, mut gg, mut gk, mut kg, mut resabs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (ki, gi) = (rule.kronrod[i], rule.gauss[i]);
        let (mut row_k, mut row_g, mut row_abs) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let s = samples[i * n + j];
            row_k += rule.kronrod[j] * s;
            row_g += rule.gauss[j] * s;
            row_abs += rule.kronrod[j] * s.abs();
        }
        kk += ki * row_k;
        gg += gi * row_g;
        gk += gi * row_k;
        kg += ki * row_g;
        resabs += ki * row_abs;
    }
    let mean = 0.25 * kk;
    let mut resasc = 0.0;
    for i in 0..n {
        for j in 0..n {
            resasc += rule.kronrod[i] * rule.kronrod[j] * (samples[i * n + j] - mean).abs();
        }
    }
    let jac = (hu * hv).abs();
    Ok(Cell2 {
        rect,
        value: kk * jac,
        error: rescale_error((kk - gg) * jac, resabs * jac, resasc * jac),
        // refine the axis whose Gauss rule disagrees most with Kronrod
        split_u: (kk - gk).abs() >= (kk - kg).abs(),
    })
}

/// Cells refined per 2-D iteration.
const BATCH_2D: usize = 8;

/// Adaptive 2-D integral of `f` over `rect`.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64 + Sync, rect: Rect, spec: &QuadratureSpec) -> Result<Estimate> {
    try_integrate_2d(|u, v| Ok(f(u, v)), &[rect.u.0, rect.u.1], &[rect.v.0, rect.v.1], spec)
}

/// Adaptive 2-D integral over the tensor grid of break points, with a
/// fallible integrand.
pub fn try_integrate_2d<F>(f: F, u_breaks: &[f64], v_breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    check_breaks(u_breaks, "u_breaks")?;
    check_breaks(v_breaks, "v_breaks")?;
    let rule = spec.rule()?;
    let per_cell = rule.len() * rule.len();

    let initial: Vec<Rect> = u_breaks
        .windows(2)
        .flat_map(|wu| v_breaks.windows(2).map(move |wv| Rect::new(wu[0], wu[1], wv[0], wv[1])))
        .collect();
    for r in &initial {
        r.validate()?;
    }
    let evaluated: Result<Vec<Cell2>> = initial.par_iter().map(|&r| eval_cell_2d(&f, rule, r)).collect();

    let mut cells: Vec<Option<Cell2>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = NeumaierSum::new();
    let mut total_err = NeumaierSum::new();
    let mut evaluations = initial.len() * per_cell;
    for cell in evaluated? {
        total.add(cell.value);
        total_err.add(cell.error);
        heap.push(Ranked { error: cell.error, id: cells.len() });
        cells.push(Some(cell));
    }

    let mut subdivisions = 0;
    let converged = loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.value().abs());
        if total_err.value() <= tol {
            break true;
        }
        if subdivisions >= spec.max_subdivisions {
            break false;
        }
        let mut children = Vec::with_capacity(2 * BATCH_2D);
        while children.len() < 2 * BATCH_2D && subdivisions < spec.max_subdivisions {
            let Some(worst) = heap.pop() else { break };
            let cell = cells[worst.id].expect("queued cell is live");
            let r = cell.rect;
            let halves = if cell.split_u {
                let m = 0.5 * (r.u.0 + r.u.1);
                (r.u.0 < m && m < r.u.1).then(|| [Rect::new(r.u.0, m, r.v.0, r.v.1), Rect::new(m, r.u.1, r.v.0, r.v.1)])
            } else {
                let m = 0.5 * (r.v.0 + r.v.1);
                (r.v.0 < m && m < r.v.1).then(|| [Rect::new(r.u.0, r.u.1, r.v.0, m), Rect::new(r.u.0, r.u.1, m, r.v.1)])
            };
            let Some(halves) = halves else { continue };
            cells[worst.id] = None;
            total.add(-cell.value);
            total_err.add(-cell.error);
            children.extend(halves);
            subdivisions += 1;
        }
        if children.is_empty() {
            break false;
        }
        let evaluated: Result<Vec<Cell2>> = children.par_iter().map(|&r| eval_cell_2d(&f, rule, r)).collect();
        evaluations += children.len() * per_cell;
        for cell in evaluated? {
            total.add(cell.value);
            total_err.add(cell.error);
            heap.push(Ranked { error: cell.error, id: cells.len() });
            cells.push(Some(cell));
        }
    };
    let live: Vec<Cell2> = cells.into_iter().flatten().collect();
    Ok(Estimate {
        value: compensated_sum(live.iter().map(|c| c.value)),
        error: compensated_sum(live.iter().map(|c| c.error)),
        evaluations,
        subdivisions,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-12)
    }

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for (rule, kdeg, gdeg) in [(gk15(), 22, 13), (gk21(), 31, 19)] {
            let wsum: f64 = rule.kronrod.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            for deg in 0..=kdeg {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let k: f64 = rule.nodes.iter().zip(&rule.kronrod).map(|(x, w)| w * x.powi(deg)).sum();
                assert!((k - exact).abs() < 1e-14, "kronrod degree {deg}: {k} vs {exact}");
                if deg <= gdeg {
                    let g: f64 = rule.nodes.iter().zip(&rule.gauss).map(|(x, w)| w * x.powi(deg)).sum();
                    assert!((g - exact).abs() < 1e-14, "gauss degree {deg}: {g} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn rational_closed_form() {
        // antiderivative y/(2(1+y^2)) + atan(y)/2
        let est = integrate_1d(|y| 1.0 / (1.0 + y * y).powi(2), -1.0, 1.0, &tight()).unwrap();
        assert!((est.value - (PI + 2.0) / 4.0).abs() < 1e-10);
        assert!(est.converged);
    }

    #[test]
    fn zero_integrand() {
        let est = integrate_1d(|_| 0.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.error, 0.0);
    }

    #[test]
    fn truncated_lorentzian_square() {
        // (a/2) / (1 + a y^2 / 2)^2 over R is sqrt(a/2) pi/2; at a = 2 that is pi/2
        let a = 2.0;
        let f = |y: f64| (a / 2.0) / (1.0 + a * y * y / 2.0).powi(2);
        let l = 1e4;
        let est = integrate_1d(f, -l, l, &tight()).unwrap();
        // tail beyond |y| > L is below 2 * int_L^inf y^-4 dy
        let tail = 2.0 / (3.0 * l * l * l);
        assert!((est.value - PI / 2.0).abs() < tail + 10.0 * est.error);
    }

    #[test]
    fn non_finite_sample_is_a_domain_error() {
        let err = integrate_1d(|y| 1.0 / y, -1.0, 1.0, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn bad_specs_rejected() {
        let f = |y: f64| y;
        assert!(integrate_1d(f, 0.0, 1.0, &QuadratureSpec::default().with_rel_tol(0.0)).is_err());
        assert!(integrate_1d(f, 0.0, 1.0, &QuadratureSpec::default().with_max_subdivisions(0)).is_err());
        let spec = QuadratureSpec { rule_order: 9, ..Default::default() };
        assert!(integrate_1d(f, 0.0, 1.0, &spec).is_err());
        assert!(integrate_1d(f, 1.0, 0.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn unit_square() {
        let est = integrate_2d(|_, _| 1.0, Rect::new(0.0, 1.0, 0.0, 1.0), &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_matches_product_of_1d() {
        let fu = |u: f64| (0.3 * u).exp() / (1.0 + u * u);
        let fv = |v: f64| (1.0 + v * v).powf(-1.5);
        let spec = tight();
        let iu = integrate_1d(fu, -2.0, 3.0, &spec).unwrap();
        let iv = integrate_1d(fv, -4.0, 1.0, &spec).unwrap();
        let i2 = integrate_2d(|u, v| fu(u) * fv(v), Rect::new(-2.0, 3.0, -4.0, 1.0), &spec).unwrap();
        assert!((i2.value - iu.value * iv.value).abs() < 1e-12 * i2.value.abs());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-15).with_max_subdivisions(2);
        let est = integrate_1d(|y| (50.0 * y).sin().abs(), 0.0, 10.0, &spec).unwrap();
        assert!(!est.converged);
        assert_eq!(est.subdivisions, 2);
    }

    #[test]
    fn gk21_agrees_with_gk15() {
        let f = |u: f64, v: f64| (u * v).cos() / (1.0 + u * u + v * v);
        let r = Rect::new(-2.0, 2.0, -1.0, 3.0);
        let a = integrate_2d(f, r, &tight()).unwrap();
        let b = integrate_2d(f, r, &QuadratureSpec { rule_order: 21, ..tight() }).unwrap();
        assert!((a.value - b.value).abs() < 1e-11);
    }
}
