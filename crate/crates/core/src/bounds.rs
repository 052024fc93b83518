//! Sample-complexity formulas, widget χ² bounds and their numerical check.
//!
//! Regime conditions never raise errors: every result carries the list of
//! conditions it depends on and whether each one held.

use rayon::prelude::*;

use crate::error::{IsingError, Result};
use crate::exact::{grouped_widget, Chi2Method, Enumerator};
use crate::model::{build_widget, WidgetFamily, WidgetSpec};

/// Largest widget evaluated by enumeration during verification.
pub const VERIFY_ENUMERATION_NODES: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub description: String,
    pub held: bool,
}

impl Condition {
    fn new(description: impl Into<String>, held: bool) -> Self {
        Condition { description: description.into(), held }
    }
}

fn all_held(conditions: &[Condition]) -> bool {
    conditions.iter().all(|c| c.held)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// A sample-size bound together with its constant and regime checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub formula: &'static str,
    pub constant: f64,
    pub conditions: Vec<Condition>,
}

impl BoundResult {
    pub fn valid(&self) -> bool {
        all_held(&self.conditions) && self.value.is_finite()
    }
}

/// Inputs shared by the formula evaluators. Unspecified constants default to
/// 1 except where a formula has its own explicit default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub p: usize,
    pub d: usize,
    pub s: usize,
    pub alpha: f64,
    pub beta: f64,
    pub constant: Option<f64>,
    /// Divisor in the `s ≤ p/K` style conditions.
    pub k: f64,
    pub zeta: Option<f64>,
    pub eta: Option<f64>,
}

impl BoundQuery {
    pub fn new(p: usize, d: usize, s: usize, alpha: f64, beta: f64) -> Self {
        BoundQuery { p, d, s, alpha, beta, constant: None, k: 1.0, zeta: None, eta: None }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.zeta = Some(zeta);
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    fn c(&self, default: f64) -> f64 {
        self.constant.unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.s == 0 {
            return Err(IsingError::param("p and s must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(IsingError::param("alpha must be positive and weights finite"));
        }
        if let Some(c) = self.constant {
            if !(c > 0.0 && c.is_finite()) {
                return Err(IsingError::param("constant must be positive"));
            }
        }
        Ok(())
    }

    fn base_conditions(&self) -> Vec<Condition> {
        vec![
            Condition::new("0 < alpha <= beta", self.alpha > 0.0 && self.alpha <= self.beta),
            Condition::new("d < p", self.d < self.p),
        ]
    }
}

fn result(value: f64, kind: BoundKind, formula: &'static str, constant: f64, mut conditions: Vec<Condition>, extra: Vec<Condition>) -> BoundResult {
    conditions.extend(extra);
    BoundResult { value, kind, formula, constant, conditions }
}

/// Structure-learning upper bound; constant defaults to 64.
pub fn sl_upper(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let c = q.c(64.0);
    let (p, d, s) = (q.p as f64, q.d as f64, q.s as f64);
    let value = c * d * (2.0 * q.beta * d).exp() / (q.alpha / 4.0).sinh().powi(2)
        * (1.0 + (p * p / (2.0 * s)).ln() + 1.0 / s);
    Ok(result(
        value,
        BoundKind::Upper,
        "sl-upper",
        c,
        q.base_conditions(),
        vec![Condition::new("s <= p d / 2", s <= p * d / 2.0)],
    ))
}

fn small_s_snr(q: &BoundQuery, c: f64) -> f64 {
    let d = q.d as f64;
    let high = (2.0 * q.beta).exp() / q.alpha.tanh().powi(2);
    let low = (2.0 * q.beta * (d - 3.0)).exp() / (d * d * (q.alpha * q.alpha * d.powi(4)).min(1.0));
    c * high.max(low)
}

fn small_s_conditions(q: &BoundQuery) -> Vec<Condition> {
    let (p, d, s) = (q.p as f64, q.d, q.s);
    vec![Condition::new("20 <= d <= s <= p / K", 20 <= d && d <= s && s as f64 <= p / q.k)]
}

/// GoF lower bound for 20 ≤ d ≤ s ≤ p/K.
pub fn gof_lower_small_s(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, s) = (q.p as f64, q.s as f64);
    let value = small_s_snr(q, c) * (c * p / (s * s)).ln_1p();
    Ok(result(value, BoundKind::Lower, "gof-lower-small-s", c, q.base_conditions(), small_s_conditions(q)))
}

/// EoF companion of [`gof_lower_small_s`].
pub fn eof_lower_small_s(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, s) = (q.p as f64, q.s as f64);
    let value = small_s_snr(q, c) * (c * p / s).ln();
    Ok(result(value, BoundKind::Lower, "eof-lower-small-s", c, q.base_conditions(), small_s_conditions(q)))
}

/// The two temperature regimes for s up to p·d^{1−ζ}/K, for GoF and EoF.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeSBounds {
    pub gof_high_temperature: BoundResult,
    pub gof_low_temperature: BoundResult,
    pub eof_high_temperature: BoundResult,
    pub eof_low_temperature: BoundResult,
}

impl LargeSBounds {
    /// Largest valid GoF bound, if either regime applies.
    pub fn gof(&self) -> Option<f64> {
        best(&[&self.gof_high_temperature, &self.gof_low_temperature])
    }

    pub fn eof(&self) -> Option<f64> {
        best(&[&self.eof_high_temperature, &self.eof_low_temperature])
    }
}

fn best(results: &[&BoundResult]) -> Option<f64> {
    results.iter().filter(|r| r.valid()).map(|r| r.value).reduce(f64::max)
}

pub fn gof_lower_large_s(q: &BoundQuery) -> Result<LargeSBounds> {
    q.validate()?;
    let zeta = q.zeta.ok_or_else(|| IsingError::param("large-s bounds need zeta"))?;
    let c = q.c(1.0);
    let (p, d, s) = (q.p as f64, q.d as f64, q.s as f64);
    let shared = vec![
        Condition::new("0 < zeta < 1", zeta > 0.0 && zeta < 1.0),
        Condition::new("s <= p d^(1-zeta) / K", s <= p * d.powf(1.0 - zeta) / q.k),
        Condition::new("d >= 10", q.d >= 10),
    ];
    let mut high = shared.clone();
    high.push(Condition::new("alpha d^(1-zeta) <= 1/32", q.alpha * d.powf(1.0 - zeta) <= 1.0 / 32.0));
    let mut low = shared;
    low.push(Condition::new("beta d >= 4 log(d - 4)", q.beta * d >= 4.0 * (d - 4.0).ln()));

    let high_snr = c / (d.powf(2.0 - 2.0 * zeta) * q.alpha * q.alpha);
    let low_snr = c * (2.0 * q.beta * d * (1.0 - d.powf(-zeta))).exp() / (d * d * (q.alpha * q.alpha * d.powi(4)).min(1.0));
    let eof_log = (c * p * d.powf(1.0 - zeta) / s).ln_1p();
    let build = |value, formula, conds: &Vec<Condition>| {
        result(value, BoundKind::Lower, formula, c, q.base_conditions(), conds.clone())
    };
    Ok(LargeSBounds {
        gof_high_temperature: build(
            high_snr * (c * p * d.powf(3.0 - 3.0 * zeta) / (s * s)).ln_1p(),
            "gof-lower-large-s-high",
            &high,
        ),
        gof_low_temperature: build(
            low_snr * (c * p * d.powf(2.0 - 3.0 * zeta) / (s * s)).ln_1p(),
            "gof-lower-large-s-low",
            &low,
        ),
        eof_high_temperature: build(high_snr * eof_log, "eof-lower-large-s-high", &high),
        eof_low_temperature: build(low_snr * eof_log, "eof-lower-large-s-low", &low),
    })
}

/// GoF and EoF lower bounds for s ≤ d.
pub fn gof_lower_very_small_s(q: &BoundQuery) -> Result<(BoundResult, BoundResult)> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, d, s) = (q.p as f64, q.d as f64, q.s as f64);
    let high = (2.0 * q.beta).exp() / q.alpha.tanh().powi(2);
    let low = (2.0 * q.beta * (d - 1.0 - 2.0 * s.sqrt())).exp() / (d.powi(6) * (q.alpha * s.sqrt()).sinh().powi(2));
    let snr = c * high.max(low);
    let conds = vec![Condition::new("s <= d", q.s <= q.d)];
    let gof = result(
        snr * (c * (p / (s * s)).min(p / d)).ln_1p(),
        BoundKind::Lower,
        "gof-lower-very-small-s",
        c,
        q.base_conditions(),
        conds.clone(),
    );
    let eof = result(snr * (c * p / d).ln(), BoundKind::Lower, "eof-lower-very-small-s", c, q.base_conditions(), conds);
    Ok((gof, eof))
}

/// Upper bound, GoF lower bound and (when stated) EoF lower bound of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub upper: BoundResult,
    pub lower: BoundResult,
    pub eof_lower: Option<BoundResult>,
}

/// Forests under deletions. `constant` is C for the upper bound and C′ for the lower ones.
pub fn forest_bounds(q: &BoundQuery) -> Result<BoundSet> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, s) = (q.p as f64, q.s as f64);
    let sh2 = q.alpha.sinh().powi(2);
    let upper = result(c * (p / (sh2 * s * s)).max(1.0), BoundKind::Upper, "forest-upper", c, vec![], vec![]);
    let range = vec![Condition::new("s <= p / (32 e)", s <= p / (32.0 * std::f64::consts::E))];
    let lower = result(
        (1.0 / (c * sh2) * (p / (c * s * s)).ln_1p()).max(1.0),
        BoundKind::Lower,
        "forest-lower",
        c,
        vec![],
        range.clone(),
    );
    let eof = result((p / (c * s)).ln() / (c * sh2), BoundKind::Lower, "forest-eof-lower", c, vec![], range);
    Ok(BoundSet { upper, lower, eof_lower: Some(eof) })
}

/// Trees under arbitrary changes.
pub fn tree_bounds(q: &BoundQuery) -> Result<BoundSet> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, s) = (q.p as f64, q.s as f64);
    let tau = q.alpha.tanh();
    let upper = result(
        c * (p / ((1.0 - tau).powi(2) * q.alpha.sinh().powi(2) * s * s)).max(1.0),
        BoundKind::Upper,
        "tree-upper",
        c,
        vec![],
        vec![],
    );
    let lower = result(c / (tau * tau) * (c * p / (s * s)).ln_1p(), BoundKind::Lower, "tree-lower", c, vec![], vec![]);
    Ok(BoundSet { upper, lower, eof_lower: None })
}

/// High-temperature ferromagnets under deletions; `eta` bounds α·d.
pub fn ferro_bounds(q: &BoundQuery) -> Result<BoundSet> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, d, s, a) = (q.p as f64, q.d as f64, q.s as f64, q.alpha);
    let eta_given = q.eta.is_some();
    let eta = q.eta.unwrap_or(f64::NAN);
    let class = vec![
        Condition::new("eta given", eta_given),
        Condition::new("alpha d <= eta < 1", a * d <= eta && eta < 1.0),
    ];
    let upper = result(
        c * (p * d / (a * a * s * s)).max(1.0),
        BoundKind::Upper,
        "ferro-upper",
        c,
        class.clone(),
        vec![],
    );
    let lower_conditions = vec![
        Condition::new("eta <= 1/16", eta <= 1.0 / 16.0),
        Condition::new("s <= c p d", s <= c * p * d),
    ];
    let lower = result(
        c / (a * a * d * d) * (c * p * d.powi(3) / (s * s)).ln_1p(),
        BoundKind::Lower,
        "ferro-lower",
        c,
        class.clone(),
        lower_conditions.clone(),
    );
    let eof = result(
        c / (a * a * d * d) * (c * p * d / s).ln_1p(),
        BoundKind::Lower,
        "ferro-eof-lower",
        c,
        class,
        lower_conditions,
    );
    Ok(BoundSet { upper, lower, eof_lower: Some(eof) })
}

/// Tolerant forest-deletion and tree upper bounds.
pub fn tolerant_bounds(q: &BoundQuery, epsilon: f64) -> Result<(BoundResult, BoundResult)> {
    q.validate()?;
    let c = q.c(1.0);
    let (p, s) = (q.p as f64, q.s as f64);
    let sh2 = q.alpha.sinh().powi(2);
    let tau = q.alpha.tanh();
    let three_way = |gap: f64| c * 1f64.max(p / (sh2 * gap * gap * s * s)).max(1.0 / (gap * gap * s));
    let forest = result(
        three_way(1.0 - epsilon),
        BoundKind::Upper,
        "tolerant-forest-upper",
        c,
        vec![],
        vec![Condition::new("0 <= epsilon < 1", (0.0..1.0).contains(&epsilon))],
    );
    let tree = result(
        three_way(1.0 - 2.0 * epsilon - tau),
        BoundKind::Upper,
        "tolerant-tree-upper",
        c,
        vec![],
        vec![Condition::new(
            "0 <= epsilon < (1 - tanh alpha) / 2",
            epsilon >= 0.0 && epsilon < (1.0 - tau) / 2.0,
        )],
    );
    Ok((forest, tree))
}

/// Which divergence a widget bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// χ²(alternate ‖ null).
    Forward,
    /// χ²(null ‖ alternate).
    Reverse,
}

/// A closed-form upper bound (or identity) on a widget divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct WidgetBound {
    pub direction: Direction,
    pub value: f64,
    /// The bound is an identity rather than an inequality.
    pub equality: bool,
    pub conditions: Vec<Condition>,
}

impl WidgetBound {
    pub fn valid(&self) -> bool {
        all_held(&self.conditions)
    }
}

/// All bounds known for a widget.
pub fn widget_chi2_bounds(spec: &WidgetSpec) -> Result<Vec<WidgetBound>> {
    spec.validate()?;
    let (lam, mu) = (spec.strong, spec.changed);
    let d = spec.size as f64;
    let l = spec.ell as f64;
    let ln_d = d.ln();
    let fwd = |value: f64, conditions: Vec<Condition>| WidgetBound {
        direction: Direction::Forward,
        value,
        equality: false,
        conditions,
    };
    let rev = |value: f64, conditions: Vec<Condition>| WidgetBound {
        direction: Direction::Reverse,
        value,
        equality: false,
        conditions,
    };
    let c = Condition::new;
    let positive_mu = || c("mu > 0", mu > 0.0);
    Ok(match spec.family {
        WidgetFamily::SingleEdge => vec![WidgetBound {
            direction: Direction::Forward,
            value: mu.sinh().powi(2),
            equality: true,
            conditions: vec![],
        }],
        WidgetFamily::Triangle => vec![fwd(
            8.0 * (-2.0 * lam).exp() * mu.tanh().powi(2),
            vec![c("lambda >= |mu| > 0", lam >= mu.abs() && mu != 0.0), positive_mu()],
        )],
        WidgetFamily::Fan => vec![fwd(
            (l * (16.0 * (-2.0 * lam).exp() * mu.tanh().powi(2)).ln_1p()).exp_m1(),
            vec![c("ell <= B", spec.ell <= spec.blades), c("lambda mu >= 0", lam * mu >= 0.0)],
        )],
        WidgetFamily::CliqueMinusEdge => vec![fwd(
            16.0 * (-2.0 * lam * (d - 1.0)).exp() * mu.sinh().powi(2),
            vec![c("lambda d > log d", lam * d > ln_d)],
        )],
        WidgetFamily::CliqueWithHole => {
            let shared = [
                c("lambda >= |mu|", lam >= mu.abs()),
                c("lambda d > 3 log d", lam * d > 3.0 * ln_d),
            ];
            let decay = (-2.0 * lam * (d + 1.0 - l)).exp();
            let mut f = vec![c("ell + 1 <= d / 8", (l + 1.0) <= d / 8.0)];
            f.extend(shared.iter().cloned());
            let mut r = vec![c("ell + 1 <= d / 12", (l + 1.0) <= d / 12.0)];
            r.extend(shared.iter().cloned());
            vec![
                fwd(32.0 * l * decay * (mu * (l - 1.0)).sinh().powi(2), f),
                rev(64.0 * l * decay * (2.0 * mu * (l - 1.0)).sinh().powi(2), r),
            ]
        }
        WidgetFamily::EmmentalerExtraNode => vec![fwd(
            32.0 * d * (-2.0 * lam * (d - 1.0 - l)).exp(),
            vec![
                c("2 <= ell + 1 <= d / 4", spec.ell >= 1 && (l + 1.0) <= d / 4.0),
                c("lambda (d - 4) >= 3 log d", lam * (d - 4.0) >= 3.0 * ln_d),
                c("|mu| <= lambda", mu.abs() <= lam),
                positive_mu(),
            ],
        )],
        WidgetFamily::EmmentalerVsFull => vec![fwd(
            d * d * (mu * mu * d.powi(4)).min(1.0) * (-2.0 * lam * (d - 1.0 - l)).exp(),
            vec![
                c("ell + 1 <= d / 4", (l + 1.0) <= d / 4.0),
                c("lambda (d - 4) >= 3 log d", lam * (d - 4.0) >= 3.0 * ln_d),
                positive_mu(),
            ],
        )],
        WidgetFamily::CliqueVsEmpty => {
            let cond = || vec![c("32 |mu| k <= 1", 32.0 * mu.abs() * d <= 1.0)];
            vec![fwd(8.0 * (mu * d).powi(2), cond()), rev(3.0 * d * d * mu * mu, cond())]
        }
    })
}

/// The forward bound of a widget.
pub fn widget_chi2_bound(spec: &WidgetSpec) -> Result<WidgetBound> {
    widget_chi2_bounds(spec)?
        .into_iter()
        .find(|b| b.direction == Direction::Forward)
        .ok_or_else(|| IsingError::param("widget has no forward bound"))
}

/// 1 + χ² of the triangle widget in closed form.
pub fn triangle_one_plus_chi2(strong: f64, changed: f64) -> f64 {
    1.0 + triangle_chi2(strong, changed)
}

fn triangle_chi2(strong: f64, changed: f64) -> f64 {
    let c2 = (2.0 * strong).cosh();
    let num = c2 * (2.0 * changed.sinh()).powi(2);
    let den = (changed.exp() * c2 + (-changed).exp()).powi(2);
    num / den
}

/// Per-blade factor U of the fan widget; 1 + χ² = U^ell.
pub fn fan_blade_factor(strong: f64, changed: f64) -> f64 {
    let (l, m) = (strong, changed);
    let e = l.exp();
    let ei = (-l).exp();
    let a = (e + ei) * l.cosh();
    let b = e * (l + 2.0 * m).cosh() + ei * (l - 2.0 * m).cosh();
    let c = e * (l + m).cosh() + ei * (l - m).cosh();
    a * b / (c * c)
}

/// Closed-form forward χ² where the widget has one.
pub fn widget_closed_form_chi2(spec: &WidgetSpec) -> Option<f64> {
    match spec.family {
        WidgetFamily::Triangle => Some(triangle_chi2(spec.strong, spec.changed)),
        WidgetFamily::Fan => Some((spec.ell as f64 * fan_blade_factor(spec.strong, spec.changed).ln()).exp_m1()),
        WidgetFamily::SingleEdge => Some(spec.changed.sinh().powi(2)),
        _ => None,
    }
}

/// χ² of a widget in the given direction, by enumeration up to
/// [`VERIFY_ENUMERATION_NODES`] nodes and by group counts beyond.
pub fn exact_widget_chi2(spec: &WidgetSpec, direction: Direction) -> Result<f64> {
    if spec.node_count() <= VERIFY_ENUMERATION_NODES {
        let pair = build_widget(spec)?;
        let (q, p) = match direction {
            Direction::Forward => (&pair.alternate, &pair.null),
            Direction::Reverse => (&pair.null, &pair.alternate),
        };
        Ok(Enumerator::default().chi_square_with(q, p, Chi2Method::Enumeration)?.value())
    } else {
        let (null, alt) = grouped_widget(spec)?;
        let (q, p) = match direction {
            Direction::Forward => (&alt, &null),
            Direction::Reverse => (&null, &alt),
        };
        Ok(q.chi_square_against(p, Chi2Method::Enumeration)?.value())
    }
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub spec: WidgetSpec,
    pub direction: Direction,
    pub exact_chi2: f64,
    pub closed_form: Option<f64>,
    pub bound: f64,
    pub equality: bool,
    pub valid: bool,
    pub failed_conditions: Vec<String>,
}

/// Relative slack allowed for floating-point rounding in comparisons.
const ROUNDING: f64 = 1e-12;

impl VerificationRow {
    /// Report label: family name, with `-rev` for reverse-direction bounds.
    pub fn label(&self) -> String {
        match self.direction {
            Direction::Forward => self.spec.family.name().to_string(),
            Direction::Reverse => format!("{}-rev", self.spec.family.name()),
        }
    }

    /// Exact value respects the bound (or matches it, for identities).
    pub fn pass(&self) -> bool {
        if self.equality {
            (self.exact_chi2 - self.bound).abs() <= ROUNDING * self.bound.abs()
        } else {
            self.exact_chi2 <= self.bound * (1.0 + ROUNDING)
        }
    }

    /// Closed form agrees with the exact value to `rel` relative error.
    pub fn closed_form_matches(&self, rel: f64) -> Option<bool> {
        self.closed_form
            .map(|c| (c - self.exact_chi2).abs() <= rel * c.abs().max(self.exact_chi2.abs()))
    }
}

/// Evaluate every bound of every spec; rows keep the grid order.
pub fn verify_widget_bounds(grid: &[WidgetSpec]) -> Result<Vec<VerificationRow>> {
    let nested: Vec<Vec<VerificationRow>> = grid
        .par_iter()
        .map(|spec| {
            widget_chi2_bounds(spec)?
                .into_iter()
                .map(|b| {
                    let exact = exact_widget_chi2(spec, b.direction)?;
                    let closed_form = match b.direction {
                        Direction::Forward => widget_closed_form_chi2(spec),
                        Direction::Reverse => None,
                    };
                    Ok(VerificationRow {
                        spec: *spec,
                        direction: b.direction,
                        exact_chi2: exact,
                        closed_form,
                        bound: b.value,
                        equality: b.equality,
                        valid: b.valid(),
                        failed_conditions: b
                            .conditions
                            .iter()
                            .filter(|c| !c.held)
                            .map(|c| c.description.clone())
                            .collect(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Grid covering each widget bound's validity region and some points outside it.
pub fn default_verification_grid() -> Vec<WidgetSpec> {
    let mut grid = Vec::new();
    for mu in linspace(-3.0, 3.0, 201) {
        grid.push(WidgetSpec::single_edge(mu));
    }
    for lam in linspace(0.1, 5.0, 20) {
        for j in (-12i32..=15).filter(|&j| j != 0) {
            grid.push(WidgetSpec::triangle(lam, lam * j as f64 / 12.0));
        }
    }
    for blades in 1..=6 {
        for broken in 1..=blades {
            for lam in [0.2, 0.7, 1.5, -0.7] {
                for mu in [0.1, 0.6, 1.2, -0.6] {
                    grid.push(WidgetSpec::fan(lam, mu, blades, broken));
                }
            }
        }
    }
    for d in 2..=13 {
        for lam in linspace(0.2, 3.0, 15) {
            for mu in [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0] {
                grid.push(WidgetSpec::clique_minus_edge(lam, mu, d));
            }
        }
    }
    for d in [12, 24, 36, 48, 60, 72] {
        for ell in (2..=d / 4).filter(|&l| l < d / 8 + 2) {
            for lam in [0.3, 0.5, 1.0, 2.0] {
                for frac in [-1.0, -0.5, -0.25, 0.25, 0.5, 1.0] {
                    grid.push(WidgetSpec::clique_with_hole(lam, lam * frac, d, ell));
                }
            }
        }
    }
    let emmentaler_sizes: [(usize, &[usize]); 6] =
        [(8, &[1]), (12, &[1, 2]), (16, &[1, 3]), (20, &[1, 4]), (24, &[2, 3, 5]), (32, &[3, 7])];
    for (d, ells) in emmentaler_sizes {
        for &ell in ells {
            for lam in [1.0, 1.25, 1.5, 2.0, 2.5, 3.0] {
                for frac in [-1.0, -0.5, 0.1, 0.25, 0.5, 0.75, 1.0] {
                    grid.push(WidgetSpec::emmentaler_extra_node(lam, lam * frac, d, ell));
                    grid.push(WidgetSpec::emmentaler_vs_full(lam, lam * frac, d, ell));
                }
            }
        }
    }
    for k in 2..=14 {
        let edge = 1.0 / (32.0 * k as f64);
        for j in 1..=10 {
            for sign in [-1.0, 1.0] {
                grid.push(WidgetSpec::clique_vs_empty(sign * edge * j as f64 / 10.0, k));
            }
        }
        grid.push(WidgetSpec::clique_vs_empty(2.0 * edge, k));
    }
    grid
}

/// Where κ for the lifted bounds comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaSource {
    /// Exact forward χ² of the widget.
    Exact,
    /// The widget's closed-form bound.
    Bound,
}

/// Lower bounds on n obtained by lifting a widget to p nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedBounds {
    pub n_gof: f64,
    pub n_eof: f64,
    pub kappa: f64,
    pub block_count: usize,
    pub changed_blocks: usize,
    pub sigma: usize,
    pub conditions: Vec<Condition>,
}

impl LiftedBounds {
    pub fn valid(&self) -> bool {
        all_held(&self.conditions)
    }
}

/// n_gof = log(1 + m/t²)/(2 log(1+κ)) and n_eof = log(m/(4000 t))/(2 log(1+κ)),
/// with m = ⌊p/ν⌋ blocks and t = ⌈s/σ⌉ changed blocks.
pub fn lifted_sample_bounds(widget: &WidgetSpec, p: usize, s: usize, source: KappaSource) -> Result<LiftedBounds> {
    let pair = build_widget(widget)?;
    let sigma = pair.sigma();
    if sigma == 0 {
        return Err(IsingError::param("widget models share their structure; sigma = 0"));
    }
    let nu = widget.node_count();
    let m = p / nu;
    if m == 0 {
        return Err(IsingError::param(format!("p = {p} is smaller than the widget ({nu} nodes)")));
    }
    if s == 0 {
        return Err(IsingError::param("s must be at least 1"));
    }
    let t = s.div_ceil(sigma);
    let kappa = match source {
        KappaSource::Exact => exact_widget_chi2(widget, Direction::Forward)?,
        KappaSource::Bound => widget_chi2_bound(widget)?.value,
    };
    lifted_from_kappa(kappa, m, t, sigma)
}

/// The lifted bounds for given κ, m, t.
pub fn lifted_from_kappa(kappa: f64, m: usize, t: usize, sigma: usize) -> Result<LiftedBounds> {
    if kappa.is_nan() || kappa < 0.0 || m == 0 || t == 0 {
        return Err(IsingError::param("need kappa >= 0, m >= 1 and t >= 1"));
    }
    let (mf, tf) = (m as f64, t as f64);
    let scale = 2.0 * kappa.ln_1p();
    Ok(LiftedBounds {
        n_gof: (mf / (tf * tf)).ln_1p() / scale,
        n_eof: (mf / (4000.0 * tf)).ln() / scale,
        kappa,
        block_count: m,
        changed_blocks: t,
        sigma,
        conditions: vec![
            Condition::new("1 <= t < m / (16 e)", tf < mf / (16.0 * std::f64::consts::E)),
            Condition::new("t <= m", t <= m),
        ],
    })
}

/// 1 − sqrt(½ log(1 + χ²)): lower bound on the risk of any test.
pub fn le_cam_lower(chi2: f64) -> f64 {
    1.0 - (0.5 * chi2.ln_1p()).sqrt()
}
