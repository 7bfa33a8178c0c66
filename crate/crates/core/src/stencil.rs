//! Exact order-condition analysis of one- and two-step formulas.
//!
//! A [`Stencil`] describes
//!
//! ```text
//! y[n+1] = d₀·y[n] + d₁·y[n-1]
//!        + h ·(w₀·y'[n+1] + w₁·y'[n] + w₂·y'[n-1])
//!        + h²·(a₀·y''[n+1] + a₁·y''[n] + a₂·y''[n-1])
//! ```
//!
//! where `y` is the solved field (displacement, or velocity for the paired
//! velocity formulas). Everything here is computed in exact rationals.
//!
//! The Taylor residual expands every node about `t[n]` and collects, for each
//! `k`, the coefficient `r_k` of `h^k·y^(k)(t[n])` in `RHS - LHS`. A formula
//! with local error `O(h^{p+1})` has `r_k = 0` for `k ≤ p`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i128>;

/// Shorthand for the rational `num/den`.
pub fn q(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Node offsets from `t[n]` in units of `h`, ordered `(n+1, n, n-1)`.
const OFFSETS: [i128; 3] = [1, 0, -1];

/// Highest monomial degree probed by [`exactness_degree`].
pub const MAX_PROBE_DEGREE: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    Predictor,
    Corrector,
    OneStep,
}

impl fmt::Display for StencilKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StencilKind::Predictor => "predictor",
            StencilKind::Corrector => "corrector",
            StencilKind::OneStep => "one-step",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    pub kind: StencilKind,
    /// Weights on `y[n]`, `y[n-1]`.
    pub displacement: [Rational; 2],
    /// Weights on `h·y'` at `n+1`, `n`, `n-1`.
    pub velocity: [Rational; 3],
    /// Weights on `h²·y''` at `n+1`, `n`, `n-1`.
    pub acceleration: Option<[Rational; 3]>,
    /// Claimed order `p`: local error `O(h^{p+1})`.
    pub claimed_order: u32,
}

impl Stencil {
    pub fn new(
        kind: StencilKind,
        displacement: [Rational; 2],
        velocity: [Rational; 3],
        acceleration: Option<[Rational; 3]>,
        claimed_order: u32,
    ) -> Self {
        Stencil {
            kind,
            displacement,
            velocity,
            acceleration,
            claimed_order,
        }
    }

    fn accel_or_zero(&self) -> [Rational; 3] {
        self.acceleration.unwrap_or([Rational::zero(); 3])
    }

    /// Sum of the displacement weights.
    pub fn displacement_weight(&self) -> Rational {
        self.displacement.iter().sum()
    }

    /// Sum of the velocity weights (the total weight on `h·y'`).
    pub fn velocity_weight(&self) -> Rational {
        self.velocity.iter().sum()
    }

    /// Sum of the acceleration weights (the total weight on `h²·y''`).
    pub fn acceleration_weight(&self) -> Rational {
        self.accel_or_zero().iter().sum()
    }

    /// Checks the structural invariants for the stencil's kind.
    pub fn validate(&self) -> Result<(), String> {
        let zero = Rational::zero();
        let a = self.accel_or_zero();
        match self.kind {
            StencilKind::Predictor => {
                if self.velocity[0] != zero || a[0] != zero {
                    return Err("a predictor may not use node n+1".into());
                }
            }
            StencilKind::OneStep => {
                if self.displacement != [Rational::one(), zero]
                    || self.velocity[2] != zero
                    || a[2] != zero
                {
                    return Err("a one-step formula may only use nodes n and n+1".into());
                }
            }
            StencilKind::Corrector => {}
        }
        if self.displacement_weight() != Rational::one() {
            return Err("displacement weights must sum to 1".into());
        }
        Ok(())
    }
}

/// Coefficients `r_0..=r_K` of the Taylor residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorResidual {
    pub coeffs: Vec<Rational>,
}

impl TaylorResidual {
    /// Largest `p` with `r_k = 0` for all `k ≤ p`, or `None` if `r_0 ≠ 0`.
    pub fn order(&self) -> Option<u32> {
        let first_nonzero = self.coeffs.iter().position(|r| !r.is_zero());
        match first_nonzero {
            Some(0) => None,
            Some(k) => Some(k as u32 - 1),
            None => Some(self.coeffs.len() as u32 - 1),
        }
    }

    pub fn vanishes_through(&self, p: u32) -> bool {
        self.coeffs
            .iter()
            .take(p as usize + 1)
            .all(|r| r.is_zero())
    }
}

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// `s^e / e!` with `0^0 = 1`.
fn taylor_term(s: i128, e: u32) -> Rational {
    Rational::from_integer(s.pow(e)) / Rational::from_integer(factorial(e))
}

/// Coefficients of `r_k` as an affine function of the six derivative weights
/// `(w₀, w₁, w₂, a₀, a₁, a₂)`, plus the part contributed by the displacement
/// weights and the left-hand side.
fn residual_row(displacement: &[Rational; 2], k: u32) -> ([Rational; 6], Rational) {
    let mut row = [Rational::zero(); 6];
    for (j, &s) in OFFSETS.iter().enumerate() {
        if k >= 1 {
            row[j] = taylor_term(s, k - 1);
        }
        if k >= 2 {
            row[3 + j] = taylor_term(s, k - 2);
        }
    }
    let mut constant = displacement[1] * taylor_term(-1, k) - taylor_term(1, k);
    if k == 0 {
        constant += displacement[0];
    }
    (row, constant)
}

/// Taylor residual coefficients `r_0..=r_{max_order}`.
pub fn taylor_residual(s: &Stencil, max_order: u32) -> TaylorResidual {
    let a = s.accel_or_zero();
    let weights = [
        s.velocity[0],
        s.velocity[1],
        s.velocity[2],
        a[0],
        a[1],
        a[2],
    ];
    let coeffs = (0..=max_order)
        .map(|k| {
            let (row, constant) = residual_row(&s.displacement, k);
            row.iter()
                .zip(weights.iter())
                .fold(constant, |acc, (c, w)| acc + c * w)
        })
        .collect();
    TaylorResidual { coeffs }
}

/// Value produced by the stencil for `y(t) = t^k`, with `y[n-1]` at `t = 0`,
/// `y[n]` at `t = h` and `y[n+1]` at `t = 2h`, and `h = 1` (every term scales
/// as `h^k`, so this is exact for symbolic `h`).
pub fn apply_to_monomial(s: &Stencil, k: u32) -> Rational {
    let node_t: [i128; 3] = [2, 1, 0];
    let value = |t: i128| Rational::from_integer(t.pow(k));
    let first = |t: i128| {
        if k == 0 {
            Rational::zero()
        } else {
            Rational::from_integer(k as i128 * t.pow(k - 1))
        }
    };
    let second = |t: i128| {
        if k < 2 {
            Rational::zero()
        } else {
            Rational::from_integer((k * (k - 1)) as i128 * t.pow(k - 2))
        }
    };
    let a = s.accel_or_zero();
    let mut out = s.displacement[0] * value(node_t[1]) + s.displacement[1] * value(node_t[2]);
    for j in 0..3 {
        out += s.velocity[j] * first(node_t[j]) + a[j] * second(node_t[j]);
    }
    out
}

/// Largest `d` such that the stencil reproduces every monomial `t^k`, `k ≤ d`,
/// exactly. `None` if it fails on constants. Probing stops at
/// [`MAX_PROBE_DEGREE`].
pub fn exactness_degree(s: &Stencil) -> Option<u32> {
    let mut degree = None;
    for k in 0..=MAX_PROBE_DEGREE {
        let exact = Rational::from_integer(2i128.pow(k));
        if apply_to_monomial(s, k) != exact {
            break;
        }
        degree = Some(k);
    }
    degree
}

// ---------------------------------------------------------------------------
// Weight solving
// ---------------------------------------------------------------------------

/// A stencil with some derivative weights left free (`None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialStencil {
    pub kind: StencilKind,
    pub displacement: [Rational; 2],
    pub velocity: [Option<Rational>; 3],
    /// `None` means the formula carries no acceleration terms at all.
    pub acceleration: Option<[Option<Rational>; 3]>,
}

/// Required total weights on displacement, `h·y'` and `h²·y''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightTargets {
    pub displacement: Rational,
    pub velocity: Rational,
    pub acceleration: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `r_k = 0`.
    Residual(u32),
    DisplacementSum,
    VelocitySum,
    AccelerationSum,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Residual(k) => write!(f, "r_{k} = 0"),
            Condition::DisplacementSum => f.write_str("displacement weight sum"),
            Condition::VelocitySum => f.write_str("velocity weight sum"),
            Condition::AccelerationSum => f.write_str("acceleration weight sum"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// No weights satisfy all conditions. `violated` lists the conditions
    /// left unmet when the weight sums are imposed first and residuals are
    /// then added in increasing order.
    Inconsistent { violated: Vec<Condition> },
    /// The conditions leave `free` degrees of freedom undetermined.
    RankDeficient { free: usize },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::Inconsistent { violated } => {
                let list: Vec<String> = violated.iter().map(|c| c.to_string()).collect();
                write!(f, "inconsistent conditions: {}", list.join(", "))
            }
            Infeasibility::RankDeficient { free } => {
                write!(f, "underdetermined: {free} free weight(s) remain")
            }
        }
    }
}

impl std::error::Error for Infeasibility {}

struct LinearRow {
    coeffs: Vec<Rational>,
    rhs: Rational,
    label: Condition,
}

enum LinearSolution {
    Unique(Vec<Rational>),
    Underdetermined(usize),
    Inconsistent,
}

/// Exact Gauss–Jordan elimination.
fn solve_linear(rows: &[LinearRow], n: usize) -> LinearSolution {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut v = r.coeffs.clone();
            v.push(r.rhs);
            v
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for e in m[r].iter_mut() {
            *e *= inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c];
                for (e, &p) in row.iter_mut().zip(&pivot_row).take(n + 1) {
                    *e -= factor * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    if pivot_cols.len() < n {
        return LinearSolution::Underdetermined(n - pivot_cols.len());
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][n];
    }
    LinearSolution::Unique(x)
}

/// Solves the order conditions `r_k = 0, k ≤ order_goal` together with the
/// weight-sum targets for the free weights of `fixed`.
///
/// The returned stencil is tagged with `claimed_order = order_goal`.
pub fn solve_weights(
    fixed: &PartialStencil,
    targets: WeightTargets,
    order_goal: u32,
) -> Result<Stencil, Infeasibility> {
    // slot j < 3: velocity weight j; slot j ≥ 3: acceleration weight j - 3
    let mut slots: [Option<Option<Rational>>; 6] = [None; 6];
    for j in 0..3 {
        slots[j] = Some(fixed.velocity[j]);
        if let Some(acc) = &fixed.acceleration {
            slots[3 + j] = Some(acc[j]);
        }
    }
    let unknowns: Vec<usize> = (0..6)
        .filter(|&j| matches!(slots[j], Some(None)))
        .collect();
    let known = |j: usize| -> Rational {
        match slots[j] {
            Some(Some(w)) => w,
            _ => Rational::zero(),
        }
    };

    let mut rows = Vec::new();
    let mut push_row = |full: [Rational; 6], constant: Rational, rhs: Rational, label| {
        // Σ full_j w_j + constant = rhs, with known weights moved to the right
        let mut rhs = rhs - constant;
        let mut coeffs = Vec::with_capacity(unknowns.len());
        for j in 0..6 {
            match slots[j] {
                Some(None) => coeffs.push(full[j]),
                _ => rhs -= full[j] * known(j),
            }
        }
        rows.push(LinearRow { coeffs, rhs, label });
    };

    for k in 0..=order_goal {
        let (row, constant) = residual_row(&fixed.displacement, k);
        push_row(row, constant, Rational::zero(), Condition::Residual(k));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let d_sum: Rational = fixed.displacement.iter().sum();
    push_row([zero; 6], d_sum, targets.displacement, Condition::DisplacementSum);
    push_row(
        [one, one, one, zero, zero, zero],
        zero,
        targets.velocity,
        Condition::VelocitySum,
    );
    if let Some(acc_target) = targets.acceleration {
        push_row(
            [zero, zero, zero, one, one, one],
            zero,
            acc_target,
            Condition::AccelerationSum,
        );
    }

    let n = unknowns.len();
    match solve_linear(&rows, n) {
        LinearSolution::Unique(sol) => {
            let mut full: [Rational; 6] = std::array::from_fn(known);
            for (idx, &j) in unknowns.iter().enumerate() {
                full[j] = sol[idx];
            }
            Ok(Stencil {
                kind: fixed.kind,
                displacement: fixed.displacement,
                velocity: [full[0], full[1], full[2]],
                acceleration: fixed
                    .acceleration
                    .as_ref()
                    .map(|_| [full[3], full[4], full[5]]),
                claimed_order: order_goal,
            })
        }
        LinearSolution::Underdetermined(free) => Err(Infeasibility::RankDeficient { free }),
        LinearSolution::Inconsistent => {
            // weight sums take priority, then residuals from low order up
            let mut order: Vec<usize> = (0..rows.len())
                .filter(|&i| !matches!(rows[i].label, Condition::Residual(_)))
                .collect();
            order.extend((0..rows.len()).filter(|&i| matches!(rows[i].label, Condition::Residual(_))));
            let mut kept: Vec<LinearRow> = Vec::new();
            let mut violated = Vec::new();
            for i in order {
                let r = &rows[i];
                kept.push(LinearRow {
                    coeffs: r.coeffs.clone(),
                    rhs: r.rhs,
                    label: r.label,
                });
                if matches!(solve_linear(&kept, n), LinearSolution::Inconsistent) {
                    kept.pop();
                    violated.push(r.label);
                }
            }
            Err(Infeasibility::Inconsistent { violated })
        }
    }
}

// ---------------------------------------------------------------------------
// Catalogue
// ---------------------------------------------------------------------------

/// A catalogued formula, stored with its printed coefficients.
#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub stencil: Stencil,
    /// The solvers rely on this formula meeting its claimed order.
    pub order_verified: bool,
}

fn two_step_displacement() -> [Rational; 2] {
    [q(4, 3), q(-1, 3)]
}

fn one_step_displacement() -> [Rational; 2] {
    [q(1, 1), q(0, 1)]
}

fn zero() -> Rational {
    Rational::zero()
}

pub fn heun_predictor() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [zero(), q(1, 1), zero()],
        None,
        1,
    )
}

pub fn heun_corrector() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [q(1, 2), q(1, 2), zero()],
        None,
        2,
    )
}

pub fn bdf2_predictor() -> Stencil {
    Stencil::new(
        StencilKind::Predictor,
        two_step_displacement(),
        [zero(), q(4, 3), q(-2, 3)],
        None,
        2,
    )
}

pub fn bdf2_corrector() -> Stencil {
    Stencil::new(
        StencilKind::Corrector,
        two_step_displacement(),
        [q(2, 3), zero(), zero()],
        None,
        2,
    )
}

pub fn taylor_startup_predictor() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [zero(), q(1, 1), zero()],
        Some([zero(), q(1, 2), zero()]),
        2,
    )
}

pub fn jerk_startup_corrector() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [q(1, 2), q(1, 2), zero()],
        Some([q(-1, 12), q(1, 12), zero()]),
        3,
    )
}

pub fn second_order_predictor() -> Stencil {
    Stencil::new(
        StencilKind::Predictor,
        two_step_displacement(),
        [zero(), q(1, 2), q(1, 6)],
        Some([zero(), q(31, 36), q(-1, 36)]),
        3,
    )
}

pub fn type1_corrector() -> Stencil {
    Stencil::new(
        StencilKind::Corrector,
        two_step_displacement(),
        [q(1, 9), q(5, 9), zero()],
        Some([q(2, 9), q(6, 9), zero()]),
        3,
    )
}

pub fn type2_corrector() -> Stencil {
    Stencil::new(
        StencilKind::Corrector,
        two_step_displacement(),
        [q(-1, 36), q(22, 36), q(3, 36)],
        Some([q(2, 36), q(27, 36), q(-1, 36)]),
        3,
    )
}

pub fn averaged_corrector() -> Stencil {
    Stencil::new(
        StencilKind::Corrector,
        two_step_displacement(),
        [q(1, 24), q(14, 24), q(1, 24)],
        Some([q(10, 72), q(51, 72), q(-1, 72)]),
        3,
    )
}

/// Velocity predictor of the dynamic startup step, `v₁ = v₀ + h·a₀`.
pub fn velocity_startup_predictor() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [zero(), q(1, 1), zero()],
        None,
        2,
    )
}

/// Velocity corrector of the dynamic startup step (trapezoidal in `a`).
pub fn velocity_startup_corrector() -> Stencil {
    Stencil::new(
        StencilKind::OneStep,
        one_step_displacement(),
        [q(1, 2), q(1, 2), zero()],
        None,
        3,
    )
}

/// BDF2-shaped velocity predictor of the dynamic two-step method.
pub fn velocity_predictor() -> Stencil {
    Stencil::new(
        StencilKind::Predictor,
        two_step_displacement(),
        [zero(), q(4, 3), q(-2, 3)],
        None,
        3,
    )
}

/// BDF2-shaped velocity corrector of the dynamic two-step method.
pub fn velocity_corrector() -> Stencil {
    Stencil::new(
        StencilKind::Corrector,
        two_step_displacement(),
        [q(2, 3), zero(), zero()],
        None,
        3,
    )
}

/// All formulas used by the solvers, with their printed coefficients and
/// printed order labels.
pub fn catalogue() -> Vec<CatalogueEntry> {
    let entry = |name, description, stencil, order_verified| CatalogueEntry {
        name,
        description,
        stencil,
        order_verified,
    };
    vec![
        entry("heun-predictor", "first-order startup predictor (forward Euler)", heun_predictor(), true),
        entry("heun-corrector", "first-order startup corrector (trapezoidal rule)", heun_corrector(), true),
        entry("bdf2-predictor", "first-order two-step predictor", bdf2_predictor(), true),
        entry("bdf2-corrector", "first-order two-step corrector (BDF2)", bdf2_corrector(), true),
        entry("taylor-startup-predictor", "second-order startup predictor", taylor_startup_predictor(), true),
        entry("jerk-startup-corrector", "second-order startup corrector", jerk_startup_corrector(), true),
        entry("second-order-predictor", "second-order two-step predictor", second_order_predictor(), true),
        entry("type1-corrector", "second-order type #1 corrector", type1_corrector(), false),
        entry("type2-corrector", "second-order type #2 corrector", type2_corrector(), true),
        entry("averaged-corrector", "mean of the type #1 and #2 correctors", averaged_corrector(), false),
        entry("velocity-startup-predictor", "dynamic startup velocity predictor", velocity_startup_predictor(), false),
        entry("velocity-startup-corrector", "dynamic startup velocity corrector", velocity_startup_corrector(), false),
        entry("velocity-predictor", "dynamic two-step velocity predictor", velocity_predictor(), false),
        entry("velocity-corrector", "dynamic two-step velocity corrector", velocity_corrector(), false),
    ]
}

/// One row of the verification table.
#[derive(Debug, Clone)]
pub struct VerificationRow {
    pub name: &'static str,
    pub claimed_order: u32,
    pub residual: TaylorResidual,
    pub exactness_degree: Option<u32>,
    pub order_verified: bool,
}

impl VerificationRow {
    pub fn meets_claim(&self) -> bool {
        self.exactness_degree
            .is_some_and(|d| d >= self.claimed_order)
    }
}

/// Residuals `r_0..r_4` and exactness degree for every catalogued formula.
pub fn verify_catalogue() -> Vec<VerificationRow> {
    catalogue()
        .into_iter()
        .map(|e| VerificationRow {
            name: e.name,
            claimed_order: e.stencil.claimed_order,
            residual: taylor_residual(&e.stencil, 4),
            exactness_degree: exactness_degree(&e.stencil),
            order_verified: e.order_verified,
        })
        .collect()
}

/// Formats a rational compactly, e.g. `0`, `-2/9`, `1`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!(
            "{}{}/{}",
            if r.is_negative() { "-" } else { "" },
            r.numer().abs(),
            r.denom()
        )
    }
}
