//! Closed-form rates, the cut-set converse and gap reports.
//!
//! The upper-bound curves are lower convex envelopes taken over the integer
//! `t` memory points `M_t = tm/n`, `t = 0..=n`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coloring::SolverLimits;
use crate::error::{Error, Result};
use crate::model::{memory_share_points, RequestMatrix, SystemParams};
use crate::rational::{self, from_usize, Rational};
use crate::sweep::{self, Execution};

/// Lower convex hull of `points` (any order, distinct abscissae) evaluated at
/// `x` by linear interpolation. `x` must lie within the abscissa range.
pub fn lower_hull_at(points: &[(Rational, Rational)], x: &Rational) -> Rational {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    let cross = |o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)| {
        (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
    };
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    for pair in hull.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if *x >= a.0 && *x <= b.0 {
            let s = (x - &a.0) / (&b.0 - &a.0);
            return &a.1 + s * (&b.1 - &a.1);
        }
    }
    assert!(hull.len() == 1 && hull[0].0 == *x, "query outside hull range");
    hull[0].1.clone()
}

/// `min{ scale * (n - t)/(1 + t), m - M_t }` at every integer `t`.
fn capped_points(params: &SystemParams, scale: usize) -> Vec<(Rational, Rational)> {
    let n = params.users;
    (0..=n)
        .map(|t| {
            let memory = params.memory_at(t);
            let coded = from_usize(scale * (n - t)) / from_usize(1 + t);
            let cap = from_usize(params.files) - &memory;
            (memory, coded.min(cap))
        })
        .collect()
}

/// Single-request rate: lower convex envelope of
/// `min{ n(1 - M/m)/(1 + nM/m), m - M }`.
pub fn rate_mn(params: &SystemParams) -> Rational {
    lower_hull_at(&capped_points(params, 1), &params.memory)
}

/// The single-request scheme run once per request.
pub fn rate_direct(params: &SystemParams) -> Rational {
    from_usize(params.requests) * rate_mn(params)
}

/// Upper bound on the coloring scheme: lower convex envelope of
/// `min{ Ln(1 - M/m)/(1 + nM/m), m - M }`.
pub fn rate_lc_ub(params: &SystemParams) -> Rational {
    lower_hull_at(&capped_points(params, params.requests), &params.memory)
}

/// Cut-set lower bound
/// `max{ max_s (Ls - sM / floor(floor(m/L)/s)), (m - M)/ceil(m/L) }`
/// over `s = 1..=min(floor(m/L), n)`, clamped at zero.
pub fn rate_lower_bound(params: &SystemParams) -> Rational {
    let (n, m, l) = (params.users, params.files, params.requests);
    let groups = m / l;
    let mut best = (from_usize(m) - &params.memory) / from_usize(m.div_ceil(l));
    for s in 1..=groups.min(n) {
        let per = groups / s;
        let value = from_usize(l * s) - from_usize(s) * &params.memory / from_usize(per);
        if value > best {
            best = value;
        }
    }
    best.max(Rational::zero())
}

/// Which demands an exact rate is taken over.
#[derive(Clone, Debug)]
pub enum Demands {
    Single(RequestMatrix),
    WorstCase,
}

/// Knobs for the exact and random-linear evaluations.
#[derive(Clone, Debug)]
pub struct ExactOptions {
    pub limits: SolverLimits,
    /// Force one color per packet instead of coloring vertices freely.
    pub packet_consistent: bool,
    pub max_demands: usize,
    pub execution: Execution,
    /// Trials per `nu` for the random linear baseline.
    pub random_trials: usize,
    /// Field degree for the random linear baseline.
    pub random_degree: u32,
    pub seed: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            limits: SolverLimits::default(),
            packet_consistent: false,
            max_demands: 1_000_000,
            execution: Execution::default(),
            random_trials: 4,
            random_degree: 16,
            seed: 0,
        }
    }
}

/// Lower convex envelope, over the integer-`t` memory points, of a rate
/// evaluated at each of them. Splitting every file between the placements
/// of any two integer points realizes the chord between their rates, so the
/// envelope is achievable at every `M`.
fn shared_envelope<F>(params: &SystemParams, mut at_integer_t: F) -> Result<Rational>
where
    F: FnMut(&SystemParams) -> Result<Rational>,
{
    let points = (0..=params.users)
        .map(|t| {
            let point = params.with_memory(params.memory_at(t))?;
            let rate = at_integer_t(&point)?;
            Ok((point.memory, rate))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(lower_hull_at(&points, &params.memory))
}

/// `chi_l / C(n, t)` for one request matrix, or its worst case over all
/// request matrices, taken at every integer `t` and memory-shared.
pub fn achievable_rate_exact(params: &SystemParams, demands: &Demands, options: &ExactOptions) -> Result<Rational> {
    shared_envelope(params, |p| match demands {
        Demands::Single(f) => sweep::exact_rate(p, f, options),
        Demands::WorstCase => Ok(sweep::worst_case_exact(p, options)?.rate),
    })
}

/// Worst-case random linear coding rate on the placement at `M`: the
/// integer-`t` placement itself, or the two neighbouring ones shared.
pub fn random_linear_worst_rate(params: &SystemParams, options: &ExactOptions) -> Result<Rational> {
    let mut total = Rational::zero();
    for (memory, weight) in memory_share_points(params) {
        total += weight * sweep::worst_case_random_linear(&params.with_memory(memory)?, options)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub params: SystemParams,
    /// The request matrix, when the exact rates are for a single one rather
    /// than the worst case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<Vec<usize>>>,
    /// Worst-case coloring rate, memory-shared over all integer `t`.
    #[serde(with = "rational::serde_str::option")]
    pub r_exact: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub r_mn: Rational,
    #[serde(with = "rational::serde_str")]
    pub r_direct: Rational,
    #[serde(with = "rational::serde_str")]
    pub r_lc_ub: Rational,
    /// Worst-case random linear rate on the placement at `M`.
    #[serde(with = "rational::serde_str::option")]
    pub r_rand: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub r_lb: Rational,
    /// Achievable rate used (exact when computed, else the envelope bound)
    /// over the lower bound; 1 when both are zero.
    #[serde(with = "rational::serde_str")]
    pub gap: Rational,
}

impl RateReport {
    /// The achievable value the gap is computed from.
    pub fn achievable(&self) -> &Rational {
        self.r_exact.as_ref().unwrap_or(&self.r_lc_ub)
    }

    /// `r_lb <= r_exact <= r_lc_ub`, exact part only when computed. The lower
    /// bound holds for the worst case only, so a single request matrix is
    /// checked against the upper side alone.
    pub fn sandwich_holds(&self) -> bool {
        match &self.r_exact {
            Some(exact) if self.demands.is_some() => *exact <= self.r_lc_ub,
            Some(exact) => self.r_lb <= *exact && *exact <= self.r_lc_ub,
            None => self.r_lb <= self.r_lc_ub,
        }
    }
}

pub fn gap_ratio(achievable: &Rational, lower: &Rational) -> Result<Rational> {
    if lower.is_zero() {
        if achievable.is_zero() {
            return Ok(Rational::one());
        }
        return Err(Error::GapViolation {
            gap: "infinite".into(),
        });
    }
    Ok(achievable / lower)
}

pub const GAP_BOUND: i64 = 18;

/// Fills every rate; with `use_exact` also the worst-case exact and random
/// linear rates. Fails if the gap exceeds 18.
pub fn gap_report(params: &SystemParams, use_exact: bool, options: &ExactOptions) -> Result<RateReport> {
    rate_report(params, use_exact.then_some(&Demands::WorstCase), options)
}

/// Like [`gap_report`], with exact rates for `demands` when given. The
/// random linear rate is skipped when `options.random_trials` is zero.
pub fn rate_report(params: &SystemParams, demands: Option<&Demands>, options: &ExactOptions) -> Result<RateReport> {
    let r_exact = demands
        .map(|d| achievable_rate_exact(params, d, options))
        .transpose()?;
    let r_rand = match demands {
        Some(_) if options.random_trials == 0 => None,
        Some(Demands::WorstCase) => Some(random_linear_worst_rate(params, options)?),
        Some(Demands::Single(f)) => {
            let mut total = Rational::zero();
            for (memory, weight) in memory_share_points(params) {
                total += weight * sweep::random_linear_rate_for(&params.with_memory(memory)?, f, options)?;
            }
            Some(total)
        }
        None => None,
    };
    let r_lc_ub = rate_lc_ub(params);
    let r_lb = rate_lower_bound(params);
    let gap = gap_ratio(r_exact.as_ref().unwrap_or(&r_lc_ub), &r_lb)?;
    if gap > rational::int(GAP_BOUND) {
        return Err(Error::GapViolation {
            gap: rational::format(&gap),
        });
    }
    let demands = match demands {
        Some(Demands::Single(f)) => Some(f.rows().to_vec()),
        _ => None,
    };
    Ok(RateReport {
        params: params.clone(),
        demands,
        r_exact,
        r_mn: rate_mn(params),
        r_direct: rate_direct(params),
        r_lc_ub,
        r_rand,
        r_lb,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(n: usize, m: usize, mem: Rational, l: usize) -> SystemParams {
        SystemParams::new(n, m, mem, l).unwrap()
    }

    #[test]
    fn hull_basics() {
        let pts = vec![(int(0), int(4)), (int(1), int(3)), (int(2), int(0))];
        // (1, 3) lies above the chord from (0,4) to (2,0)
        assert_eq!(lower_hull_at(&pts, &int(1)), int(2));
        assert_eq!(lower_hull_at(&pts, &int(0)), int(4));
        assert_eq!(lower_hull_at(&pts, &rat(1, 2)), int(3));
        assert_eq!(lower_hull_at(&[(int(3), int(7))], &int(3)), int(7));
    }

    #[test]
    fn mn_endpoints() {
        assert_eq!(rate_mn(&p(3, 3, int(0), 1)), int(3));
        assert_eq!(rate_mn(&p(5, 3, int(0), 1)), int(3));
        assert_eq!(rate_mn(&p(2, 5, int(0), 1)), int(2));
        assert_eq!(rate_mn(&p(3, 3, int(3), 1)), int(0));
        // min{3 * 2/3 * 1/2, 2} = 1
        assert_eq!(rate_mn(&p(3, 3, int(1), 1)), int(1));
    }

    #[test]
    fn demo_formulas() {
        let q = p(3, 3, int(1), 2);
        assert_eq!(rate_direct(&q), int(2));
        // (1, 2) lies above the chord from (0, 3) to (2, 2/3)
        assert_eq!(rate_lc_ub(&q), rat(11, 6));
        assert_eq!(rate_lower_bound(&q), int(1));
        assert_eq!(rate_lc_ub(&p(3, 3, int(1), 1)), rate_mn(&p(3, 3, int(1), 1)));
    }

    #[test]
    fn lower_bound_edges() {
        assert_eq!(rate_lower_bound(&p(3, 3, int(0), 3)), int(3));
        assert_eq!(rate_lower_bound(&p(3, 3, int(3), 1)), int(0));
        assert_eq!(rate_lower_bound(&p(4, 4, int(4), 2)), int(0));
    }

    #[test]
    fn degenerate_gap() {
        let r = gap_report(&p(3, 3, int(3), 1), false, &ExactOptions::default()).unwrap();
        assert!(r.r_exact.is_none() && r.demands.is_none());
        assert_eq!(r.gap, int(1));
        assert!(r.r_mn.is_zero() && r.r_lc_ub.is_zero() && r.r_lb.is_zero() && r.r_direct.is_zero());
    }

    #[test]
    fn hull_is_convex_on_grid() {
        for (n, m, l) in [(3, 3, 1), (4, 4, 2), (6, 3, 2), (5, 8, 3)] {
            let at = |x: Rational| rate_lc_ub(&p(n, m, x, l));
            let steps = 24;
            let grid: Vec<Rational> = (0..=steps).map(|i| from_usize(m * i) / from_usize(steps)).collect();
            for a in &grid {
                for b in &grid {
                    let mid = (a + b) / int(2);
                    assert!(at(mid) * int(2) <= at(a.clone()) + at(b.clone()));
                }
            }
        }
    }
}
