//! Signaling and scrambling time lower bounds.
//!
//! Every time returned here is the earliest moment a *bound* reaches the
//! threshold `delta`, so it lower-bounds the true signaling time for that
//! geometry. The Ising protocol functions are the exception: they give the
//! time an explicit protocol actually needs.

use crate::bounds::{BoundPrefactor, ExactSumBound, ManySiteBound};
use crate::error::{invalid, Error, Result};
use crate::kernels::{self, HopParameters};
use crate::lattice::{CouplingModel, LatticeSpec};

/// Bisection stops once the bracket is narrower than this fraction of `t`.
pub const BISECTION_RELATIVE_TOLERANCE: f64 = 1e-10;
/// Maximum number of bracket doublings before giving up.
pub const MAX_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalingSpec {
    pub delta: f64,
    pub prefactor: BoundPrefactor,
    pub kac_rescale: bool,
}

impl Default for SignalingSpec {
    fn default() -> Self {
        Self { delta: 1.0, prefactor: BoundPrefactor::default(), kac_rescale: false }
    }
}

impl SignalingSpec {
    pub fn new(delta: f64, prefactor: BoundPrefactor, kac_rescale: bool) -> Result<Self> {
        let spec = Self { delta, prefactor, kac_rescale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(delta, BoundPrefactor::default(), false)
    }

    pub fn validate(&self) -> Result<()> {
        let trivial = self.prefactor.trivial_bound();
        if !(self.delta > 0.0 && self.delta < trivial) {
            return invalid(format!(
                "delta must lie in (0, {trivial}) for the given operator norms, got {}",
                self.delta
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalingMethod {
    Analytic,
    Numeric,
    ExactSum,
    ManySite,
    Ising,
}

impl SignalingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SignalingMethod::Analytic => "analytic",
            SignalingMethod::Numeric => "numeric",
            SignalingMethod::ExactSum => "exact_sum",
            SignalingMethod::ManySite => "many_site",
            SignalingMethod::Ising => "ising",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalingTime {
    pub t_star: f64,
    pub method: SignalingMethod,
    /// Final `(t_lo, t_hi)` bracket of a numeric solve.
    pub bracket: Option<(f64, f64)>,
    pub kac_rescaled: bool,
}

impl SignalingTime {
    /// Times in Kac-normalized units: multiply by `lambda`.
    pub fn kac_rescaled(mut self, lambda: f64) -> Self {
        if !self.kac_rescaled {
            self.t_star *= lambda;
            self.bracket = self.bracket.map(|(lo, hi)| (lo * lambda, hi * lambda));
            self.kac_rescaled = true;
        }
        self
    }

    fn maybe_kac(self, enabled: bool, lambda: f64) -> Self {
        if enabled {
            self.kac_rescaled(lambda)
        } else {
            self
        }
    }
}

/// Starting step for bracket expansion, `1 / (2 lambda (1 + p))`.
pub fn initial_step(params: &HopParameters) -> f64 {
    1.0 / (2.0 * params.lambda * (1.0 + params.p))
}

/// Closed-form inversion of the analytic bound:
/// `t* = ln(1 + delta lambda p r^alpha / (2 ||A|| ||B|| |X| |Y|)) / (2 lambda (1 + p))`.
pub fn signaling_time_analytic(
    params: &HopParameters,
    spec: &SignalingSpec,
    r: f64,
) -> Result<SignalingTime> {
    if !(r.is_finite() && r >= 1.0) {
        return invalid(format!("separation must be at least 1, got {r}"));
    }
    if !(spec.delta > 0.0) {
        return invalid(format!("delta must be positive, got {}", spec.delta));
    }
    let x = spec.delta * params.lambda * params.p * r.powf(params.alpha)
        / (2.0 * spec.prefactor.scale());
    let t_star = x.ln_1p() / (2.0 * params.lambda * (1.0 + params.p));
    Ok(SignalingTime { t_star, method: SignalingMethod::Analytic, bracket: None, kac_rescaled: false }
        .maybe_kac(spec.kac_rescale, params.lambda))
}

/// Earliest `t` with `bound_fn(t) = delta` for a continuous, strictly
/// increasing `bound_fn` with `bound_fn(0) = 0`.
///
/// The bracket grows geometrically from `t_initial`; bisection then runs
/// until the bracket width is below [`BISECTION_RELATIVE_TOLERANCE`] of `t`.
pub fn signaling_time_numeric<F>(bound_fn: F, delta: f64, t_initial: f64) -> Result<SignalingTime>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid(format!("delta must be positive and finite, got {delta}"));
    }
    if !(t_initial > 0.0 && t_initial.is_finite()) {
        return invalid(format!("initial step must be positive, got {t_initial}"));
    }
    let eval = |t: f64| -> Result<f64> {
        let v = bound_fn(t)?;
        if v.is_nan() {
            return Err(Error::Internal(format!("bound evaluated to NaN at t = {t:e}")));
        }
        Ok(v)
    };

    let mut lo = 0.0;
    let mut hi = t_initial;
    let mut doublings = 0;
    while eval(hi)? < delta {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::NoCrossing { delta, t_max: hi, doublings });
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    while hi - lo > BISECTION_RELATIVE_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SignalingTime {
        t_star: 0.5 * (lo + hi),
        method: SignalingMethod::Numeric,
        bracket: Some((lo, hi)),
        kac_rescaled: false,
    })
}

/// Signaling time from the exact-summation bound on a ring.
pub fn exact_sum_signaling_time(
    bound: &ExactSumBound,
    r: usize,
    spec: &SignalingSpec,
) -> Result<SignalingTime> {
    spec.validate()?;
    let kernel = bound.at_separation(r)?;
    let params = bound.hop_parameters();
    let pre = spec.prefactor;
    let mut st = signaling_time_numeric(|t| Ok(kernel.value(t, &pre)?.value), spec.delta, initial_step(&params))?;
    st.method = SignalingMethod::ExactSum;
    Ok(st.maybe_kac(spec.kac_rescale, params.lambda))
}

/// Asymptotic comparator `ln(N^(1-alpha) r^alpha) / N^(1-alpha)` for a ring,
/// without hidden constants. Only meaningful as a fitting target.
pub fn signaling_contour(n: f64, alpha: f64, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("contour defined for 0 <= alpha < 1, got {alpha}"));
    }
    if !(n > 1.0 && r >= 1.0) {
        return invalid(format!("need N > 1 and r >= 1, got N = {n}, r = {r}"));
    }
    let scale = n.powf(1.0 - alpha);
    Ok((scale * r.powf(alpha)).ln() / scale)
}

/// Bisection on the many-site bound between `x` and `y`. Only the operator
/// norms of `spec.prefactor` are used; the pair sum replaces `|X| |Y|`.
pub fn many_site_signaling_time(
    lattice: &LatticeSpec,
    model: &CouplingModel,
    x: &[usize],
    y: &[usize],
    spec: &SignalingSpec,
) -> Result<SignalingTime> {
    spec.validate()?;
    let bound = ManySiteBound::new(
        lattice,
        model,
        x,
        y,
        (spec.prefactor.norm_a, spec.prefactor.norm_b),
    )?;
    let params = *bound.params();
    let mut st = signaling_time_numeric(|t| Ok(bound.value(t)?.value), spec.delta, initial_step(&params))?;
    st.method = SignalingMethod::ManySite;
    Ok(st.maybe_kac(spec.kac_rescale || model.kac_normalize(), params.lambda))
}

/// Lower bound on the scrambling time: many-site signaling from one site to
/// the rest of the lattice.
pub fn scrambling_time_bound(
    lattice: &LatticeSpec,
    model: &CouplingModel,
    source: usize,
    spec: &SignalingSpec,
) -> Result<SignalingTime> {
    lattice.check_site(source)?;
    let rest: Vec<usize> = (0..lattice.site_count()).filter(|&j| j != source).collect();
    many_site_signaling_time(lattice, model, &[source], &rest, spec)
}

/// `sin(2 t sum_{j != i} J_ij)`: GHZ-state expectation of `[A(t), B]` with
/// `A = sigma+_i` and `B` the product of `sigma+` over every other site.
pub fn ising_signal(lattice: &LatticeSpec, model: &CouplingModel, i: usize, t: f64) -> Result<f64> {
    let lambda_i = kernels::row_sum(lattice, model, i)?;
    Ok((2.0 * t * lambda_i).sin())
}

/// First time `|sin(2 lambda_i t)|` reaches `delta`: `asin(delta) / (2 lambda_i)`.
pub fn ising_signaling_time(
    lattice: &LatticeSpec,
    model: &CouplingModel,
    i: usize,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("Ising protocol threshold must lie in (0, 1), got {delta}"));
    }
    let lambda_i = kernels::row_sum(lattice, model, i)?;
    Ok(delta.asin() / (2.0 * lambda_i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::analytic_bound;
    use crate::kernels::self_hop_lambda;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ring(n: usize) -> LatticeSpec {
        LatticeSpec::ring(n).unwrap()
    }

    fn model(a: f64) -> CouplingModel {
        CouplingModel::new(a).unwrap()
    }

    #[test]
    fn analytic_example() {
        let params = self_hop_lambda(&ring(4), &model(1.0));
        let st = signaling_time_analytic(&params, &SignalingSpec::default(), 2.0).unwrap();
        assert_relative_eq!(st.t_star, 11f64.ln() / 25.0, max_relative = 1e-15);
        assert_relative_eq!(st.t_star, 0.095_915_810_911_934_82, max_relative = 1e-14);
        let back = analytic_bound(&params, &BoundPrefactor::default(), 2.0, st.t_star).unwrap();
        assert!((back.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_small_delta_limit() {
        let params = self_hop_lambda(&ring(20), &model(0.5));
        let mut prev = f64::INFINITY;
        for delta in [1e-1, 1e-3, 1e-6, 1e-9] {
            let spec = SignalingSpec::with_delta(delta).unwrap();
            let t = signaling_time_analytic(&params, &spec, 3.0).unwrap().t_star;
            assert!(t < prev && t > 0.0);
            prev = t;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn numeric_matches_analytic() {
        for (n, a, r) in [(4usize, 1.0, 2.0), (100, 0.3, 17.0), (1000, 0.8, 500.0)] {
            let params = self_hop_lambda(&ring(n), &model(a));
            let pre = BoundPrefactor::default();
            let spec = SignalingSpec::default();
            let closed = signaling_time_analytic(&params, &spec, r).unwrap();
            let numeric = signaling_time_numeric(
                |t| Ok(analytic_bound(&params, &pre, r, t)?.value),
                spec.delta,
                initial_step(&params),
            )
            .unwrap();
            assert_relative_eq!(numeric.t_star, closed.t_star, max_relative = 1e-9);
            let (lo, hi) = numeric.bracket.unwrap();
            assert!(lo <= closed.t_star && closed.t_star <= hi);
        }
    }

    #[test]
    fn numeric_round_trip_and_scale_invariance() {
        let exact = ExactSumBound::new(300, 0.4).unwrap();
        let kernel = exact.at_separation(5).unwrap();
        let pre = BoundPrefactor::default();
        let f = |t: f64| Ok(kernel.value(t, &pre)?.value);
        let target = f(0.37).unwrap();
        let st = signaling_time_numeric(f, target, 1e-4).unwrap();
        assert_relative_eq!(st.t_star, 0.37, max_relative = 1e-9);

        let base = signaling_time_numeric(f, 0.5, 1e-3).unwrap().t_star;
        for c in [0.01, 3.0, 1e4] {
            let scaled = signaling_time_numeric(|t| Ok(c * f(t)?), 0.5 * c, 1e-3).unwrap().t_star;
            assert_relative_eq!(scaled, base, max_relative = 1e-9);
        }
    }

    #[test]
    fn numeric_errors() {
        let capped = |t: f64| Ok(1.0 - (-t).exp());
        assert!(matches!(
            signaling_time_numeric(capped, 2.0, 1.0),
            Err(Error::NoCrossing { doublings: MAX_DOUBLINGS, .. })
        ));
        assert!(signaling_time_numeric(|_| Ok(f64::NAN), 1.0, 1.0).is_err());
        assert!(signaling_time_numeric(Ok, -1.0, 1.0).is_err());
        assert!(signaling_time_numeric(Ok, 1.0, 0.0).is_err());
    }

    #[test]
    fn exact_sum_regression_fixture() {
        // frozen from an independent bisection of the same series
        let exact = ExactSumBound::new(10_000, 0.5).unwrap();
        let st = exact_sum_signaling_time(&exact, 1, &SignalingSpec::default()).unwrap();
        assert_relative_eq!(st.t_star, 0.006_159_815_811_267_419, max_relative = 1e-8);
        assert_eq!(st.method, SignalingMethod::ExactSum);
    }

    #[test]
    fn contour_examples() {
        let e = std::f64::consts::E;
        assert_relative_eq!(signaling_contour(e, 0.0, 1.0).unwrap(), 1.0 / e, max_relative = 1e-15);
        let (n, a) = (1e4, 0.4);
        assert_relative_eq!(
            signaling_contour(n, a, 1.0).unwrap(),
            n.powf(1.0 - a).ln() / n.powf(1.0 - a),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            signaling_contour(n, a, n).unwrap(),
            n.ln() / n.powf(1.0 - a),
            max_relative = 1e-12
        );
        assert!(signaling_contour(n, 1.0, 1.0).is_err());
    }

    #[test]
    fn many_site_example() {
        let st = scrambling_time_bound(&ring(4), &model(1.0), 0, &SignalingSpec::default()).unwrap();
        assert_relative_eq!(st.t_star, 3f64.ln() / 25.0, max_relative = 1e-9);
        assert_relative_eq!(st.t_star, 0.043_944_491_546_724_39, max_relative = 1e-9);
        assert_eq!(st.method, SignalingMethod::ManySite);

        let tiny = SignalingSpec::with_delta(1e-8).unwrap();
        let t = many_site_signaling_time(&ring(4), &model(1.0), &[0], &[1, 2, 3], &tiny).unwrap();
        assert!(t.t_star < 1e-8);
    }

    #[test]
    fn kac_rescale_multiplies_by_lambda() {
        let lattice = ring(64);
        let m = model(0.6);
        let params = self_hop_lambda(&lattice, &m);
        let plain = SignalingSpec::default();
        let kac = SignalingSpec { kac_rescale: true, ..plain };
        let a0 = signaling_time_analytic(&params, &plain, 5.0).unwrap().t_star;
        let a1 = signaling_time_analytic(&params, &kac, 5.0).unwrap();
        assert!(a1.kac_rescaled);
        assert_relative_eq!(a1.t_star, a0 * params.lambda, max_relative = 1e-15);
        let m0 = scrambling_time_bound(&lattice, &m, 3, &plain).unwrap().t_star;
        let m1 = scrambling_time_bound(&lattice, &m, 3, &kac).unwrap().t_star;
        assert_relative_eq!(m1, m0 * params.lambda, max_relative = 1e-15);
        let exact = ExactSumBound::new(64, 0.6).unwrap();
        let e0 = exact_sum_signaling_time(&exact, 2, &plain).unwrap().t_star;
        let e1 = exact_sum_signaling_time(&exact, 2, &kac).unwrap().t_star;
        assert_relative_eq!(e1, e0 * params.lambda, max_relative = 1e-15);
        // rescaling is idempotent
        let twice = a1.kac_rescaled(params.lambda);
        assert_eq!(twice.t_star, a1.t_star);
    }

    #[test]
    fn signaling_spec_validation() {
        assert!(SignalingSpec::with_delta(0.0).is_err());
        assert!(SignalingSpec::with_delta(2.0).is_err());
        let big = BoundPrefactor::new(2.0, 2.0, 1, 1).unwrap();
        assert!(SignalingSpec::new(5.0, big, false).is_ok());
    }

    #[test]
    fn ising_examples() {
        let lattice = ring(4);
        let m = model(1.0);
        assert_eq!(ising_signal(&lattice, &m, 0, 0.0).unwrap(), 0.0);
        assert!((ising_signal(&lattice, &m, 2, PI / 30.0).unwrap() - 0.5).abs() < 1e-15);
        let t = ising_signaling_time(&lattice, &m, 1, 0.5).unwrap();
        assert_relative_eq!(t, PI / 30.0, max_relative = 1e-15);
        assert!(ising_signaling_time(&lattice, &m, 1, 1.0).is_err());
        assert!(ising_signaling_time(&lattice, &m, 1, 0.0).is_err());
        assert!(ising_signaling_time(&lattice, &m, 1, 1e-12).unwrap() < 1e-12);
        // open chain: the end site has the smallest row sum, so it is slowest
        let chain = LatticeSpec::chain(9).unwrap();
        let end = ising_signaling_time(&chain, &m, 0, 0.5).unwrap();
        let mid = ising_signaling_time(&chain, &m, 4, 0.5).unwrap();
        assert!(end > mid);
    }
}
