//! Commutator-norm bounds.
//!
//! * analytic: explicit-constant exponential bound obtained by composing
//!   hops through the self-hop strength `lambda` and constant `p`;
//! * exact sum: the full hop series on a ring, summed through the
//!   circulant spectrum;
//! * free particle: time integral of the hop-row norm at the source site;
//! * many site: pairwise sum of the analytic kernel over two site sets.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::kernels::{self, FourierSpectrum, HopParameters};
use crate::lattice::{CouplingModel, LatticeSpec};

/// A raw inverse-transform value below `-NEGATIVE_FLOOR * max|term|` is a bug, not roundoff.
pub const NEGATIVE_FLOOR: f64 = 1e-8;

/// Arguments of `exp` above this overflow `f64`.
const EXP_OVERFLOW: f64 = 709.782_712_893_384;

/// `||A|| ||B|| |X| |Y|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPrefactor {
    pub norm_a: f64,
    pub norm_b: f64,
    pub size_x: usize,
    pub size_y: usize,
}

impl Default for BoundPrefactor {
    fn default() -> Self {
        Self { norm_a: 1.0, norm_b: 1.0, size_x: 1, size_y: 1 }
    }
}

impl BoundPrefactor {
    pub fn new(norm_a: f64, norm_b: f64, size_x: usize, size_y: usize) -> Result<Self> {
        if !(norm_a > 0.0 && norm_a.is_finite() && norm_b > 0.0 && norm_b.is_finite()) {
            return invalid(format!("operator norms must be positive, got {norm_a}, {norm_b}"));
        }
        if size_x == 0 || size_y == 0 {
            return invalid("support sizes must be at least 1");
        }
        Ok(Self { norm_a, norm_b, size_x, size_y })
    }

    pub fn scale(&self) -> f64 {
        self.norm_a * self.norm_b * self.size_x as f64 * self.size_y as f64
    }

    /// `2 ||A|| ||B||`, the bound every commutator satisfies.
    pub fn trivial_bound(&self) -> f64 {
        2.0 * self.norm_a * self.norm_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Analytic,
    ExactSum,
    FreeParticle,
    ManySite,
}

impl BoundMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BoundMethod::Analytic => "analytic",
            BoundMethod::ExactSum => "exact_sum",
            BoundMethod::FreeParticle => "free_particle",
            BoundMethod::ManySite => "many_site",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub time: f64,
    pub separation: f64,
    pub method: BoundMethod,
    /// The value exceeds `2 ||A|| ||B||` (or overflowed to infinity).
    pub saturated: bool,
}

impl BoundValue {
    fn new(value: f64, time: f64, separation: f64, method: BoundMethod, trivial: f64) -> Self {
        Self { value, time, separation, method, saturated: !value.is_finite() || value > trivial }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return invalid(format!("time must be finite and non-negative, got {t}"));
    }
    Ok(())
}

/// `expm1` that saturates to `+inf` instead of producing `NaN` downstream.
#[inline]
fn growth(x: f64) -> f64 {
    if x > EXP_OVERFLOW {
        f64::INFINITY
    } else {
        x.exp_m1()
    }
}

/// `2 ||A|| ||B|| |X| |Y| (e^{2 lambda (1+p) t} - 1) / (lambda p r^alpha)`.
pub fn analytic_bound(
    params: &HopParameters,
    pre: &BoundPrefactor,
    r: f64,
    t: f64,
) -> Result<BoundValue> {
    if !(r.is_finite() && r >= 1.0) {
        return invalid(format!("separation must be at least 1, got {r}"));
    }
    check_time(t)?;
    let value = 2.0 * pre.scale() * analytic_kernel(params, t) / r.powf(params.alpha);
    Ok(BoundValue::new(value, t, r, BoundMethod::Analytic, pre.trivial_bound()))
}

/// `(e^{2 lambda (1+p) t} - 1) / (lambda p)`: the per-pair factor shared by
/// the analytic and many-site bounds.
pub(crate) fn analytic_kernel(params: &HopParameters, t: f64) -> f64 {
    growth(2.0 * params.lambda * (1.0 + params.p) * t) / (params.lambda * params.p)
}

/// Full hop series on a ring, evaluated from a precomputed spectrum.
#[derive(Debug, Clone)]
pub struct ExactSumBound {
    spectrum: FourierSpectrum,
}

impl ExactSumBound {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        Ok(Self { spectrum: kernels::fourier_spectrum(n, alpha)? })
    }

    pub fn from_spectrum(spectrum: FourierSpectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &FourierSpectrum {
        &self.spectrum
    }

    pub fn site_count(&self) -> usize {
        self.spectrum.site_count()
    }

    pub fn lambda(&self) -> f64 {
        self.spectrum.lambda()
    }

    pub fn hop_parameters(&self) -> HopParameters {
        HopParameters {
            lambda: self.spectrum.lambda(),
            p: kernels::hop_constant(self.spectrum.alpha()),
            alpha: self.spectrum.alpha(),
            site_count: self.site_count(),
        }
    }

    /// Cosine weights for one separation, reusable across many times.
    pub fn at_separation(&self, r: usize) -> Result<SeparationKernel<'_>> {
        let n = self.site_count();
        if r < 1 || r > n / 2 {
            return invalid(format!("separation {r} outside 1..={} for a ring of {n}", n / 2));
        }
        let cosines = (0..n)
            .map(|p| (2.0 * PI * ((p * r) % n) as f64 / n as f64).cos())
            .collect();
        Ok(SeparationKernel { omega: self.spectrum.omega(), cosines, r })
    }

    pub fn value(&self, r: usize, t: f64, pre: &BoundPrefactor) -> Result<BoundValue> {
        self.at_separation(r)?.value(t, pre)
    }

    /// Bound at every separation `r = 0..N` at once via one inverse FFT.
    /// Entry 0 is the `X = Y` diagonal and is not a valid bound.
    pub fn profile(&self, t: f64, pre: &BoundPrefactor) -> Result<Vec<f64>> {
        check_time(t)?;
        let n = self.site_count();
        if 2.0 * self.spectrum.max_omega() * t > EXP_OVERFLOW {
            return Ok(vec![f64::INFINITY; n]);
        }
        let g: Vec<f64> = self.spectrum.omega().iter().map(|&w| (2.0 * w * t).exp_m1()).collect();
        let series_max = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let raw = kernels::inverse_real_transform(&g, series_max.max(f64::MIN_POSITIVE))?;
        let factor = 2.0 * pre.scale();
        raw.into_iter()
            .map(|x| clamp_floor(x, series_max).map(|v| factor * v))
            .collect()
    }
}

/// [`ExactSumBound`] specialised to one separation.
#[derive(Debug, Clone)]
pub struct SeparationKernel<'a> {
    omega: &'a [f64],
    cosines: Vec<f64>,
    r: usize,
}

impl SeparationKernel<'_> {
    pub fn separation(&self) -> usize {
        self.r
    }

    /// Series value `(1/N) sum_p cos(2 pi p r/N) (e^{2 omega(p) t} - 1)`, before the prefactor.
    pub fn series(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let mut sum = 0.0;
        let mut series_max: f64 = 0.0;
        for (&w, &c) in self.omega.iter().zip(&self.cosines) {
            let x = 2.0 * w * t;
            if x > EXP_OVERFLOW {
                return Ok(f64::INFINITY);
            }
            let g = x.exp_m1();
            series_max = series_max.max(g.abs());
            sum += c * g;
        }
        clamp_floor(sum / self.omega.len() as f64, series_max)
    }

    pub fn value(&self, t: f64, pre: &BoundPrefactor) -> Result<BoundValue> {
        let value = 2.0 * pre.scale() * self.series(t)?;
        Ok(BoundValue::new(value, t, self.r as f64, BoundMethod::ExactSum, pre.trivial_bound()))
    }
}

fn clamp_floor(x: f64, series_max: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -NEGATIVE_FLOOR * series_max {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!(
            "inverse transform gave {x:e}, below the roundoff floor of {series_max:e}"
        )))
    }
}

/// Exact-summation bound on a ring of `n` sites at separation `r`.
pub fn exact_sum_bound(
    n: usize,
    alpha: f64,
    r: usize,
    t: f64,
    pre: &BoundPrefactor,
) -> Result<BoundValue> {
    ExactSumBound::new(n, alpha)?.value(r, t, pre)
}

/// Series value at `alpha = 0`, `r != 0`: `(e^{4(N-1)t} - e^{2(N-2)t}) / N`.
pub fn exact_sum_alpha0_closed_form(n: usize, t: f64) -> Result<f64> {
    if n < 3 {
        return invalid(format!("closed form needs N >= 3, got {n}"));
    }
    check_time(t)?;
    let nf = n as f64;
    let fast = 4.0 * (nf - 1.0) * t;
    let slow = 2.0 * (nf - 2.0) * t;
    // e^a - e^b = e^b (e^{a-b} - 1)
    Ok(slow.exp() * growth(fast - slow) / nf)
}

/// The looser all-to-all form `(e^{4Nt} - 1) / N`.
pub fn alpha0_reference_form(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    growth(4.0 * nf * t) / nf
}

/// One piecewise-constant stretch of hop amplitudes `|J_iX|` at the source site.
#[derive(Debug, Clone, PartialEq)]
pub struct HopSegment {
    pub duration: f64,
    pub hop_row: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HopSchedule {
    segments: Vec<HopSegment>,
}

impl HopSchedule {
    pub fn new(segments: Vec<HopSegment>) -> Result<Self> {
        let mut schedule = Self::default();
        for seg in segments {
            schedule.push(seg.duration, seg.hop_row)?;
        }
        Ok(schedule)
    }

    pub fn push(&mut self, duration: f64, hop_row: Vec<f64>) -> Result<()> {
        if !(duration.is_finite() && duration > 0.0) {
            return invalid(format!("segment duration must be positive, got {duration}"));
        }
        if hop_row.iter().any(|x| !x.is_finite()) {
            return invalid("hop row contains a non-finite amplitude");
        }
        self.segments.push(HopSegment { duration, hop_row });
        Ok(())
    }

    pub fn segments(&self) -> &[HopSegment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn concat(mut self, other: HopSchedule) -> Self {
        self.segments.extend(other.segments);
        self
    }
}

/// `sum_seg duration * sqrt(sum_i |J_iX|^2)`.
pub fn free_particle_bound(schedule: &HopSchedule) -> Result<f64> {
    if schedule.segments.is_empty() {
        return invalid("free-particle bound needs at least one segment");
    }
    Ok(schedule
        .segments
        .iter()
        .map(|s| s.duration * s.hop_row.iter().map(|j| j * j).sum::<f64>().sqrt())
        .sum())
}

/// `max_X sqrt(sum_{i != X} r_iX^(-2 alpha))`: growth rate of the free-particle
/// bound when every hop saturates the power law.
pub fn free_particle_envelope(spec: &LatticeSpec, model: &CouplingModel) -> f64 {
    let squared = CouplingModel::new(2.0 * model.alpha()).expect("2 alpha is valid");
    kernels::self_hop_lambda(spec, &squared).lambda.sqrt()
}

/// Pairwise bound between site sets:
/// `2 ||A|| ||B|| sum_{i in X, j in Y} (e^{2 lambda (1+p) t} - 1) / (lambda p r_ij^alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManySiteBound {
    params: HopParameters,
    pair_sum: f64,
    min_separation: f64,
    norm_a: f64,
    norm_b: f64,
}

impl ManySiteBound {
    pub fn new(
        spec: &LatticeSpec,
        model: &CouplingModel,
        x: &[usize],
        y: &[usize],
        norms: (f64, f64),
    ) -> Result<Self> {
        let params = kernels::self_hop_lambda(spec, model);
        Self::with_params(spec, model, params, x, y, norms)
    }

    /// Reuse a precomputed `lambda`.
    pub fn with_params(
        spec: &LatticeSpec,
        model: &CouplingModel,
        params: HopParameters,
        x: &[usize],
        y: &[usize],
        norms: (f64, f64),
    ) -> Result<Self> {
        BoundPrefactor::new(norms.0, norms.1, 1, 1)?;
        if x.is_empty() || y.is_empty() {
            return invalid("site sets must be nonempty");
        }
        let n = spec.site_count();
        let mut in_x = vec![false; n];
        for &i in x {
            spec.check_site(i)?;
            in_x[i] = true;
        }
        let mut pair_sum = 0.0;
        let mut min_separation = f64::INFINITY;
        for &j in y {
            spec.check_site(j)?;
            if in_x[j] {
                return invalid(format!("site {j} appears in both X and Y"));
            }
            for &i in x {
                let r = spec.distance_unchecked(i, j);
                min_separation = min_separation.min(r);
                pair_sum += model.strength(r);
            }
        }
        Ok(Self { params, pair_sum, min_separation, norm_a: norms.0, norm_b: norms.1 })
    }

    pub fn params(&self) -> &HopParameters {
        &self.params
    }

    /// `sum_{i in X, j in Y} r_ij^-alpha`.
    pub fn pair_sum(&self) -> f64 {
        self.pair_sum
    }

    pub fn value(&self, t: f64) -> Result<BoundValue> {
        check_time(t)?;
        let value = 2.0 * self.norm_a * self.norm_b * self.pair_sum * analytic_kernel(&self.params, t);
        Ok(BoundValue::new(
            value,
            t,
            self.min_separation,
            BoundMethod::ManySite,
            2.0 * self.norm_a * self.norm_b,
        ))
    }
}

pub fn many_site_bound(
    spec: &LatticeSpec,
    model: &CouplingModel,
    x: &[usize],
    y: &[usize],
    t: f64,
    norms: (f64, f64),
) -> Result<BoundValue> {
    ManySiteBound::new(spec, model, x, y, norms)?.value(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{self_hop_lambda, SeriesOracle};
    use approx::assert_relative_eq;

    fn ring(n: usize) -> LatticeSpec {
        LatticeSpec::ring(n).unwrap()
    }

    fn model(a: f64) -> CouplingModel {
        CouplingModel::new(a).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let params = self_hop_lambda(&ring(4), &model(1.0));
        assert_eq!((params.lambda, params.p), (2.5, 4.0));
        let unit = BoundPrefactor::default();
        let b = analytic_bound(&params, &unit, 2.0, 0.1).unwrap();
        assert_relative_eq!(b.value, 1.118_249_396_070_347_3, max_relative = 1e-13);
        assert_relative_eq!(b.value, 2.0 * (2.5f64.exp() - 1.0) / 20.0, max_relative = 1e-14);
        assert_eq!(b.method, BoundMethod::Analytic);
        assert_eq!(analytic_bound(&params, &unit, 2.0, 0.0).unwrap().value, 0.0);

        let doubled = BoundPrefactor::new(2.0, 1.0, 1, 1).unwrap();
        assert_relative_eq!(
            analytic_bound(&params, &doubled, 2.0, 0.1).unwrap().value,
            2.0 * b.value,
            max_relative = 1e-15
        );
        assert!(analytic_bound(&params, &unit, 0.5, 0.1).is_err());
        assert!(analytic_bound(&params, &unit, 2.0, -0.1).is_err());
    }

    #[test]
    fn analytic_overflow_saturates() {
        let params = self_hop_lambda(&ring(100), &model(0.0));
        let b = analytic_bound(&params, &BoundPrefactor::default(), 3.0, 10.0).unwrap();
        assert!(b.value.is_infinite() && b.saturated);
    }

    #[test]
    fn exact_sum_alpha0() {
        let unit = BoundPrefactor::default();
        let b = exact_sum_bound(3, 0.0, 1, 0.1, &unit).unwrap();
        assert_relative_eq!(b.value, 0.669_425_446_888_198_6, max_relative = 1e-12);
        assert_relative_eq!(
            exact_sum_alpha0_closed_form(3, 0.1).unwrap(),
            0.334_712_723_444_099_3,
            max_relative = 1e-14
        );
        assert_eq!(exact_sum_bound(10, 0.0, 3, 0.0, &unit).unwrap().value, 0.0);
        assert_eq!(exact_sum_alpha0_closed_form(5, 0.0).unwrap(), 0.0);
        assert!(exact_sum_alpha0_closed_form(2, 0.1).is_err());
        for n in [3usize, 7, 50] {
            for t in [0.001, 0.02, 0.3] {
                let ratio = exact_sum_alpha0_closed_form(n, t).unwrap() / alpha0_reference_form(n, t);
                assert!(ratio > 0.0 && ratio <= 1.0);
            }
        }
    }

    #[test]
    fn exact_sum_range_checks() {
        let b = ExactSumBound::new(10, 0.5).unwrap();
        let unit = BoundPrefactor::default();
        assert!(b.value(0, 0.1, &unit).is_err());
        assert!(b.value(6, 0.1, &unit).is_err());
        assert!(b.value(5, 0.1, &unit).is_ok());
        assert!(b.value(5, 1e6, &unit).unwrap().value.is_infinite());
    }

    #[test]
    fn exact_sum_matches_dense_oracle() {
        let unit = BoundPrefactor::default();
        for n in [6usize, 17, 64] {
            for a in [0.0, 0.4, 1.3] {
                let spec = ring(n);
                let oracle = SeriesOracle::new(&spec, &model(a)).unwrap();
                let exact = ExactSumBound::new(n, a).unwrap();
                for t in [0.01, 0.1, 1.0].map(|s| s / exact.lambda()) {
                    let dense = oracle.at(t).unwrap();
                    let profile = exact.profile(t, &unit).unwrap();
                    for r in 1..=n / 2 {
                        let v = exact.value(r, t, &unit).unwrap().value;
                        assert_relative_eq!(v, 2.0 * dense[(0, r)], max_relative = 1e-9);
                        assert_relative_eq!(v, 2.0 * dense[(3, (3 + r) % n)], max_relative = 1e-9);
                        assert_relative_eq!(profile[r], v, max_relative = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_sum_below_analytic() {
        let unit = BoundPrefactor::default();
        for n in [8usize, 33, 256, 2000] {
            for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let exact = ExactSumBound::new(n, a).unwrap();
                let params = exact.hop_parameters();
                for s in [0.01, 0.1, 1.0, 3.0] {
                    let t = s / params.lambda;
                    for r in [1, n / 4, n / 2] {
                        let e = exact.value(r, t, &unit).unwrap().value;
                        let an = analytic_bound(&params, &unit, r as f64, t).unwrap().value;
                        assert!(e <= an, "n={n} a={a} t={t} r={r}: {e} > {an}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_sum_decreases_in_alpha() {
        let unit = BoundPrefactor::default();
        let n = 128;
        let t = 0.05;
        for r in [2usize, 10, 64] {
            let mut prev = f64::INFINITY;
            for step in 0..=8 {
                let v = exact_sum_bound(n, 0.25 * step as f64, r, t, &unit).unwrap().value;
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn bounds_increase_in_time() {
        let unit = BoundPrefactor::default();
        let exact = ExactSumBound::new(50, 0.6).unwrap();
        let params = exact.hop_parameters();
        let kernel = exact.at_separation(7).unwrap();
        let mut prev = (0.0, 0.0);
        for k in 1..40 {
            let t = 0.002 * k as f64;
            let cur = (
                kernel.value(t, &unit).unwrap().value,
                analytic_bound(&params, &unit, 7.0, t).unwrap().value,
            );
            assert!(cur.0 > prev.0 && cur.1 > prev.1);
            prev = cur;
        }
    }

    #[test]
    fn free_particle_examples() {
        let mut zero = HopSchedule::default();
        zero.push(1.3, vec![0.0; 5]).unwrap();
        assert_eq!(free_particle_bound(&zero).unwrap(), 0.0);
        assert!(free_particle_bound(&HopSchedule::default()).is_err());

        // uniform row 1/L^alpha over N-2 sites
        let (n, a, l, t) = (7usize, 0.5, 6.0f64, 0.8);
        let row = vec![l.powf(-a); n - 2];
        let mut one = HopSchedule::default();
        one.push(t, row.clone()).unwrap();
        let want = t * ((n - 2) as f64).sqrt() / l.powf(a);
        assert_relative_eq!(free_particle_bound(&one).unwrap(), want, max_relative = 1e-15);

        // two-stage transfer: X idle during the second half
        let total = PI * l.powf(a) / ((n - 2) as f64).sqrt();
        let protocol =
            HopSchedule::new(vec![
                HopSegment { duration: total / 2.0, hop_row: row },
                HopSegment { duration: total / 2.0, hop_row: vec![0.0; n - 2] },
            ])
            .unwrap();
        assert_relative_eq!(free_particle_bound(&protocol).unwrap(), PI / 2.0, max_relative = 1e-15);
        assert!(HopSchedule::new(vec![HopSegment { duration: 0.0, hop_row: vec![] }]).is_err());
    }

    #[test]
    fn free_particle_additive_and_permutation_invariant() {
        let mut a = HopSchedule::default();
        a.push(0.3, vec![1.0, 0.5, 0.25]).unwrap();
        let mut b = HopSchedule::default();
        b.push(0.7, vec![0.1, 2.0]).unwrap();
        b.push(0.2, vec![0.0, 0.3, 0.4]).unwrap();
        let joined = a.clone().concat(b.clone());
        assert_relative_eq!(
            free_particle_bound(&joined).unwrap(),
            free_particle_bound(&a).unwrap() + free_particle_bound(&b).unwrap(),
            max_relative = 1e-15
        );
        assert_relative_eq!(joined.total_time(), 1.2, max_relative = 1e-15);
        let mut permuted = HopSchedule::default();
        permuted.push(0.3, vec![0.25, 1.0, 0.5]).unwrap();
        assert_relative_eq!(
            free_particle_bound(&permuted).unwrap(),
            free_particle_bound(&a).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(free_particle_envelope(&ring(10), &model(0.0)), 3.0);
        assert_eq!(free_particle_envelope(&ring(4), &model(1.0)), 1.5);
        let chain = LatticeSpec::chain(9).unwrap();
        let brute = (0..9)
            .map(|x| {
                (0..9)
                    .filter(|&i| i != x)
                    .map(|i| chain.distance(i, x).unwrap().powf(-1.4))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        assert_relative_eq!(free_particle_envelope(&chain, &model(0.7)), brute, max_relative = 1e-14);
    }

    #[test]
    fn many_site_examples() {
        let spec = ring(4);
        let m = model(1.0);
        let b = many_site_bound(&spec, &m, &[0], &[1, 2, 3], 0.1, (1.0, 1.0)).unwrap();
        assert_relative_eq!(b.value, 5.591_246_980_351_737, max_relative = 1e-13);
        assert_eq!(b.separation, 1.0);
        assert_eq!(many_site_bound(&spec, &m, &[0], &[1, 2, 3], 0.0, (1.0, 1.0)).unwrap().value, 0.0);
        assert!(many_site_bound(&spec, &m, &[0, 1], &[1, 2], 0.1, (1.0, 1.0)).is_err());
        assert!(many_site_bound(&spec, &m, &[], &[1], 0.1, (1.0, 1.0)).is_err());
        assert!(many_site_bound(&spec, &m, &[0], &[9], 0.1, (1.0, 1.0)).is_err());
    }

    #[test]
    fn many_site_reduces_to_pair_bound() {
        let spec = LatticeSpec::chain(12).unwrap();
        let m = model(0.35);
        let params = self_hop_lambda(&spec, &m);
        let pre = BoundPrefactor::new(1.5, 0.5, 1, 1).unwrap();
        for (x, y, t) in [(0usize, 11usize, 0.01), (3, 4, 0.2), (7, 2, 0.05)] {
            let r = spec.distance(x, y).unwrap();
            let single = analytic_bound(&params, &pre, r, t).unwrap().value;
            let many = many_site_bound(&spec, &m, &[x], &[y], t, (1.5, 0.5)).unwrap().value;
            assert_relative_eq!(single, many, max_relative = 1e-12);
        }
    }
}
