//! Series-level quantities of the hop expansion: the self-hop strength
//! `lambda`, the composition constant `p = 2^(alpha+1)`, closed-form upper
//! bounds on `lambda`, the second-order hop check, the circulant spectrum
//! of a ring, and a dense matrix-exponential oracle for the full series.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::lattice::{CouplingModel, LatticeSpec};

/// Largest lattice accepted by [`reproducibility_check`].
pub const REPRODUCIBILITY_MAX_SITES: usize = 2000;
/// Largest lattice accepted by [`SeriesOracle`].
pub const SERIES_ORACLE_MAX_SITES: usize = 512;
/// Largest lattice for which [`coupling_matrix`] materializes `N x N` entries.
pub const DENSE_MAX_SITES: usize = 4096;
/// Imaginary FFT residue allowed, relative to `lambda`.
pub const SPECTRUM_IMAG_TOLERANCE: f64 = 1e-10;

/// Self-hop strength and composition constant for one `(lattice, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopParameters {
    /// `max_i sum_{j != i} J_ij`; also the diagonal `J_ii` of the hop series.
    pub lambda: f64,
    /// `2^(alpha + 1)`.
    pub p: f64,
    pub alpha: f64,
    pub site_count: usize,
}

impl HopParameters {
    /// Parameters from an explicit `lambda`, e.g. for a hand-built lattice.
    pub fn from_lambda(lambda: f64, alpha: f64, site_count: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return invalid(format!("lambda must be positive and finite, got {lambda}"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return invalid(format!("alpha must be non-negative, got {alpha}"));
        }
        Ok(Self { lambda, p: hop_constant(alpha), alpha, site_count })
    }
}

#[inline]
pub fn hop_constant(alpha: f64) -> f64 {
    2f64.powf(alpha + 1.0)
}

/// `sum_{j != i} J_ij`.
pub fn row_sum(spec: &LatticeSpec, model: &CouplingModel, i: usize) -> Result<f64> {
    spec.check_site(i)?;
    if spec.dimension() == 1 && spec.is_translation_invariant() {
        return Ok(ring_row_sum(spec.site_count(), model));
    }
    let n = spec.site_count();
    // smallest terms first
    let mut terms: Vec<f64> = (0..n)
        .filter(|&j| j != i)
        .map(|j| model.strength(spec.distance_unchecked(i, j)))
        .collect();
    terms.sort_unstable_by(|a, b| a.total_cmp(b));
    Ok(terms.iter().sum())
}

fn ring_row_sum(n: usize, model: &CouplingModel) -> f64 {
    let half = (n - 1) / 2;
    let mut sum = if n % 2 == 0 { model.strength((n / 2) as f64) } else { 0.0 };
    for r in (1..=half).rev() {
        sum += 2.0 * model.strength(r as f64);
    }
    sum
}

pub fn self_hop_lambda(spec: &LatticeSpec, model: &CouplingModel) -> HopParameters {
    let n = spec.site_count();
    let site = if spec.is_translation_invariant() { 0 } else { center_site(spec) };
    let lambda = row_sum(spec, model, site).expect("site in range");
    HopParameters { lambda, p: hop_constant(model.alpha()), alpha: model.alpha(), site_count: n }
}

/// On an open lattice the row sum peaks at the center: along each axis the
/// sum of a decreasing function of `|x - y|` is a sum of two concave partial
/// sums, largest when they are balanced.
fn center_site(spec: &LatticeSpec) -> usize {
    let mid = (spec.linear_size() - 1) / 2;
    spec.index_of(&vec![mid; spec.dimension()]).expect("center is in range")
}

/// Surface area of the unit sphere in `d` dimensions, `2 pi^(d/2) / Gamma(d/2)`.
pub fn unit_sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Closed-form upper bound on `lambda` for an open hypercubic lattice of side `l`.
///
/// * `alpha < D`: `w_D / (D - alpha) * L^(D - alpha)`
/// * `alpha = D`: `w_D / D * ln N + (2 sqrt(D) + 3)^D`
/// * `alpha > D`: `w_D / (alpha - D) + (2 sqrt(D) + 3)^D`
///
/// where `w_D` is [`unit_sphere_area`].
pub fn lambda_upper_bound(d: usize, alpha: f64, l: usize) -> Result<f64> {
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    if l < 2 {
        return invalid(format!("linear size must be at least 2, got {l}"));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return invalid(format!("alpha must be non-negative, got {alpha}"));
    }
    let dim = d as f64;
    let area = unit_sphere_area(d);
    let near_origin = (2.0 * dim.sqrt() + 3.0).powi(d as i32);
    let bound = if alpha < dim {
        area / (dim - alpha) * (l as f64).powf(dim - alpha)
    } else if alpha == dim {
        let ln_n = dim * (l as f64).ln();
        area / dim * ln_n + near_origin
    } else {
        area / (alpha - dim) + near_origin
    };
    Ok(bound)
}

/// Worst-case ratio `J2(i,j) / (p lambda J_ij)` over distinct pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproducibilityReport {
    /// Intermediate site distinct from both endpoints, as the hop sequences
    /// with no self-hops require. `<= 1` certifies the condition.
    pub max_ratio: f64,
    pub worst_pair: (usize, usize),
    /// Same ratio with the `k = i` and `k = j` self-hop terms
    /// (`J_ii = J_jj = lambda`) added to the numerator.
    pub max_ratio_with_self_hops: f64,
    pub worst_pair_with_self_hops: (usize, usize),
    pub lambda: f64,
    pub p: f64,
}

impl ReproducibilityReport {
    pub fn holds(&self) -> bool {
        self.max_ratio <= 1.0
    }
}

/// Brute-force check of `sum_k J_ik J_kj <= p lambda J_ij` on a finite lattice.
pub fn reproducibility_check(
    spec: &LatticeSpec,
    model: &CouplingModel,
) -> Result<ReproducibilityReport> {
    if model.alpha() <= 0.0 {
        return invalid("reproducibility condition is stated for alpha > 0");
    }
    let n = spec.site_count();
    if n > REPRODUCIBILITY_MAX_SITES {
        return invalid(format!(
            "reproducibility check is O(N^3); N = {n} exceeds {REPRODUCIBILITY_MAX_SITES}"
        ));
    }
    let params = self_hop_lambda(spec, model);
    let off = off_diagonal_couplings(spec, model);
    let square = &off * &off;
    let scale = params.p * params.lambda;

    let mut report = ReproducibilityReport {
        max_ratio: f64::NEG_INFINITY,
        worst_pair: (0, 0),
        max_ratio_with_self_hops: f64::NEG_INFINITY,
        worst_pair_with_self_hops: (0, 0),
        lambda: params.lambda,
        p: params.p,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let jij = off[(i, j)];
            let distinct = square[(i, j)] / (scale * jij);
            let with_self = (square[(i, j)] + 2.0 * params.lambda * jij) / (scale * jij);
            if distinct > report.max_ratio {
                report.max_ratio = distinct;
                report.worst_pair = (i, j);
            }
            if with_self > report.max_ratio_with_self_hops {
                report.max_ratio_with_self_hops = with_self;
                report.worst_pair_with_self_hops = (i, j);
            }
        }
    }
    Ok(report)
}

fn off_diagonal_couplings(spec: &LatticeSpec, model: &CouplingModel) -> DMatrix<f64> {
    let n = spec.site_count();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            model.strength(spec.distance_unchecked(i, j))
        }
    })
}

/// Dense hop matrix with `J_ii = lambda` on the diagonal.
pub fn coupling_matrix(spec: &LatticeSpec, model: &CouplingModel) -> Result<DMatrix<f64>> {
    let n = spec.site_count();
    if n > DENSE_MAX_SITES {
        return invalid(format!("dense coupling matrix limited to {DENSE_MAX_SITES} sites"));
    }
    let lambda = self_hop_lambda(spec, model).lambda;
    let mut m = off_diagonal_couplings(spec, model);
    m.fill_diagonal(lambda);
    Ok(m)
}

/// Ring hop sequence `J(r)`, `r = 0..N`, with `J(0) = lambda`.
pub fn ring_hop_sequence(n: usize, alpha: f64) -> Result<(Vec<f64>, f64)> {
    let ring = LatticeSpec::ring(n)?;
    let model = CouplingModel::new(alpha)?;
    let lambda = self_hop_lambda(&ring, &model).lambda;
    let mut seq: Vec<f64> = (0..n).map(|r| model.strength(r.min(n - r) as f64)).collect();
    seq[0] = lambda;
    Ok((seq, lambda))
}

/// Eigenvalues `omega(p) = sum_r cos(2 pi p r / N) J(r)` of the circulant ring hop matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    omega: Vec<f64>,
    lambda: f64,
    alpha: f64,
}

impl FourierSpectrum {
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn site_count(&self) -> usize {
        self.omega.len()
    }

    pub fn max_omega(&self) -> f64 {
        self.omega.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Inverse transform back to the hop sequence `J(r)`.
    pub fn hop_sequence(&self) -> Result<Vec<f64>> {
        inverse_real_transform(&self.omega, self.lambda)
    }
}

pub fn fourier_spectrum(n: usize, alpha: f64) -> Result<FourierSpectrum> {
    if n < 2 {
        return invalid(format!("ring needs at least 2 sites, got {n}"));
    }
    let (seq, lambda) = ring_hop_sequence(n, alpha)?;
    let mut buf: Vec<Complex64> = seq.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let omega = real_parts(&buf, lambda, "forward")?;
    Ok(FourierSpectrum { omega, lambda, alpha })
}

/// `(1/N) sum_p e^{2 pi i p r / N} g(p)` for a real, even `g`; imaginary
/// residue must stay below `SPECTRUM_IMAG_TOLERANCE * scale`.
pub(crate) fn inverse_real_transform(values: &[f64], scale: f64) -> Result<Vec<f64>> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= inv_n;
    }
    real_parts(&buf, scale, "inverse")
}

fn real_parts(buf: &[Complex64], scale: f64, which: &str) -> Result<Vec<f64>> {
    let limit = SPECTRUM_IMAG_TOLERANCE * scale.abs().max(f64::MIN_POSITIVE);
    let worst = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > limit {
        return Err(Error::Internal(format!(
            "{which} transform left imaginary residue {worst:e} above {limit:e}"
        )));
    }
    Ok(buf.iter().map(|z| z.re).collect())
}

/// Dense evaluation of `exp(2tJ) - I` through the eigendecomposition of
/// the symmetric hop matrix. Entry `(X, Y)` is the full hop series
/// `sum_{k >= 1} (2t)^k / k! J^k(X, Y)`.
#[derive(Debug, Clone)]
pub struct SeriesOracle {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SeriesOracle {
    pub fn new(spec: &LatticeSpec, model: &CouplingModel) -> Result<Self> {
        let n = spec.site_count();
        if n > SERIES_ORACLE_MAX_SITES {
            return invalid(format!(
                "dense series oracle limited to {SERIES_ORACLE_MAX_SITES} sites, got {n}"
            ));
        }
        let eig = SymmetricEigen::new(coupling_matrix(spec, model)?);
        Ok(Self { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
    }

    pub fn at(&self, t: f64) -> Result<DMatrix<f64>> {
        if !(t.is_finite() && t >= 0.0) {
            return invalid(format!("time must be finite and non-negative, got {t}"));
        }
        let v = &self.eigenvectors;
        let weights = self.eigenvalues.map(|mu| (2.0 * t * mu).exp_m1());
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, k| v[(i, k)] * weights[k]);
        Ok(scaled * v.transpose())
    }
}

pub fn series_oracle(spec: &LatticeSpec, model: &CouplingModel, t: f64) -> Result<DMatrix<f64>> {
    SeriesOracle::new(spec, model)?.at(t)
}
