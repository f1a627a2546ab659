//! Exact simulators used as oracles for the bounds.
//!
//! The free-particle part works in the single-excitation sector, where
//! bosons and fermions evolve identically: a state is a complex amplitude
//! vector over sites and each piecewise-constant Hamiltonian segment is
//! applied exactly through its eigendecomposition. The Ising part is a
//! dense `2^N` state-vector computation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::bounds::{free_particle_bound, HopSchedule};
use crate::error::{invalid, Error, Result};
use crate::lattice::{Boundary, CouplingModel, LatticeSpec};

pub const MAX_SINGLE_PARTICLE_SITES: usize = 4096;
pub const MAX_ISING_SITES: usize = 10;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Required overlap of the mid-protocol state with the W state.
pub const W_STATE_TOLERANCE: f64 = 1e-9;

/// Piecewise-constant stretch of a quadratic Hamiltonian
/// `sum_{i != j} J_ij c_i^dag c_j + sum_i B_i c_i^dag c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSegment {
    hop: DMatrix<Complex64>,
    onsite: DVector<f64>,
    duration: f64,
}

impl HamiltonianSegment {
    pub fn new(hop: DMatrix<Complex64>, onsite: DVector<f64>, duration: f64) -> Result<Self> {
        let n = hop.nrows();
        if hop.ncols() != n {
            return invalid(format!("hop matrix must be square, got {}x{}", n, hop.ncols()));
        }
        if onsite.len() != n {
            return invalid(format!("expected {n} on-site fields, got {}", onsite.len()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return invalid(format!("segment duration must be positive, got {duration}"));
        }
        let scale = hop.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..n {
            if hop[(i, i)].norm() > HERMITICITY_TOLERANCE * scale {
                return invalid(format!("hop matrix has a diagonal entry at site {i}; use on-site fields"));
            }
            for j in (i + 1)..n {
                if (hop[(i, j)] - hop[(j, i)].conj()).norm() > HERMITICITY_TOLERANCE * scale {
                    return invalid(format!("hop matrix is not Hermitian at ({i}, {j})"));
                }
            }
        }
        if onsite.iter().any(|b| !b.is_finite()) || hop.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("Hamiltonian contains non-finite entries");
        }
        Ok(Self { hop, onsite, duration })
    }

    /// Real symmetric hops with no on-site fields.
    pub fn real(hop: DMatrix<f64>, duration: f64) -> Result<Self> {
        let n = hop.nrows();
        Self::new(hop.map(|x| Complex64::new(x, 0.0)), DVector::zeros(n), duration)
    }

    pub fn site_count(&self) -> usize {
        self.hop.nrows()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn hop(&self) -> &DMatrix<Complex64> {
        &self.hop
    }

    pub fn onsite(&self) -> &DVector<f64> {
        &self.onsite
    }

    /// Full single-particle matrix, hops plus on-site diagonal.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut m = self.hop.clone();
        for (i, b) in self.onsite.iter().enumerate() {
            m[(i, i)] += Complex64::new(*b, 0.0);
        }
        m
    }

    /// `|J_iX|` for every `i != X`; on-site fields never enter.
    pub fn hop_row_magnitudes(&self, site: usize) -> Vec<f64> {
        (0..self.site_count())
            .filter(|&i| i != site)
            .map(|i| self.hop[(i, site)].norm())
            .collect()
    }

    fn with_duration(&self, duration: f64) -> Self {
        Self { duration, ..self.clone() }
    }
}

/// Ordered sequence of Hamiltonian segments on a fixed number of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleHamiltonian {
    site_count: usize,
    segments: Vec<HamiltonianSegment>,
}

impl SingleParticleHamiltonian {
    pub fn new(site_count: usize, segments: Vec<HamiltonianSegment>) -> Result<Self> {
        if site_count == 0 || site_count > MAX_SINGLE_PARTICLE_SITES {
            return invalid(format!(
                "site count must be in 1..={MAX_SINGLE_PARTICLE_SITES}, got {site_count}"
            ));
        }
        if let Some(bad) = segments.iter().find(|s| s.site_count() != site_count) {
            return invalid(format!("segment on {} sites in a {site_count}-site schedule", bad.site_count()));
        }
        Ok(Self { site_count, segments })
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn segments(&self) -> &[HamiltonianSegment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// The schedule restricted to `[0, t]`.
    pub fn truncated(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return invalid(format!("time must be finite and non-negative, got {t}"));
        }
        let mut left = t;
        let mut segments = Vec::new();
        for seg in &self.segments {
            if left <= 0.0 {
                break;
            }
            if seg.duration <= left {
                segments.push(seg.clone());
                left -= seg.duration;
            } else {
                segments.push(seg.with_duration(left));
                left = 0.0;
            }
        }
        if left > 1e-12 * t.max(1.0) {
            return invalid(format!("time {t} exceeds the schedule length {}", self.total_time()));
        }
        Ok(Self { site_count: self.site_count, segments })
    }

    /// Hop-row schedule of `site` over `[0, t]`, the input of the free-particle bound.
    pub fn hop_schedule(&self, site: usize, t: f64) -> Result<HopSchedule> {
        if site >= self.site_count {
            return invalid(format!("site {site} out of range"));
        }
        let mut schedule = HopSchedule::default();
        for seg in self.truncated(t)?.segments {
            schedule.push(seg.duration, seg.hop_row_magnitudes(site))?;
        }
        Ok(schedule)
    }
}

/// Unit-norm single-excitation amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    psi: DVector<Complex64>,
}

impl AmplitudeState {
    pub fn basis(n: usize, site: usize) -> Result<Self> {
        if site >= n {
            return invalid(format!("site {site} out of range for {n} sites"));
        }
        let mut psi = DVector::zeros(n);
        psi[site] = Complex64::new(1.0, 0.0);
        Ok(Self { psi })
    }

    pub fn from_amplitudes(psi: DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return invalid(format!("state norm is {norm}, expected 1"));
        }
        Ok(Self { psi })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.psi
    }

    pub fn amplitude(&self, site: usize) -> Complex64 {
        self.psi[site]
    }

    pub fn norm(&self) -> f64 {
        self.psi.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }
}

/// Eigendecomposition of one segment, reusable for any sub-interval.
struct Propagator {
    energies: DVector<f64>,
    modes: DMatrix<Complex64>,
}

impl Propagator {
    fn new(segment: &HamiltonianSegment) -> Self {
        let eig = SymmetricEigen::new(segment.matrix());
        Self { energies: eig.eigenvalues, modes: eig.eigenvectors }
    }

    /// `psi <- exp(-i H dt) psi`.
    fn apply(&self, psi: &DVector<Complex64>, dt: f64) -> DVector<Complex64> {
        let mut coeffs = self.modes.ad_mul(psi);
        for (c, e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * dt);
        }
        &self.modes * coeffs
    }
}

fn check_norm(psi: &DVector<Complex64>) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Internal(format!("evolution drifted to norm {norm}")));
    }
    Ok(())
}

/// Apply every segment of `h` to `psi0`.
pub fn evolve(h: &SingleParticleHamiltonian, psi0: &AmplitudeState) -> Result<AmplitudeState> {
    if psi0.len() != h.site_count {
        return invalid(format!("state has {} sites, Hamiltonian {}", psi0.len(), h.site_count));
    }
    let mut psi = psi0.psi.clone();
    for seg in &h.segments {
        psi = Propagator::new(seg).apply(&psi, seg.duration);
        check_norm(&psi)?;
    }
    Ok(AmplitudeState { psi })
}

/// Evolve over `[0, t]` only.
pub fn evolve_until(h: &SingleParticleHamiltonian, psi0: &AmplitudeState, t: f64) -> Result<AmplitudeState> {
    evolve(&h.truncated(t)?, psi0)
}

/// `|<X| U(t) |Y>|`, the magnitude of `[c_X(t), c_Y^dag]`.
pub fn commutator_amplitude(h: &SingleParticleHamiltonian, x: usize, y: usize, t: f64) -> Result<f64> {
    if x == y {
        return invalid("commutator amplitude needs distinct sites");
    }
    if x >= h.site_count {
        return invalid(format!("site {x} out of range"));
    }
    let evolved = evolve_until(h, &AmplitudeState::basis(h.site_count, y)?, t)?;
    Ok(evolved.amplitude(x).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub site: usize,
    pub probability: f64,
}

/// Site occupation probabilities at each of `times` (ascending, within the schedule).
pub fn trajectory(
    h: &SingleParticleHamiltonian,
    psi0: &AmplitudeState,
    times: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    if psi0.len() != h.site_count {
        return invalid("state and Hamiltonian sizes differ");
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return invalid("trajectory times must be ascending");
    }
    let propagators: Vec<Propagator> = h.segments.iter().map(Propagator::new).collect();
    let mut out = Vec::with_capacity(times.len() * h.site_count);
    // state at the start of segment `seg`, which begins at `seg_start`
    let mut seg = 0;
    let mut seg_start = 0.0;
    let mut start_state = psi0.psi.clone();
    for &time in times {
        if !(time >= 0.0 && time <= h.total_time() * (1.0 + 1e-12)) {
            return invalid(format!("time {time} outside the schedule"));
        }
        while seg < h.segments.len() && time > seg_start + h.segments[seg].duration {
            start_state = propagators[seg].apply(&start_state, h.segments[seg].duration);
            seg_start += h.segments[seg].duration;
            seg += 1;
        }
        let psi = match propagators.get(seg) {
            Some(p) => p.apply(&start_state, (time - seg_start).max(0.0)),
            None => start_state.clone(),
        };
        check_norm(&psi)?;
        out.extend(psi.iter().enumerate().map(|(site, z)| TrajectoryPoint {
            time,
            site,
            probability: z.norm_sqr(),
        }));
    }
    Ok(out)
}

/// Two-stage state transfer: uniform hops `1/L^alpha` from the source to
/// every middle site for `T/2`, then from the middle sites to the target
/// for `T/2`, with `T = pi L^alpha / sqrt(N - 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSchedule {
    pub hamiltonian: SingleParticleHamiltonian,
    pub lattice: LatticeSpec,
    pub source: usize,
    pub target: usize,
    /// Largest pairwise distance on the lattice.
    pub max_distance: f64,
    pub hop_strength: f64,
    pub total_time: f64,
}

impl ProtocolSchedule {
    pub fn new(n: usize, alpha: f64, d: usize) -> Result<Self> {
        if n < 4 {
            return invalid(format!("state transfer needs N >= 4, got {n}"));
        }
        CouplingModel::new(alpha)?;
        let lattice = hypercube_with_sites(n, d)?;
        let source = 0;
        let target = n - 1;
        let max_distance = lattice.max_distance();
        let hop_strength = max_distance.powf(-alpha);
        let total_time = PI / (hop_strength * ((n - 2) as f64).sqrt());

        let stage = |hub: usize| {
            let mut hop = DMatrix::zeros(n, n);
            for i in (0..n).filter(|&i| i != source && i != target) {
                hop[(hub, i)] = hop_strength;
                hop[(i, hub)] = hop_strength;
            }
            HamiltonianSegment::real(hop, total_time / 2.0)
        };
        let hamiltonian = SingleParticleHamiltonian::new(n, vec![stage(source)?, stage(target)?])?;
        Ok(Self { hamiltonian, lattice, source, target, max_distance, hop_strength, total_time })
    }

    pub fn middle_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.lattice.site_count()).filter(move |&i| i != self.source && i != self.target)
    }

    /// `|<target| U(t) |source>|` after running the schedule up to `t`.
    pub fn fidelity_at(&self, t: f64) -> Result<f64> {
        let n = self.lattice.site_count();
        let psi = evolve_until(&self.hamiltonian, &AmplitudeState::basis(n, self.source)?, t)?;
        Ok(psi.amplitude(self.target).norm())
    }
}

fn hypercube_with_sites(n: usize, d: usize) -> Result<LatticeSpec> {
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    let side = (n as f64).powf(1.0 / d as f64).round() as usize;
    if side.checked_pow(d as u32) != Some(n) {
        return invalid(format!("{n} sites do not form a {d}-dimensional hypercube"));
    }
    LatticeSpec::new(d, side, Boundary::Open)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub schedule: ProtocolSchedule,
    /// `|<target|psi(T)>|` in the one-excitation sector.
    pub fidelity: f64,
    /// `|<target| U(T) |source>|`.
    pub amplitude: f64,
    /// Free-particle bound over `[0, T]` from the source hop row.
    pub bound: f64,
    pub ratio: f64,
    /// `|<W|psi(T/2)>|` over the middle sites.
    pub w_overlap: f64,
}

pub fn state_transfer_protocol(n: usize, alpha: f64, d: usize) -> Result<ProtocolReport> {
    let schedule = ProtocolSchedule::new(n, alpha, d)?;
    let h = &schedule.hamiltonian;
    let start = AmplitudeState::basis(n, schedule.source)?;

    let half = evolve_until(h, &start, schedule.total_time / 2.0)?;
    let w_norm = ((n - 2) as f64).sqrt();
    let w_overlap = schedule
        .middle_sites()
        .map(|i| half.amplitude(i) / w_norm)
        .sum::<Complex64>()
        .norm();
    if (1.0 - w_overlap).abs() > W_STATE_TOLERANCE {
        return Err(Error::Internal(format!("mid-protocol W-state overlap is {w_overlap}")));
    }

    let fidelity = evolve(h, &start)?.amplitude(schedule.target).norm();
    let amplitude = commutator_amplitude(h, schedule.target, schedule.source, schedule.total_time)?;
    // the schedule is symmetric under source <-> target, so either hop row gives the same integral
    let bound = free_particle_bound(&h.hop_schedule(schedule.source, schedule.total_time)?)?;
    Ok(ProtocolReport { fidelity, amplitude, bound, ratio: amplitude / bound, w_overlap, schedule })
}

/// `<psi| [A(t), B] |psi>` for the long-range Ising Hamiltonian
/// `H = sum_{i<j} J_ij Z_i Z_j` (each pair once), GHZ state `psi`,
/// `A = sigma+_i` and `B` the product of `sigma+` on every other site.
pub fn ising_exact_commutator(
    lattice: &LatticeSpec,
    model: &CouplingModel,
    site: usize,
    t: f64,
) -> Result<Complex64> {
    let n = lattice.site_count();
    if n > MAX_ISING_SITES {
        return invalid(format!("dense Ising oracle limited to {MAX_ISING_SITES} sites, got {n}"));
    }
    lattice.check_site(site)?;
    if !t.is_finite() {
        return invalid("time must be finite");
    }
    let dim = 1usize << n;
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            pairs.push((a, b, model.strength(lattice.distance_unchecked(a, b))));
        }
    }
    let energies: Vec<f64> = (0..dim)
        .map(|state| {
            pairs
                .iter()
                .map(|&(a, b, j)| {
                    let same = ((state >> a) & 1) == ((state >> b) & 1);
                    if same { j } else { -j }
                })
                .sum()
        })
        .collect();

    let ghz = {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[dim - 1] = v[0];
        v
    };
    let evolve_phase = |v: &mut [Complex64], sign: f64| {
        for (amp, e) in v.iter_mut().zip(&energies) {
            *amp *= Complex64::from_polar(1.0, -sign * e * t);
        }
    };
    let raise = |v: &[Complex64], mask: usize| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (state, amp) in v.iter().enumerate() {
            if state & mask == 0 {
                out[state | mask] += amp;
            }
        }
        out
    };
    let a_mask = 1usize << site;
    let b_mask = (dim - 1) & !a_mask;
    // A(t) = U^dag A U with U = exp(-iHt)
    let heisenberg_a = |v: &[Complex64]| {
        let mut w = v.to_vec();
        evolve_phase(&mut w, 1.0);
        let mut w = raise(&w, a_mask);
        evolve_phase(&mut w, -1.0);
        w
    };
    let inner = |v: &[Complex64]| -> Complex64 {
        ghz.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    };
    let ab = heisenberg_a(&raise(&ghz, b_mask));
    let ba = raise(&heisenberg_a(&ghz), b_mask);
    Ok(inner(&ab) - inner(&ba))
}

/// Real-valued signal of [`ising_exact_commutator`]: the expectation is
/// `i sin(2 lambda_i t)`, so its imaginary part is returned after checking
/// the real part vanishes.
pub fn ising_exact_oracle(lattice: &LatticeSpec, model: &CouplingModel, site: usize, t: f64) -> Result<f64> {
    let z = ising_exact_commutator(lattice, model, site, t)?;
    if z.re.abs() > 1e-12 {
        return Err(Error::Internal(format!("Ising commutator has real part {}", z.re)));
    }
    Ok(z.im)
}
