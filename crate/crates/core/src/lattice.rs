//! Hypercubic lattice geometry and power-law couplings.
//!
//! Sites are indexed row-major over their coordinate vectors, the last axis
//! varying fastest. Distances are computed on demand so that rings with
//! millions of sites never materialize an `N x N` matrix.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Geometry of a `D`-dimensional hypercubic lattice with `L` sites per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    dimension: usize,
    linear_size: usize,
    boundary: Boundary,
    site_count: usize,
}

impl LatticeSpec {
    pub fn new(dimension: usize, linear_size: usize, boundary: Boundary) -> Result<Self> {
        if dimension == 0 {
            return invalid("lattice dimension must be at least 1");
        }
        if linear_size < 2 {
            return invalid(format!("linear size must be at least 2, got {linear_size}"));
        }
        let mut site_count = 1usize;
        for _ in 0..dimension {
            site_count = match site_count.checked_mul(linear_size) {
                Some(n) => n,
                None => return invalid("site count overflows usize"),
            };
        }
        Ok(Self { dimension, linear_size, boundary, site_count })
    }

    /// One-dimensional periodic lattice of `n` sites.
    pub fn ring(n: usize) -> Result<Self> {
        Self::new(1, n, Boundary::Periodic)
    }

    /// One-dimensional open lattice of `n` sites.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new(1, n, Boundary::Open)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn linear_size(&self) -> usize {
        self.linear_size
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    /// Every site sees the same neighbourhood (periodic boundaries).
    pub fn is_translation_invariant(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn check_site(&self, i: usize) -> Result<()> {
        if i >= self.site_count {
            return invalid(format!("site {i} out of range for {} sites", self.site_count));
        }
        Ok(())
    }

    pub fn coordinates(&self, i: usize) -> Result<Vec<usize>> {
        self.check_site(i)?;
        let mut coords = vec![0; self.dimension];
        let mut rest = i;
        for c in coords.iter_mut().rev() {
            *c = rest % self.linear_size;
            rest /= self.linear_size;
        }
        Ok(coords)
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dimension {
            return invalid(format!(
                "expected {} coordinates, got {}",
                self.dimension,
                coords.len()
            ));
        }
        let mut index = 0;
        for &c in coords {
            if c >= self.linear_size {
                return invalid(format!("coordinate {c} out of range 0..{}", self.linear_size));
            }
            index = index * self.linear_size + c;
        }
        Ok(index)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_site(i)?;
        self.check_site(j)?;
        Ok(self.distance_unchecked(i, j))
    }

    /// Distance without bounds checks; callers guarantee `i, j < N`.
    pub(crate) fn distance_unchecked(&self, i: usize, j: usize) -> f64 {
        if self.dimension == 1 {
            return self.axis_offset(i.abs_diff(j)) as f64;
        }
        let (mut a, mut b) = (i, j);
        let mut sq = 0.0;
        for _ in 0..self.dimension {
            let d = self.axis_offset((a % self.linear_size).abs_diff(b % self.linear_size)) as f64;
            sq += d * d;
            a /= self.linear_size;
            b /= self.linear_size;
        }
        sq.sqrt()
    }

    fn axis_offset(&self, diff: usize) -> usize {
        match self.boundary {
            Boundary::Open => diff,
            Boundary::Periodic => diff.min(self.linear_size - diff),
        }
    }

    /// Largest distance between any two sites.
    pub fn max_distance(&self) -> f64 {
        let per_axis = match self.boundary {
            Boundary::Open => self.linear_size - 1,
            Boundary::Periodic => self.linear_size / 2,
        } as f64;
        per_axis * (self.dimension as f64).sqrt()
    }
}

/// Power-law coupling `J(r) = r^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingModel {
    alpha: f64,
    kac_normalize: bool,
}

impl CouplingModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return invalid(format!("alpha must be finite and non-negative, got {alpha}"));
        }
        Ok(Self { alpha, kac_normalize: false })
    }

    /// Flag Kac normalization. Couplings are unchanged; only reported times
    /// are rescaled by the self-hop strength.
    pub fn with_kac(mut self, kac_normalize: bool) -> Self {
        self.kac_normalize = kac_normalize;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kac_normalize(&self) -> bool {
        self.kac_normalize
    }

    #[inline]
    pub fn strength(&self, r: f64) -> f64 {
        if self.alpha == 0.0 {
            1.0
        } else {
            r.powf(-self.alpha)
        }
    }
}

/// `J_ij` for distinct sites.
pub fn coupling(spec: &LatticeSpec, model: &CouplingModel, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return invalid("self-coupling is the self-hop strength, not a pair coupling");
    }
    Ok(model.strength(spec.distance(i, j)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ring_distance_wraps() {
        let ring = LatticeSpec::ring(6).unwrap();
        assert_eq!(ring.distance(1, 5).unwrap(), 2.0);
        assert_eq!(ring.distance(3, 3).unwrap(), 0.0);
        assert!(ring.distance(0, 6).is_err());
    }

    #[test]
    fn open_square_diagonal() {
        let sq = LatticeSpec::new(2, 3, Boundary::Open).unwrap();
        let a = sq.index_of(&[0, 0]).unwrap();
        let b = sq.index_of(&[2, 2]).unwrap();
        assert!((sq.distance(a, b).unwrap() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.coordinates(b).unwrap(), vec![2, 2]);
        assert_eq!(sq.coordinates(5).unwrap(), vec![1, 2]);
    }

    #[test]
    fn periodic_square_uses_minimum_image() {
        let torus = LatticeSpec::new(2, 4, Boundary::Periodic).unwrap();
        let a = torus.index_of(&[0, 0]).unwrap();
        let b = torus.index_of(&[3, 3]).unwrap();
        assert!((torus.distance(a, b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(torus.max_distance(), 2.0 * 2f64.sqrt());
    }

    #[test]
    fn construction_errors() {
        assert!(LatticeSpec::new(0, 4, Boundary::Open).is_err());
        assert!(LatticeSpec::new(1, 1, Boundary::Open).is_err());
        assert!(LatticeSpec::new(64, 1 << 20, Boundary::Open).is_err());
        assert!(CouplingModel::new(-0.1).is_err());
        assert!(CouplingModel::new(f64::NAN).is_err());
        assert_eq!(LatticeSpec::new(3, 5, Boundary::Open).unwrap().site_count(), 125);
    }

    #[test]
    fn coupling_values() {
        let ring6 = LatticeSpec::ring(6).unwrap();
        let half = CouplingModel::new(0.5).unwrap();
        assert!((coupling(&ring6, &half, 1, 5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(coupling(&ring6, &half, 2, 2).is_err());
        let flat = CouplingModel::new(0.0).unwrap();
        assert_eq!(coupling(&ring6, &flat, 0, 3).unwrap(), 1.0);
        let ring8 = LatticeSpec::ring(8).unwrap();
        let sq = CouplingModel::new(2.0).unwrap();
        assert_eq!(coupling(&ring8, &sq, 0, 4).unwrap(), 0.0625);
    }

    #[test]
    fn kac_flag_leaves_couplings_alone() {
        let ring = LatticeSpec::ring(10).unwrap();
        let plain = CouplingModel::new(0.7).unwrap();
        let kac = plain.with_kac(true);
        assert!(kac.kac_normalize());
        for j in 1..10 {
            assert_eq!(coupling(&ring, &plain, 0, j), coupling(&ring, &kac, 0, j));
        }
    }

    fn lattices() -> impl Strategy<Value = LatticeSpec> {
        prop_oneof![
            (2usize..40).prop_map(|n| LatticeSpec::ring(n).unwrap()),
            (2usize..40).prop_map(|n| LatticeSpec::chain(n).unwrap()),
            (2usize..7, prop_oneof![Just(Boundary::Open), Just(Boundary::Periodic)])
                .prop_map(|(l, b)| LatticeSpec::new(2, l, b).unwrap()),
            (2usize..5).prop_map(|l| LatticeSpec::new(3, l, Boundary::Open).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn metric_axioms(spec in lattices()) {
            let n = spec.site_count();
            for i in 0..n {
                prop_assert_eq!(spec.distance(i, i).unwrap(), 0.0);
                for j in 0..n {
                    let dij = spec.distance(i, j).unwrap();
                    prop_assert_eq!(dij, spec.distance(j, i).unwrap());
                    if i != j {
                        prop_assert!(dij >= 1.0);
                    }
                }
            }
            // triangle inequality on a strided subset keeps this O(N^2)
            for i in (0..n).step_by(3) {
                for j in 0..n {
                    for k in (0..n).step_by(5) {
                        let lhs = spec.distance(i, j).unwrap();
                        let rhs = spec.distance(i, k).unwrap() + spec.distance(k, j).unwrap();
                        prop_assert!(lhs <= rhs + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn coupling_symmetric_and_monotone(spec in lattices(), step in 0usize..=12) {
            let model = CouplingModel::new(0.25 * step as f64).unwrap();
            let n = spec.site_count();
            for i in 0..n {
                for j in 0..n {
                    if i == j { continue; }
                    let cij = coupling(&spec, &model, i, j).unwrap();
                    prop_assert_eq!(cij, coupling(&spec, &model, j, i).unwrap());
                    prop_assert!(cij > 0.0);
                    for k in 0..n {
                        if k == i { continue; }
                        let (dj, dk) = (spec.distance(i, j).unwrap(), spec.distance(i, k).unwrap());
                        let cik = coupling(&spec, &model, i, k).unwrap();
                        if dj < dk {
                            if model.alpha() > 0.0 {
                                prop_assert!(cij > cik);
                            } else {
                                prop_assert!(cij >= cik);
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn ring_coupling_depends_on_offset_only(n in 2usize..60, step in 0usize..=12, shift in 0usize..60) {
            let ring = LatticeSpec::ring(n).unwrap();
            let model = CouplingModel::new(0.25 * step as f64).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i == j { continue; }
                    let a = coupling(&ring, &model, i, j).unwrap();
                    let b = coupling(&ring, &model, (i + shift) % n, (j + shift) % n).unwrap();
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
