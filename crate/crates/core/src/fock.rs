//! Truncated multimode Fock space.
//!
//! A dense brute-force calculator for the bosonic mode algebra. It exists to
//! check operator identities (mode rotation, commutator preservation) on a
//! finite occupation cutoff, not to simulate anything large.
//!
//! Basis states are ordered lexicographically by occupation tuple with the
//! first mode most significant, so the vacuum sits at index 0.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::expm::expm;

/// Default cap on the number of basis states a space may hold.
pub const DEFAULT_DIM_CAP: usize = 100_000;

/// Default per-mode occupation cutoff used by the verification suite.
pub const DEFAULT_N_MAX: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("a Fock space needs at least one mode")]
    NoModes,
    #[error("occupation cutoff must be at least 1, got {0}")]
    ZeroCutoff(usize),
    #[error("duplicate mode id `{0}`")]
    DuplicateMode(String),
    #[error("space too large: ({n_max} + 1)^{modes} = {dim} basis states exceeds the cap of {cap}")]
    DimensionCap {
        modes: usize,
        n_max: usize,
        dim: String,
        cap: usize,
    },
    #[error("unknown mode id `{0}`")]
    UnknownMode(String),
    #[error("mode pair must be two distinct modes, got `{0}` twice")]
    DegeneratePair(String),
    #[error("operator shapes differ: {left}x{left} vs {right}x{right}")]
    ShapeMismatch { left: usize, right: usize },
}

/// Which ladder operator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raising,
    Lowering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    modes: Vec<String>,
    n_max: usize,
    dim: usize,
}

/// Dense operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
}

impl FockSpace {
    /// Builds a space with the default dimension cap.
    pub fn new<S: AsRef<str>>(modes: &[S], n_max: usize) -> Result<Self, FockError> {
        Self::with_cap(modes, n_max, DEFAULT_DIM_CAP)
    }

    pub fn with_cap<S: AsRef<str>>(modes: &[S], n_max: usize, cap: usize) -> Result<Self, FockError> {
        if modes.is_empty() {
            return Err(FockError::NoModes);
        }
        if n_max == 0 {
            return Err(FockError::ZeroCutoff(n_max));
        }
        let modes: Vec<String> = modes.iter().map(|m| m.as_ref().to_owned()).collect();
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(FockError::DuplicateMode(m.clone()));
            }
        }
        let base = n_max + 1;
        let dim = u32::try_from(modes.len())
            .ok()
            .and_then(|k| base.checked_pow(k))
            .filter(|&d| d <= cap);
        match dim {
            Some(dim) => Ok(FockSpace { modes, n_max, dim }),
            None => {
                let exact = num_dim_string(base, modes.len());
                Err(FockError::DimensionCap {
                    modes: modes.len(),
                    n_max,
                    dim: exact,
                    cap,
                })
            }
        }
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis index of the all-zero occupation state.
    pub fn vacuum(&self) -> usize {
        0
    }

    pub fn mode_index(&self, mode: &str) -> Result<usize, FockError> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| FockError::UnknownMode(mode.to_owned()))
    }

    fn stride(&self, slot: usize) -> usize {
        (self.n_max + 1).pow((self.modes.len() - 1 - slot) as u32)
    }

    /// Occupation tuple of a basis index.
    pub fn occupation(&self, index: usize) -> Vec<usize> {
        let base = self.n_max + 1;
        let mut occ = vec![0; self.modes.len()];
        let mut rest = index;
        for slot in (0..self.modes.len()).rev() {
            occ[slot] = rest % base;
            rest /= base;
        }
        occ
    }

    /// Basis index of an occupation tuple, if every entry is within the cutoff.
    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        if occupation.len() != self.modes.len() || occupation.iter().any(|&n| n > self.n_max) {
            return None;
        }
        Some(
            occupation
                .iter()
                .enumerate()
                .map(|(slot, &n)| n * self.stride(slot))
                .sum(),
        )
    }

    /// Basis vector for an occupation tuple.
    pub fn basis_state(&self, occupation: &[usize]) -> Option<nalgebra::DVector<Complex64>> {
        let idx = self.index_of(occupation)?;
        let mut v = nalgebra::DVector::zeros(self.dim);
        v[idx] = Complex64::new(1.0, 0.0);
        Some(v)
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: DMatrix::identity(self.dim, self.dim),
        }
    }

    /// Basis indices whose occupation, summed over `slots`, does not exceed the cutoff.
    ///
    /// A passive two-mode generator is block diagonal in the pair's total
    /// photon number, and blocks with total at most `n_max` are untouched by
    /// truncation. This is the subspace on which conjugation identities hold
    /// exactly.
    pub fn untruncated_sector(&self, slots: &[usize]) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| {
                let occ = self.occupation(i);
                slots.iter().map(|&s| occ[s]).sum::<usize>() <= self.n_max
            })
            .collect()
    }

    /// Basis indices whose occupation of `slot` is strictly below the cutoff.
    pub fn below_cutoff(&self, slot: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.occupation(i)[slot] < self.n_max)
            .collect()
    }
}

fn num_dim_string(base: usize, exp: usize) -> String {
    // decimal product without overflow, for the error message only
    let mut digits = vec![1u32];
    for _ in 0..exp {
        let mut carry = 0u64;
        for d in digits.iter_mut() {
            let v = *d as u64 * base as u64 + carry;
            *d = (v % 10) as u32;
            carry = v / 10;
        }
        while carry > 0 {
            digits.push((carry % 10) as u32);
            carry /= 10;
        }
    }
    digits.iter().rev().map(|d| char::from_digit(*d, 10).unwrap()).collect()
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "operator matrices are square");
        OperatorMatrix { entries }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.adjoint(),
        }
    }

    fn check_shape(&self, other: &Self) -> Result<(), FockError> {
        if self.dim() != other.dim() {
            return Err(FockError::ShapeMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FockError> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FockError> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        OperatorMatrix {
            entries: self.entries.map(|z| z * factor),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `V† X V`.
    pub fn conjugate_by(&self, v: &Self) -> Result<Self, FockError> {
        v.adjoint().mul(self)?.mul(v)
    }

    /// Frobenius norm of the columns listed in `cols`.
    pub fn frobenius_on_columns(&self, cols: &[usize]) -> f64 {
        cols.iter()
            .map(|&j| self.entries.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-norm of the principal submatrix on `idx`.
    pub fn max_norm_on(&self, idx: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for &i in idx {
            for &j in idx {
                m = m.max(self.entries[(i, j)].norm());
            }
        }
        m
    }
}

/// Ladder operator for one mode, identity on the others.
pub fn ladder(space: &FockSpace, mode: &str, kind: Ladder) -> Result<OperatorMatrix, FockError> {
    let slot = space.mode_index(mode)?;
    let stride = space.stride(slot);
    let mut m = DMatrix::<Complex64>::zeros(space.dim, space.dim);
    for col in 0..space.dim {
        let n = space.occupation(col)[slot];
        match kind {
            Ladder::Lowering if n >= 1 => {
                m[(col - stride, col)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
            Ladder::Raising if n < space.n_max => {
                m[(col + stride, col)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
            }
            _ => {}
        }
    }
    Ok(OperatorMatrix { entries: m })
}

/// Position and momentum quadratures `x = (a + a†)/√2`, `π = i(a† − a)/√2`.
pub fn quadratures(space: &FockSpace, mode: &str) -> Result<(OperatorMatrix, OperatorMatrix), FockError> {
    let a = ladder(space, mode, Ladder::Lowering)?;
    let ad = ladder(space, mode, Ladder::Raising)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = a.add(&ad)?.scale(Complex64::new(s, 0.0));
    let p = ad.sub(&a)?.scale(Complex64::new(0.0, s));
    Ok((x, p))
}

/// Total photon number over all modes.
pub fn number_operator(space: &FockSpace) -> OperatorMatrix {
    let diag = nalgebra::DVector::from_iterator(
        space.dim,
        (0..space.dim).map(|i| Complex64::new(space.occupation(i).iter().sum::<usize>() as f64, 0.0)),
    );
    OperatorMatrix {
        entries: DMatrix::from_diagonal(&diag),
    }
}

/// `XY − YX`.
pub fn commutator(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<OperatorMatrix, FockError> {
    x.mul(y)?.sub(&y.mul(x)?)
}

/// An ordered pair of distinct modes: the incident mode and its reflected partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePair {
    pub incident: String,
    pub reflected: String,
}

impl ModePair {
    pub fn new(incident: impl Into<String>, reflected: impl Into<String>) -> Self {
        ModePair {
            incident: incident.into(),
            reflected: reflected.into(),
        }
    }

    fn slots(&self, space: &FockSpace) -> Result<(usize, usize), FockError> {
        if self.incident == self.reflected {
            return Err(FockError::DegeneratePair(self.incident.clone()));
        }
        Ok((space.mode_index(&self.incident)?, space.mode_index(&self.reflected)?))
    }
}

/// Anti-hermitian generator `a†_p a_{Rp} − a†_{Rp} a_p` of the pair rotation.
///
/// With this sign `V(α)† a_p V(α) = cos α a_p + sin α a_{Rp}` and
/// `V(α)† a_{Rp} V(α) = cos α a_{Rp} − sin α a_p`.
pub fn rotation_generator(space: &FockSpace, pair: &ModePair) -> Result<OperatorMatrix, FockError> {
    pair.slots(space)?;
    let a_p = ladder(space, &pair.incident, Ladder::Lowering)?;
    let a_r = ladder(space, &pair.reflected, Ladder::Lowering)?;
    let ad_p = a_p.adjoint();
    let ad_r = a_r.adjoint();
    ad_p.mul(&a_r)?.sub(&ad_r.mul(&a_p)?)
}

/// `V(α) = exp(α G)` for the pair generator `G`.
pub fn v_unitary(space: &FockSpace, pair: &ModePair, alpha: f64) -> Result<OperatorMatrix, FockError> {
    let g = rotation_generator(space, pair)?;
    Ok(OperatorMatrix {
        entries: expm(&g.entries.map(|z| z * alpha)),
    })
}

/// Residual of the mode-rotation law under `V`.
///
/// Compares `V† a_p V` against `cos α a_p + sin α a_{Rp}` and `V† a_{Rp} V`
/// against `cos α a_{Rp} − sin α a_p`, restricted to input states whose pair
/// occupation does not exceed the cutoff. Returns the larger Frobenius
/// distance.
pub fn rotation_check(space: &FockSpace, pair: &ModePair, alpha: f64) -> Result<f64, FockError> {
    let v = v_unitary(space, pair, alpha)?;
    rotation_residual(space, pair, &v, alpha)
}

/// Same as [`rotation_check`] but for a caller-supplied `V`, which lets
/// compositions such as `V(π/2)·V(π/2)` be checked against angle `π`.
pub fn rotation_residual(
    space: &FockSpace,
    pair: &ModePair,
    v: &OperatorMatrix,
    alpha: f64,
) -> Result<f64, FockError> {
    let (sp, sr) = pair.slots(space)?;
    let a_p = ladder(space, &pair.incident, Ladder::Lowering)?;
    let a_r = ladder(space, &pair.reflected, Ladder::Lowering)?;
    let (c, s) = (Complex64::new(alpha.cos(), 0.0), Complex64::new(alpha.sin(), 0.0));

    let expect_p = a_p.scale(c).add(&a_r.scale(s))?;
    let expect_r = a_r.scale(c).sub(&a_p.scale(s))?;
    let got_p = a_p.conjugate_by(v)?;
    let got_r = a_r.conjugate_by(v)?;

    let cols = space.untruncated_sector(&[sp, sr]);
    let res_p = got_p.sub(&expect_p)?.frobenius_on_columns(&cols);
    let res_r = got_r.sub(&expect_r)?.frobenius_on_columns(&cols);
    Ok(res_p.max(res_r))
}

/// Max-norm of `[V†XV, V†YV] − V†[X,Y]V`.
pub fn commutator_residual(
    v: &OperatorMatrix,
    x: &OperatorMatrix,
    y: &OperatorMatrix,
) -> Result<f64, FockError> {
    let lhs = commutator(&x.conjugate_by(v)?, &y.conjugate_by(v)?)?;
    let rhs = commutator(x, y)?.conjugate_by(v)?;
    Ok(lhs.sub(&rhs)?.max_norm())
}

/// The canonical operator pairs of a mode pair: ladder pairs and quadrature
/// pairs, within each mode and across the two modes.
pub fn canonical_pairs(
    space: &FockSpace,
    pair: &ModePair,
) -> Result<Vec<(String, OperatorMatrix, OperatorMatrix)>, FockError> {
    pair.slots(space)?;
    let (p, r) = (&pair.incident, &pair.reflected);
    let a_p = ladder(space, p, Ladder::Lowering)?;
    let a_r = ladder(space, r, Ladder::Lowering)?;
    let (x_p, pi_p) = quadratures(space, p)?;
    let (x_r, pi_r) = quadratures(space, r)?;
    Ok(vec![
        (format!("[a_{p}, a†_{p}]"), a_p.clone(), a_p.adjoint()),
        (format!("[a_{r}, a†_{r}]"), a_r.clone(), a_r.adjoint()),
        (format!("[a_{p}, a†_{r}]"), a_p.clone(), a_r.adjoint()),
        (format!("[a_{r}, a†_{p}]"), a_r, a_p.adjoint()),
        (format!("[x_{p}, π_{p}]"), x_p.clone(), pi_p.clone()),
        (format!("[x_{r}, π_{r}]"), x_r.clone(), pi_r.clone()),
        (format!("[x_{p}, π_{r}]"), x_p, pi_r),
        (format!("[x_{r}, π_{p}]"), x_r, pi_p),
    ])
}

/// Largest [`commutator_residual`] over the [`canonical_pairs`] of the mode pair.
pub fn commutator_preservation_check(
    space: &FockSpace,
    pair: &ModePair,
    alpha: f64,
) -> Result<f64, FockError> {
    let v = v_unitary(space, pair, alpha)?;
    let mut worst = 0.0f64;
    for (_, x, y) in canonical_pairs(space, pair)? {
        worst = worst.max(commutator_residual(&v, &x, &y)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dimensions() {
        assert_eq!(FockSpace::new(&["p"], 1).unwrap().dim(), 2);
        assert_eq!(FockSpace::new(&["p", "q"], 3).unwrap().dim(), 16);
        assert_eq!(FockSpace::new(&["p", "q", "r"], 9).unwrap().dim(), 1000);
    }

    #[test]
    fn sizing_errors() {
        let err = FockSpace::new(&["a", "b", "c", "d", "e", "f"], 9).unwrap_err();
        match err {
            FockError::DimensionCap { dim, .. } => assert_eq!(dim, "1000000"),
            e => panic!("unexpected {e:?}"),
        }
        let empty: [&str; 0] = [];
        assert_eq!(FockSpace::new(&empty, 2), Err(FockError::NoModes));
        assert_eq!(FockSpace::new(&["p"], 0), Err(FockError::ZeroCutoff(0)));
        assert!(matches!(FockSpace::new(&["p", "p"], 2), Err(FockError::DuplicateMode(_))));
        // cap overflow on usize must still be a sizing error
        let many: Vec<String> = (0..80).map(|i| format!("m{i}")).collect();
        assert!(matches!(FockSpace::new(&many, 9), Err(FockError::DimensionCap { .. })));
    }

    #[test]
    fn occupation_round_trip_and_vacuum() {
        let s = FockSpace::new(&["p", "q", "r"], 3).unwrap();
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.occupation(i)), Some(i));
        }
        assert_eq!(s.occupation(s.vacuum()), vec![0, 0, 0]);
        assert_eq!(s.index_of(&[0, 0, 1]), Some(1));
        assert_eq!(s.index_of(&[1, 0, 0]), Some(16));
    }

    #[test]
    fn lowering_annihilates_vacuum_exactly() {
        let s = FockSpace::new(&["p", "q"], 4).unwrap();
        let vac = s.basis_state(&[0, 0]).unwrap();
        for m in ["p", "q"] {
            let a = ladder(&s, m, Ladder::Lowering).unwrap();
            assert!((a.matrix() * &vac).iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn number_eigenrelation() {
        let s = FockSpace::new(&["p"], 5).unwrap();
        let a = ladder(&s, "p", Ladder::Lowering).unwrap();
        let ad = ladder(&s, "p", Ladder::Raising).unwrap();
        let n_op = ad.mul(&a).unwrap();
        for n in 0..5 {
            let ket = s.basis_state(&[n]).unwrap();
            let out = n_op.matrix() * &ket;
            assert!((out - ket.map(|z| z * n as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn unknown_mode() {
        let s = FockSpace::new(&["p"], 2).unwrap();
        assert_eq!(
            ladder(&s, "q", Ladder::Raising).unwrap_err(),
            FockError::UnknownMode("q".into())
        );
    }

    #[test]
    fn canonical_commutator_truncation_artifact() {
        // [a, a†] for n_max = 2, hand multiplied: diag(1, 1, -2)
        let s = FockSpace::new(&["p"], 2).unwrap();
        let a = ladder(&s, "p", Ladder::Lowering).unwrap();
        let comm = commutator(&a, &a.adjoint()).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.0), c(-2.0)]));
        assert!((comm.matrix() - expected).norm() < 1e-14);

        let s = FockSpace::new(&["p"], 6).unwrap();
        let a = ladder(&s, "p", Ladder::Lowering).unwrap();
        let comm = commutator(&a, &a.adjoint()).unwrap();
        let below = s.below_cutoff(0);
        let id = s.identity();
        assert!(comm.sub(&id).unwrap().max_norm_on(&below) < 1e-14);
        assert!((comm.matrix()[(6, 6)] - c(-6.0)).norm() < 1e-14);
    }

    #[test]
    fn independent_modes_commute() {
        let s = FockSpace::new(&["p", "q"], 3).unwrap();
        let a_p = ladder(&s, "p", Ladder::Lowering).unwrap();
        let ad_q = ladder(&s, "q", Ladder::Raising).unwrap();
        assert_eq!(commutator(&a_p, &ad_q).unwrap().max_norm(), 0.0);
        assert_eq!(commutator(&a_p, &a_p).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn commutator_shape_mismatch() {
        let s2 = FockSpace::new(&["p"], 2).unwrap();
        let s3 = FockSpace::new(&["p"], 3).unwrap();
        let err = commutator(&s2.identity(), &s3.identity()).unwrap_err();
        assert_eq!(err, FockError::ShapeMismatch { left: 3, right: 4 });
    }

    #[test]
    fn v_at_zero_is_identity() {
        let s = FockSpace::new(&["p", "r"], 4).unwrap();
        let v = v_unitary(&s, &ModePair::new("p", "r"), 0.0).unwrap();
        assert_eq!(v.sub(&s.identity()).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let s = FockSpace::new(&["p", "r"], 2).unwrap();
        assert_eq!(
            v_unitary(&s, &ModePair::new("p", "p"), 0.3).unwrap_err(),
            FockError::DegeneratePair("p".into())
        );
    }

    #[test]
    fn quarter_turn_moves_single_photon_to_partner() {
        let s = FockSpace::new(&["p", "r"], 3).unwrap();
        let v = v_unitary(&s, &ModePair::new("p", "r"), PI / 2.0).unwrap();
        let out = v.matrix() * s.basis_state(&[1, 0]).unwrap();
        let target = s.basis_state(&[0, 1]).unwrap();
        let overlap = target.dotc(&out);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        assert!((overlap.re.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_law_holds() {
        let s = FockSpace::new(&["p", "r"], 6).unwrap();
        let pair = ModePair::new("p", "r");
        assert_eq!(rotation_check(&s, &pair, 0.0).unwrap(), 0.0);
        assert!(rotation_check(&s, &pair, PI / 4.0).unwrap() < 1e-9);
    }

    #[test]
    fn rotation_law_breaks_on_truncated_sector() {
        // outside the untruncated sector the identity really fails, which is
        // why the residual is measured on the sector
        let s = FockSpace::new(&["p", "r"], 3).unwrap();
        let pair = ModePair::new("p", "r");
        let v = v_unitary(&s, &pair, PI / 4.0).unwrap();
        let a_p = ladder(&s, "p", Ladder::Lowering).unwrap();
        let a_r = ladder(&s, "r", Ladder::Lowering).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = a_p.scale(c(h)).add(&a_r.scale(c(h))).unwrap();
        let diff = a_p.conjugate_by(&v).unwrap().sub(&expect).unwrap();
        let all: Vec<usize> = (0..s.dim()).collect();
        assert!(diff.frobenius_on_columns(&all) > 1e-3);
    }

    #[test]
    fn double_quarter_turn_flips_sign() {
        let s = FockSpace::new(&["p", "r"], 6).unwrap();
        let pair = ModePair::new("p", "r");
        let v = v_unitary(&s, &pair, PI / 2.0).unwrap();
        let vv = v.mul(&v).unwrap();
        assert!(rotation_residual(&s, &pair, &vv, PI).unwrap() < 1e-9);
    }

    #[test]
    fn commutators_preserved() {
        let s = FockSpace::new(&["p", "r"], 6).unwrap();
        let pair = ModePair::new("p", "r");
        assert!(commutator_preservation_check(&s, &pair, PI / 2.0).unwrap() < 1e-10);

        let v = v_unitary(&s, &pair, PI / 4.0).unwrap();
        let a_p = ladder(&s, "p", Ladder::Lowering).unwrap();
        let ad_r = ladder(&s, "r", Ladder::Raising).unwrap();
        assert!(commutator_residual(&v, &a_p, &ad_r).unwrap() < 1e-10);
        assert!(commutator_residual(&v, &a_p, &a_p).unwrap() < 1e-12);
    }

    #[test]
    fn spectator_mode_is_untouched() {
        let s = FockSpace::new(&["p", "r", "spectator"], 3).unwrap();
        let pair = ModePair::new("p", "r");
        assert!(rotation_check(&s, &pair, 0.7).unwrap() < 1e-9);
        let v = v_unitary(&s, &pair, 0.7).unwrap();
        let a_s = ladder(&s, "spectator", Ladder::Lowering).unwrap();
        assert!(a_s.conjugate_by(&v).unwrap().sub(&a_s).unwrap().max_norm() < 1e-12);
    }
}
