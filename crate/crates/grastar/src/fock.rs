//! Fock-space matrix oracle for the `n`-fermion algebra.
//!
//! Ladder operators are realized with the sign-string (Jordan–Wigner)
//! construction so that modes on different sites anticommute exactly. The
//! normal-ordered symbol map ties every Grassmann element to a unique
//! `2^n × 2^n` matrix, which makes [`oracle_star`] the ground truth against
//! which the bidifferential star product is calibrated.
//!
//! Basis order: `|n_1 … n_N⟩` maps to the integer with `n_1` in the least
//! significant bit; site 1 is the innermost mode, so its ladder operators
//! carry no sign string.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorIndex, GrassmannElement, Monomial};
use crate::linalg;

/// Largest site count for which the dense matrix oracle is built
/// (`2^n × 2^n` matrices and a `4^n × 4^n` basis solve).
pub const MAX_ORACLE_SITES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// Dense operator on the `n`-site Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    n: usize,
    matrix: Array2<Complex64>,
}

impl FockOperator {
    pub fn new(n: usize, matrix: Array2<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, matrix: linalg::identity(1 << n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, matrix: Array2::zeros((1 << n, 1 << n)) }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn dot(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(Self { n: self.n, matrix: self.matrix.dot(&other.matrix) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(Self { n: self.n, matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { n: self.n, matrix: &self.matrix * c }
    }

    pub fn dagger(&self) -> Self {
        Self { n: self.n, matrix: linalg::dagger(&self.matrix) }
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.dot(other)?.add(&other.dot(self)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Matrix exponential of the operator.
    pub fn expm(&self) -> Self {
        Self { n: self.n, matrix: linalg::expm(&self.matrix) }
    }
}

fn check_oracle_sites(n: usize) -> Result<()> {
    if n > MAX_ORACLE_SITES {
        Err(Error::TooManySites(n))
    } else {
        Ok(())
    }
}

/// Jordan–Wigner ladder operator for `site` (1-based).
///
/// `f_i⁻ |…n_i…⟩ = (-1)^{n_1+…+n_{i-1}} |…n_i−1…⟩` when `n_i = 1`.
pub fn ladder(n: usize, site: usize, kind: LadderKind) -> Result<FockOperator> {
    check_oracle_sites(n)?;
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    let dim = 1usize << n;
    let bit = 1usize << (site - 1);
    let string_mask = bit - 1;
    let mut m = Array2::<Complex64>::zeros((dim, dim));
    for s in 0..dim {
        if s & bit == 0 {
            continue;
        }
        let sign = if ((s & string_mask).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        let target = s & !bit;
        match kind {
            LadderKind::Annihilate => m[[target, s]] = Complex64::new(sign, 0.0),
            LadderKind::Create => m[[s, target]] = Complex64::new(sign, 0.0),
        }
    }
    FockOperator::new(n, m)
}

/// Normal-ordered basis operator `f_1^{+n_1}…f_N^{+n_N} f_1^{-m_1}…f_N^{-m_N}`
/// for occupation masks `n_mask` (creations) and `m_mask` (annihilations).
pub fn basis_operator(n: usize, n_mask: u32, m_mask: u32) -> Result<FockOperator> {
    let mut acc = FockOperator::identity(n);
    for site in 1..=n {
        if n_mask >> (site - 1) & 1 == 1 {
            acc = acc.dot(&ladder(n, site, LadderKind::Create)?)?;
        }
    }
    for site in 1..=n {
        if m_mask >> (site - 1) & 1 == 1 {
            acc = acc.dot(&ladder(n, site, LadderKind::Annihilate)?)?;
        }
    }
    Ok(acc)
}

/// Coefficients `a_{m⃗,n⃗}` of the normal-ordered expansion
/// `A = Σ a_{m⃗,n⃗} f⁺^{n⃗} f⁻^{m⃗}`; keys are `(n_mask, m_mask)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderCoefficients {
    n: usize,
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl NormalOrderCoefficients {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, n_mask: u32, m_mask: u32) -> Complex64 {
        self.coeffs.get(&(n_mask, m_mask)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Monomial mask for the canonical symbol `θ̄^{n⃗} θ^{m⃗}`.
fn mono_mask(n: usize, n_mask: u32, m_mask: u32) -> u32 {
    n_mask | (m_mask << n)
}

fn split_mask(n: usize, mono: u32) -> (u32, u32) {
    let low = (1u32 << n) - 1;
    (mono & low, mono >> n)
}

/// Flattens the basis operators into the columns of a `4^n × 4^n` matrix,
/// column index = the symbol monomial mask. Linear independence of the basis
/// is asserted when the cached inverse is first built.
struct OracleTables {
    basis: Array2<Complex64>,
    basis_inv: Array2<Complex64>,
}

fn oracle_tables(n: usize) -> Arc<OracleTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OracleTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("oracle cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let dim = 1usize << n;
            let side = dim * dim;
            let mut basis = Array2::<Complex64>::zeros((side, side));
            for mono in 0..side as u32 {
                let (n_mask, m_mask) = split_mask(n, mono);
                let op = basis_operator(n, n_mask, m_mask)
                    .expect("basis operators exist for all masks");
                for i in 0..dim {
                    for j in 0..dim {
                        basis[[i * dim + j, mono as usize]] = op.matrix()[[i, j]];
                    }
                }
            }
            let eye = linalg::identity(side);
            let basis_inv = linalg::solve(&basis, &eye)
                .expect("normal-ordered basis operators are linearly independent");
            Arc::new(OracleTables { basis, basis_inv })
        })
        .clone()
}

fn flatten(op: &FockOperator) -> Array1<Complex64> {
    let dim = 1usize << op.dimension();
    Array1::from_shape_fn(dim * dim, |k| op.matrix()[[k / dim, k % dim]])
}

/// Coefficient vector of an element over monomial masks `0..4^n`.
pub fn element_to_vec(a: &GrassmannElement) -> Array1<Complex64> {
    let mut v = Array1::zeros(1usize << (2 * a.dimension()));
    for (m, c) in a.terms() {
        v[m.0 as usize] = c;
    }
    v
}

pub fn vec_to_element(n: usize, v: &Array1<Complex64>) -> GrassmannElement {
    GrassmannElement::from_terms(
        n,
        v.iter().enumerate().map(|(k, &c)| (Monomial(k as u32), c)),
    )
}

/// Solves the `4^n × 4^n` linear system expressing `a` over the
/// normal-ordered basis operators.
pub fn normal_order_decompose(a: &FockOperator) -> Result<NormalOrderCoefficients> {
    check_oracle_sites(a.dimension())?;
    let n = a.dimension();
    let tables = oracle_tables(n);
    let x = tables.basis_inv.dot(&flatten(a));
    let mut coeffs = BTreeMap::new();
    for (mono, &c) in x.iter().enumerate() {
        if c != Complex64::ZERO {
            coeffs.insert(split_mask(n, mono as u32), c);
        }
    }
    Ok(NormalOrderCoefficients { n, coeffs })
}

/// Symbol map: transcribes normal-ordered coefficients onto the canonical
/// monomials `θ̄^{n⃗} θ^{m⃗}`.
pub fn symbol_of(a: &FockOperator) -> Result<GrassmannElement> {
    let n = a.dimension();
    let coeffs = normal_order_decompose(a)?;
    Ok(GrassmannElement::from_terms(
        n,
        coeffs
            .iter()
            .map(|((n_mask, m_mask), c)| (Monomial(mono_mask(n, n_mask, m_mask)), c)),
    ))
}

/// Inverse of [`symbol_of`]: rebuilds the operator from an element's
/// coefficients over the normal-ordered basis.
pub fn operator_of(a: &GrassmannElement) -> Result<FockOperator> {
    let n = a.dimension();
    check_oracle_sites(n)?;
    let tables = oracle_tables(n);
    let flat = tables.basis.dot(&element_to_vec(a));
    let dim = 1usize << n;
    let matrix = Array2::from_shape_fn((dim, dim), |(i, j)| flat[i * dim + j]);
    FockOperator::new(n, matrix)
}

/// Ground-truth star product: `symbol_of(operator_of(a) · operator_of(b))`.
pub fn oracle_star(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { left: a.dimension(), right: b.dimension() });
    }
    symbol_of(&operator_of(a)?.dot(&operator_of(b)?)?)
}

/// Coherent-state amplitudes `⟨m|θ⟩` as Grassmann-valued entries of a ket.
///
/// Sites `offset+1 ..= offset+modes` of an `alg_n`-site algebra label the
/// Grassmann variables; the amplitude of `|m⟩` is
/// `Π_i (1 − ½θ̄_iθ_i) · θ_{offset+1}^{m_1} ⋯ θ_{offset+modes}^{m_modes}`.
pub fn coherent_amplitudes(
    modes: usize,
    alg_n: usize,
    offset: usize,
) -> Result<Vec<GrassmannElement>> {
    assert!(offset + modes <= alg_n);
    let mut normalizer = GrassmannElement::one(alg_n);
    for i in 1..=modes {
        let site = offset + i;
        let tb = GrassmannElement::generator(alg_n, GeneratorIndex::bar(site))?;
        let t = GrassmannElement::generator(alg_n, GeneratorIndex::unbar(site))?;
        let factor = &GrassmannElement::one(alg_n)
            - &tb.multiply(&t)?.scale(Complex64::new(0.5, 0.0));
        normalizer = normalizer.multiply(&factor)?;
    }
    let mut amps = Vec::with_capacity(1 << modes);
    for m in 0..1u32 << modes {
        let mut mono = GrassmannElement::one(alg_n);
        for i in 1..=modes {
            if m >> (i - 1) & 1 == 1 {
                let t = GrassmannElement::generator(alg_n, GeneratorIndex::unbar(offset + i))?;
                mono = mono.multiply(&t)?;
            }
        }
        amps.push(normalizer.multiply(&mono)?);
    }
    Ok(amps)
}

/// Exact Berezin verification of the resolution of identity and the
/// coherent-state overlap formula. All arithmetic is dyadic, so the
/// residuals are exact zeros when the conventions are consistent.
#[derive(Debug, Clone)]
pub struct CoherentCheckReport {
    pub n: usize,
    pub identity_residual: f64,
    pub overlap_residual: f64,
}

impl CoherentCheckReport {
    pub fn pass(&self) -> bool {
        self.identity_residual == 0.0 && self.overlap_residual == 0.0
    }
}

pub fn coherent_overlap_check(n: usize) -> Result<CoherentCheckReport> {
    // ∫dμ(η,η̄) |η⟩⟨η| = 1, entrywise in the Fock basis.
    let amps = coherent_amplitudes(n, n, 0)?;
    let mut identity_residual: f64 = 0.0;
    for m in 0..1usize << n {
        for k in 0..1usize << n {
            let entry = amps[m].multiply(&amps[k].involution())?;
            let integrated = entry.integrate_measure();
            let expected = if m == k {
                GrassmannElement::one(n)
            } else {
                GrassmannElement::zero(n)
            };
            identity_residual = identity_residual.max(integrated.max_coeff_diff(&expected));
        }
    }

    // |⟨θ|η⟩|² = e^{−(η̄−θ̄)(η−θ)} in the doubled algebra: θ on sites 1..n,
    // η on sites n+1..2n.
    let alg = 2 * n;
    let theta_amps = coherent_amplitudes(n, alg, 0)?;
    let eta_amps = coherent_amplitudes(n, alg, n)?;
    let mut theta_eta = GrassmannElement::zero(alg);
    let mut eta_theta = GrassmannElement::zero(alg);
    for m in 0..1usize << n {
        theta_eta = &theta_eta + &theta_amps[m].involution().multiply(&eta_amps[m])?;
        eta_theta = &eta_theta + &eta_amps[m].involution().multiply(&theta_amps[m])?;
    }
    let product = theta_eta.multiply(&eta_theta)?;

    let mut exponent = GrassmannElement::zero(alg);
    for i in 1..=n {
        let theta = GrassmannElement::generator(alg, GeneratorIndex::unbar(i))?;
        let theta_b = GrassmannElement::generator(alg, GeneratorIndex::bar(i))?;
        let eta = GrassmannElement::generator(alg, GeneratorIndex::unbar(n + i))?;
        let eta_b = GrassmannElement::generator(alg, GeneratorIndex::bar(n + i))?;
        let diff_bar = &eta_b - &theta_b;
        let diff = &eta - &theta;
        exponent = &exponent - &diff_bar.multiply(&diff)?;
    }
    let expected = exponent.exp_nilpotent()?;
    let overlap_residual = product.max_coeff_diff(&expected);

    Ok(CoherentCheckReport { n, identity_residual, overlap_residual })
}

/// A Fock ket with Grassmann-valued amplitudes, for exact computations with
/// operators like `θ f⁺ + θ̄ f⁻` whose coefficients anticommute with the
/// ladder operators.
#[derive(Debug, Clone)]
pub struct GradedKet {
    pub modes: usize,
    pub alg_n: usize,
    pub amps: Vec<GrassmannElement>,
}

impl GradedKet {
    pub fn vacuum(modes: usize, alg_n: usize) -> Self {
        let mut amps = vec![GrassmannElement::zero(alg_n); 1 << modes];
        amps[0] = GrassmannElement::one(alg_n);
        Self { modes, alg_n, amps }
    }

    pub fn basis(modes: usize, alg_n: usize, state: usize) -> Self {
        let mut amps = vec![GrassmannElement::zero(alg_n); 1 << modes];
        amps[state] = GrassmannElement::one(alg_n);
        Self { modes, alg_n, amps }
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(GrassmannElement::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a + b)
            .collect();
        Self { modes: self.modes, alg_n: self.alg_n, amps }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            modes: self.modes,
            alg_n: self.alg_n,
            amps: self.amps.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Applies `g · f_site^kind` where `g` is a Grassmann coefficient.
    /// A single ladder operator is odd, so it anticommutes past the odd part
    /// of each amplitude: `(g F)(c|s⟩) = g (c_even − c_odd) (F|s⟩)`.
    pub fn apply_ladder(
        &self,
        g: &GrassmannElement,
        site: usize,
        kind: LadderKind,
    ) -> Result<GradedKet> {
        let bit = 1usize << (site - 1);
        let string_mask = bit - 1;
        let mut amps = vec![GrassmannElement::zero(self.alg_n); 1 << self.modes];
        for (s, c) in self.amps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (occupied, target) = match kind {
                LadderKind::Annihilate => (s & bit != 0, s & !bit),
                LadderKind::Create => (s & bit == 0, s | bit),
            };
            if !occupied {
                continue;
            }
            let jw = if ((s & string_mask).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            let (even, odd) = c.parity_parts();
            let signed = &even - &odd;
            let contrib = g.multiply(&signed)?.scale(Complex64::new(jw, 0.0));
            amps[target] = &amps[target] + &contrib;
        }
        Ok(GradedKet { modes: self.modes, alg_n: self.alg_n, amps })
    }

    /// Applies `exp(Σ_k g_k f^{±}_k)` by the terminating series; every
    /// application multiplies amplitudes by nilpotent coefficients.
    pub fn apply_exp(&self, terms: &[(GrassmannElement, usize, LadderKind)]) -> Result<GradedKet> {
        let mut acc = self.clone();
        let mut power = self.clone();
        for k in 1..=2 * self.alg_n + 1 {
            let mut next = GradedKet {
                modes: self.modes,
                alg_n: self.alg_n,
                amps: vec![GrassmannElement::zero(self.alg_n); 1 << self.modes],
            };
            for (g, site, kind) in terms {
                next = next.add(&power.apply_ladder(g, *site, *kind)?);
            }
            power = next.scale(Complex64::new(1.0 / k as f64, 0.0));
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GeneratorKind;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_annihilator_matrix() {
        let f = ladder(1, 1, LadderKind::Annihilate).unwrap();
        // Single nonzero entry ⟨0|f|1⟩ = 1.
        assert_eq!(f.matrix()[[0, 1]], c(1.0, 0.0));
        let total: f64 = f.matrix().iter().map(|x| x.norm()).sum();
        assert_eq!(total, 1.0);
    }

    #[test]
    fn canonical_anticommutation_relations() {
        for n in [1usize, 2, 3] {
            let id = FockOperator::identity(n);
            let zero = FockOperator::zero(n);
            for i in 1..=n {
                for j in 1..=n {
                    let fi = ladder(n, i, LadderKind::Annihilate).unwrap();
                    let fj_dag = ladder(n, j, LadderKind::Create).unwrap();
                    let fj = ladder(n, j, LadderKind::Annihilate).unwrap();
                    let mixed = fi.anticommutator(&fj_dag).unwrap();
                    let expected = if i == j { id.clone() } else { zero.clone() };
                    assert_eq!(mixed.max_abs_diff(&expected), 0.0, "{{f_{i}, f_{j}⁺}} at n={n}");
                    let both = fi.anticommutator(&fj).unwrap();
                    assert_eq!(both.max_abs_diff(&zero), 0.0);
                }
            }
        }
    }

    #[test]
    fn creation_squares_to_zero() {
        let fp = ladder(3, 2, LadderKind::Create).unwrap();
        assert_eq!(fp.dot(&fp).unwrap().max_abs_diff(&FockOperator::zero(3)), 0.0);
    }

    #[test]
    fn decompose_identity_and_number_operator() {
        let id = FockOperator::identity(1);
        let coeffs = normal_order_decompose(&id).unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_eq!(coeffs.coeff(0, 0), c(1.0, 0.0));

        let num = ladder(1, 1, LadderKind::Create)
            .unwrap()
            .dot(&ladder(1, 1, LadderKind::Annihilate).unwrap())
            .unwrap();
        let coeffs = normal_order_decompose(&num).unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_eq!(coeffs.coeff(1, 1), c(1.0, 0.0));
    }

    #[test]
    fn decompose_round_trips_random_matrix() {
        let mut rng = crate::seeded_rng(5);
        for n in [1usize, 2] {
            let dim = 1usize << n;
            let matrix = Array2::from_shape_fn((dim, dim), |_| {
                c(rand::Rng::random_range(&mut rng, -1.0..1.0),
                  rand::Rng::random_range(&mut rng, -1.0..1.0))
            });
            let a = FockOperator::new(n, matrix).unwrap();
            let coeffs = normal_order_decompose(&a).unwrap();
            let mut rebuilt = FockOperator::zero(n);
            for ((n_mask, m_mask), coeff) in coeffs.iter() {
                rebuilt = rebuilt
                    .add(&basis_operator(n, n_mask, m_mask).unwrap().scale(coeff))
                    .unwrap();
            }
            assert!(rebuilt.max_abs_diff(&a) < 1e-12);
        }
    }

    #[test]
    fn symbol_examples() {
        // f⁺f⁻ → θ̄θ
        let num = ladder(1, 1, LadderKind::Create)
            .unwrap()
            .dot(&ladder(1, 1, LadderKind::Annihilate).unwrap())
            .unwrap();
        let sym = symbol_of(&num).unwrap();
        let tb_t = GrassmannElement::generator(1, GeneratorIndex::bar(1))
            .unwrap()
            .multiply(&GrassmannElement::generator(1, GeneratorIndex::unbar(1)).unwrap())
            .unwrap();
        assert!(sym.max_coeff_diff(&tb_t) < 1e-14);

        // Identity → 1, f⁻ → θ
        assert!(symbol_of(&FockOperator::identity(1))
            .unwrap()
            .max_coeff_diff(&GrassmannElement::one(1))
            < 1e-14);
        let f = ladder(1, 1, LadderKind::Annihilate).unwrap();
        let theta = GrassmannElement::generator(1, GeneratorIndex::unbar(1)).unwrap();
        assert!(symbol_of(&f).unwrap().max_coeff_diff(&theta) < 1e-14);
    }

    #[test]
    fn symbol_and_operator_are_mutually_inverse() {
        let mut rng = crate::seeded_rng(17);
        for n in [1usize, 2, 3] {
            let a = GrassmannElement::random(n, &mut rng);
            let back = symbol_of(&operator_of(&a).unwrap()).unwrap();
            assert!(back.max_coeff_diff(&a) < 1e-12, "symbol∘operator at n={n}");

            let dim = 1usize << n;
            let matrix = Array2::from_shape_fn((dim, dim), |_| {
                c(rand::Rng::random_range(&mut rng, -1.0..1.0),
                  rand::Rng::random_range(&mut rng, -1.0..1.0))
            });
            let op = FockOperator::new(n, matrix).unwrap();
            let round = operator_of(&symbol_of(&op).unwrap()).unwrap();
            assert!(round.max_abs_diff(&op) < 1e-12, "operator∘symbol at n={n}");
        }
    }

    #[test]
    fn oracle_star_unit_and_contraction() {
        // oracle_star(θ, θ̄) = θθ̄ + 1
        let theta = GrassmannElement::generator(1, GeneratorIndex::unbar(1)).unwrap();
        let theta_b = GrassmannElement::generator(1, GeneratorIndex::bar(1)).unwrap();
        let prod = oracle_star(&theta, &theta_b).unwrap();
        let expected = &theta.multiply(&theta_b).unwrap() + &GrassmannElement::one(1);
        assert!(prod.max_coeff_diff(&expected) < 1e-12);

        // oracle_star(1, b) = b
        let mut rng = crate::seeded_rng(2);
        let b = GrassmannElement::random(2, &mut rng);
        let prod = oracle_star(&GrassmannElement::one(2), &b).unwrap();
        assert!(prod.max_coeff_diff(&b) < 1e-12);
    }

    #[test]
    fn coherent_checks_pass_exactly() {
        for n in [0usize, 1, 2] {
            let report = coherent_overlap_check(n).unwrap();
            assert!(report.pass(), "coherent check failed at n={n}: {report:?}");
        }
    }

    #[test]
    fn graded_ket_reproduces_coherent_state() {
        // e^{θf⁺ + θ̄f⁻}|0⟩ = (1 − ½θ̄θ)(|0⟩ + θ|1⟩)
        let theta = GrassmannElement::generator(1, GeneratorIndex::unbar(1)).unwrap();
        let theta_b = GrassmannElement::generator(1, GeneratorIndex::bar(1)).unwrap();
        let terms = vec![
            (theta.clone(), 1, LadderKind::Create),
            (theta_b.clone(), 1, LadderKind::Annihilate),
        ];
        let ket = GradedKet::vacuum(1, 1).apply_exp(&terms).unwrap();
        let expected = coherent_amplitudes(1, 1, 0).unwrap();
        for (amp, want) in ket.amps.iter().zip(&expected) {
            assert_eq!(amp.max_coeff_diff(want), 0.0);
        }
    }

    #[test]
    fn ladder_site_bounds_are_checked() {
        assert!(matches!(
            ladder(2, 3, LadderKind::Create),
            Err(Error::SiteOutOfRange { site: 3, n: 2 })
        ));
        assert!(GeneratorIndex { kind: GeneratorKind::Bar, site: 3 }.check(2).is_err());
    }
}
