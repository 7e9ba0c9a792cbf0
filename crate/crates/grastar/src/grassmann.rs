//! Exact arithmetic in the complex Grassmann algebra on `2n` generators.
//!
//! The algebra for `n` fermionic sites is generated by the anticommuting pairs
//! `θ̄_1 … θ̄_n, θ_1 … θ_n`. Every pointwise anticommutator vanishes,
//! `{θ_i, θ_j} = {θ̄_i, θ̄_j} = {θ_i, θ̄_j} = 0`; the canonical `δ_ij` appears
//! only under the star product built in [`crate::star`].
//!
//! A monomial is a bitmask over the canonical slot order
//! `θ̄_1 < θ̄_2 < … < θ̄_n < θ_1 < … < θ_n`. Elements are sparse maps from
//! monomials to complex coefficients; any reordering performed while merging
//! monomials contributes only a sign to the coefficient, so all operations
//! here are sign-exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of sites (monomial masks are stored in a `u32`).
pub const MAX_SITES: usize = 16;

/// Whether a generator is a conjugated (`θ̄`) or plain (`θ`) variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `θ̄_i`
    Bar,
    /// `θ_i`
    Unbar,
}

/// One of the `2n` generators, addressed by kind and 1-based site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorIndex {
    pub kind: GeneratorKind,
    pub site: usize,
}

impl GeneratorIndex {
    pub fn bar(site: usize) -> Self {
        Self { kind: GeneratorKind::Bar, site }
    }

    pub fn unbar(site: usize) -> Self {
        Self { kind: GeneratorKind::Unbar, site }
    }

    /// Slot in the canonical order: bars occupy `0..n`, unbars `n..2n`.
    pub fn slot(&self, n: usize) -> usize {
        match self.kind {
            GeneratorKind::Bar => self.site - 1,
            GeneratorKind::Unbar => n + self.site - 1,
        }
    }

    fn from_slot(slot: usize, n: usize) -> Self {
        if slot < n {
            Self::bar(slot + 1)
        } else {
            Self::unbar(slot - n + 1)
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.site == 0 || self.site > n {
            Err(Error::SiteOutOfRange { site: self.site, n })
        } else {
            Ok(())
        }
    }

    /// ASCII token used by the parser, printer and JSON format.
    pub fn token(&self) -> String {
        match self.kind {
            GeneratorKind::Bar => format!("tb{}", self.site),
            GeneratorKind::Unbar => format!("t{}", self.site),
        }
    }

    /// The conjugate generator `θ_i ↔ θ̄_i`.
    pub fn conjugate(&self) -> Self {
        let kind = match self.kind {
            GeneratorKind::Bar => GeneratorKind::Unbar,
            GeneratorKind::Unbar => GeneratorKind::Bar,
        };
        Self { kind, site: self.site }
    }
}

/// An ordered product of distinct generators, stored as a slot bitmask.
///
/// The empty mask is the unit monomial `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains_slot(self, slot: usize) -> bool {
        self.0 >> slot & 1 == 1
    }

    /// Generators in canonical (ascending slot) order.
    pub fn generators(self, n: usize) -> Vec<GeneratorIndex> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        let mut bits = self.0;
        while bits != 0 {
            let slot = bits.trailing_zeros() as usize;
            out.push(GeneratorIndex::from_slot(slot, n));
            bits &= bits - 1;
        }
        out
    }

    /// Space-separated token string in canonical order; the unit monomial is `""`.
    pub fn token_string(self, n: usize) -> String {
        self.generators(n)
            .iter()
            .map(GeneratorIndex::token)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Sign of merging two disjoint monomials `a·b` into canonical order:
/// `(-1)^{#\{(s,t): s ∈ a, t ∈ b, s > t\}}`.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let slot = bits.trailing_zeros();
        inversions += (a >> (slot + 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn parity_sign(count: u32) -> f64 {
    if count % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Grassmann parity of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// Not homogeneous.
    Mixed,
}

/// A sparse complex linear combination of canonical monomials.
///
/// Zero coefficients are never stored, so derived equality is exact equality
/// of the algebra elements. Tolerance-based comparison for matrix-backed
/// oracle paths goes through [`GrassmannElement::max_coeff_diff`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    n: usize,
    terms: BTreeMap<u32, Complex64>,
}

impl GrassmannElement {
    /// The zero element of the `n`-site algebra.
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_SITES, "at most {MAX_SITES} sites are supported");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut e = Self::zero(n);
        e.add_term(Monomial::ONE, c);
        e
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, Complex64::new(1.0, 0.0))
    }

    pub fn generator(n: usize, g: GeneratorIndex) -> Result<Self> {
        g.check(n)?;
        let mut e = Self::zero(n);
        e.add_term(Monomial(1 << g.slot(n)), Complex64::new(1.0, 0.0));
        Ok(e)
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut e = Self::zero(n);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Number of fermionic sites (the algebra has `2n` generators).
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (Monomial(m), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m.0).copied().unwrap_or_default()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeff(Monomial::ONE)
    }

    /// Adds `c` to the coefficient of `m`, pruning exact zeros.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::ZERO {
            return;
        }
        let entry = self.terms.entry(m.0).or_insert(Complex64::ZERO);
        *entry += c;
        if *entry == Complex64::ZERO {
            self.terms.remove(&m.0);
        }
    }

    fn check_dimension(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch { left: self.n, right: other.n })
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::ZERO {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(&m, &v)| (m, v * c)).collect(),
        }
    }

    /// Pointwise Grassmann product. Bilinear; monomials sharing a slot
    /// multiply to zero; the merge permutation contributes the sign.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dimension(other)?;
        let mut out = Self::zero(self.n);
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                out.add_term(Monomial(ma | mb), ca * cb * merge_sign(ma, mb));
            }
        }
        Ok(out)
    }

    /// Left Berezin derivative `∂/∂g` acting from the left: anticommute `g`
    /// to the front and delete it.
    pub fn left_derivative(&self, g: GeneratorIndex) -> Result<Self> {
        g.check(self.n)?;
        let slot = g.slot(self.n);
        let bit = 1u32 << slot;
        let below = bit - 1;
        let mut out = Self::zero(self.n);
        for (&m, &c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let sign = parity_sign((m & below).count_ones());
            out.add_term(Monomial(m & !bit), c * sign);
        }
        Ok(out)
    }

    /// Right derivative `g` acting from the right: anticommute `g` to the
    /// back and delete it.
    pub fn right_derivative(&self, g: GeneratorIndex) -> Result<Self> {
        g.check(self.n)?;
        let slot = g.slot(self.n);
        let bit = 1u32 << slot;
        let mut out = Self::zero(self.n);
        for (&m, &c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let sign = parity_sign((m >> (slot + 1)).count_ones());
            out.add_term(Monomial(m & !bit), c * sign);
        }
        Ok(out)
    }

    /// Berezin integral `∫dg`: `∫dg 1 = 0`, `∫dg g = 1`. Coincides with the
    /// left derivative.
    pub fn berezin_integrate(&self, g: GeneratorIndex) -> Result<Self> {
        self.left_derivative(g)
    }

    /// Full Berezin measure `∫ Π_i dθ̄_i dθ_i`, innermost (rightmost)
    /// differential first: integrates `θ_n, θ̄_n, …, θ_1, θ̄_1`.
    pub fn integrate_measure(&self) -> Self {
        let mut acc = self.clone();
        for site in (1..=self.n).rev() {
            acc = acc
                .berezin_integrate(GeneratorIndex::unbar(site))
                .and_then(|a| a.berezin_integrate(GeneratorIndex::bar(site)))
                .expect("sites are in range by construction");
        }
        acc
    }

    /// Antilinear anti-automorphism: swaps `θ_i ↔ θ̄_i`, reverses each
    /// monomial (contributing the reversal sign) and conjugates coefficients.
    pub fn involution(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (&m, &c) in &self.terms {
            // Swapped generators in reversed factor order, then sorted back
            // into canonical order; the permutation parity is the sign.
            let mut slots: Vec<usize> = Vec::with_capacity(m.count_ones() as usize);
            let mut bits = m;
            while bits != 0 {
                let slot = bits.trailing_zeros() as usize;
                let swapped = if slot < n { slot + n } else { slot - n };
                slots.push(swapped);
                bits &= bits - 1;
            }
            slots.reverse();
            let mut inversions = 0usize;
            for i in 0..slots.len() {
                for j in i + 1..slots.len() {
                    if slots[i] > slots[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let mut mask = 0u32;
            for s in &slots {
                mask |= 1 << s;
            }
            out.add_term(Monomial(mask), c.conj() * sign);
        }
        out
    }

    /// `exp(a)` for a nilpotent `a` with vanishing scalar part. The series
    /// terminates after at most `2n` powers.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        let s = self.scalar_part();
        if s != Complex64::ZERO {
            return Err(Error::NonzeroScalarPart(s));
        }
        let mut acc = Self::one(self.n);
        let mut term = Self::one(self.n);
        for k in 1..=2 * self.n {
            term = term.multiply(self)?.scale(Complex64::new(1.0 / k as f64, 0.0));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for (&m, _) in &self.terms {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (false, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    /// Even/odd split by monomial bit-count parity; `self = even + odd`.
    pub fn parity_parts(&self) -> (Self, Self) {
        let mut even = Self::zero(self.n);
        let mut odd = Self::zero(self.n);
        for (&m, &c) in &self.terms {
            if m.count_ones() % 2 == 0 {
                even.add_term(Monomial(m), c);
            } else {
                odd.add_term(Monomial(m), c);
            }
        }
        (even, odd)
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference against `other`; the residual used by
    /// all matrix-backed oracle comparisons.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut masks: Vec<u32> = self.terms.keys().copied().collect();
        masks.extend(other.terms.keys());
        masks
            .into_iter()
            .map(|m| (self.coeff(Monomial(m)) - other.coeff(Monomial(m))).norm())
            .fold(0.0, f64::max)
    }

    /// Drops coefficients with magnitude at or below `tol` (used when an
    /// element came out of a floating-point matrix path).
    pub fn prune(&self, tol: f64) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(&m, &c)| (m, c))
                .collect(),
        }
    }

    /// Reinterprets the element in a larger algebra with `new_n ≥ n` sites.
    pub fn extend(&self, new_n: usize) -> Self {
        assert!(new_n >= self.n && new_n <= MAX_SITES);
        let low = if self.n == 0 { 0 } else { (1u32 << self.n) - 1 };
        let mut out = Self::zero(new_n);
        for (&m, &c) in &self.terms {
            let bar = m & low;
            let unbar = m >> self.n;
            out.add_term(Monomial(bar | (unbar << new_n)), c);
        }
        out
    }

    /// Reinterprets the element in a smaller algebra with `new_n ≤ n` sites.
    /// Fails if any monomial touches a site beyond `new_n`.
    pub fn restrict(&self, new_n: usize) -> Result<Self> {
        assert!(new_n <= self.n);
        let low_keep = (1u32 << new_n) - 1;
        let bar_all = (1u32 << self.n) - 1;
        let mut out = Self::zero(new_n);
        for (&m, &c) in &self.terms {
            let bar = m & bar_all;
            let unbar = m >> self.n;
            if bar & !low_keep != 0 || unbar & !low_keep != 0 {
                return Err(Error::NotRestrictable { target: new_n });
            }
            out.add_term(Monomial(bar | (unbar << new_n)), c);
        }
        Ok(out)
    }

    /// Element with every coefficient drawn uniformly from the complex unit
    /// square; dense over all `4^n` monomials.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut e = Self::zero(n);
        for mask in 0u32..1 << (2 * n) {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            e.add_term(Monomial(mask), c);
        }
        e
    }

    /// Random element of homogeneous parity.
    pub fn random_with_parity<R: Rng + ?Sized>(n: usize, even: bool, rng: &mut R) -> Self {
        let mut e = Self::zero(n);
        for mask in 0u32..1 << (2 * n) {
            if (mask.count_ones() % 2 == 0) != even {
                continue;
            }
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            e.add_term(Monomial(mask), c);
        }
        e
    }

    /// JSON wire form: `{"n": N, "terms": [{"mono": "tb1 t1", "re": x, "im": y}, …]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ElementJson::from(self)).expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: ElementJson =
            serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        wire.try_into()
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;

    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        assert_eq!(self.n, rhs.n, "dimension mismatch in +");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(Monomial(m), c);
        }
        out
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;

    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        assert_eq!(self.n, rhs.n, "dimension mismatch in -");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(Monomial(m), -c);
        }
        out
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;

    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;

    fn mul(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.multiply(rhs).expect("dimension mismatch in *")
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Formats a complex scalar so that the canonical printer stays reparseable:
/// `2`, `-0.5`, `i`, `-2i` or `(a+bi)`.
fn fmt_scalar(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 {
        match c.im {
            1.0 => "i".to_string(),
            -1.0 => "-i".to_string(),
            im => format!("{}i", fmt_f64(im)),
        }
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_f64(c.re), fmt_f64(-c.im))
    } else {
        format!("({}+{}i)", fmt_f64(c.re), fmt_f64(c.im))
    }
}

impl fmt::Display for GrassmannElement {
    /// Canonical text form: terms ordered by (degree, mask), e.g.
    /// `1 - 0.5 tb1 t1 + (1+2i) tb2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<u32> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), *m));
        for (idx, m) in keys.iter().enumerate() {
            let c = self.terms[m];
            let mono = Monomial(*m).token_string(self.n);
            // Pull a plain sign out of purely real/imaginary coefficients.
            let (neg, mag) = if c.im == 0.0 && c.re < 0.0 {
                (true, Complex64::new(-c.re, 0.0))
            } else if c.re == 0.0 && c.im < 0.0 {
                (true, Complex64::new(0.0, -c.im))
            } else {
                (false, c)
            };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = mag == Complex64::new(1.0, 0.0);
            if mono.is_empty() {
                write!(f, "{}", fmt_scalar(mag))?;
            } else if coeff_is_one {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{} {mono}", fmt_scalar(mag))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    mono: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl From<&GrassmannElement> for ElementJson {
    fn from(e: &GrassmannElement) -> Self {
        ElementJson {
            n: e.n,
            terms: e
                .terms
                .iter()
                .map(|(&m, &c)| TermJson {
                    mono: Monomial(m).token_string(e.n),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<ElementJson> for GrassmannElement {
    type Error = Error;

    fn try_from(wire: ElementJson) -> Result<Self> {
        if wire.n > MAX_SITES {
            return Err(Error::TooManySites(wire.n));
        }
        let mut e = GrassmannElement::zero(wire.n);
        for term in &wire.terms {
            let m = parse_mono_tokens(&term.mono, wire.n)?;
            e.add_term(m, Complex64::new(term.re, term.im));
        }
        Ok(e)
    }
}

/// Parses a canonical monomial token string (`"tb1 t2"`, `""` or `"1"`).
/// Tokens must appear in strictly ascending slot order with no repeats.
pub fn parse_mono_tokens(s: &str, n: usize) -> Result<Monomial> {
    let mut mask = 0u32;
    let mut last_slot: Option<usize> = None;
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let g = parse_generator_token(tok, n)?;
        let slot = g.slot(n);
        if let Some(prev) = last_slot {
            if slot <= prev {
                return Err(Error::Json(format!(
                    "monomial `{s}` is not in canonical order"
                )));
            }
        }
        last_slot = Some(slot);
        mask |= 1 << slot;
    }
    Ok(Monomial(mask))
}

fn parse_generator_token(tok: &str, n: usize) -> Result<GeneratorIndex> {
    let (kind, digits) = if let Some(rest) = tok.strip_prefix("tb") {
        (GeneratorKind::Bar, rest)
    } else if let Some(rest) = tok.strip_prefix('t') {
        (GeneratorKind::Unbar, rest)
    } else {
        return Err(Error::Json(format!("unknown generator token `{tok}`")));
    };
    let site: usize = digits
        .parse()
        .map_err(|_| Error::Json(format!("unknown generator token `{tok}`")))?;
    let g = GeneratorIndex { kind, site };
    g.check(n)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn theta(n: usize, i: usize) -> GrassmannElement {
        GrassmannElement::generator(n, GeneratorIndex::unbar(i)).unwrap()
    }

    fn theta_bar(n: usize, i: usize) -> GrassmannElement {
        GrassmannElement::generator(n, GeneratorIndex::bar(i)).unwrap()
    }

    #[test]
    fn nilpotency_of_generators() {
        let t1 = theta(2, 1);
        assert!(t1.multiply(&t1).unwrap().is_zero());
    }

    #[test]
    fn transposition_gives_a_sign() {
        // θ_2 · θ_1 = -(θ_1 θ_2)
        let n = 2;
        let prod = theta(n, 2).multiply(&theta(n, 1)).unwrap();
        let canonical = theta(n, 1).multiply(&theta(n, 2)).unwrap();
        assert_eq!(prod, canonical.scale(c(-1.0, 0.0)));
        assert_eq!(prod.terms.len(), 1);
        assert_eq!(prod.coeff(Monomial(0b1100)), c(-1.0, 0.0));
    }

    #[test]
    fn projector_like_product_cancels() {
        // (1 + θ̄_1θ_1)(1 - θ̄_1θ_1) = 1 since (θ̄_1θ_1)² = 0
        let n = 1;
        let tb_t = theta_bar(n, 1).multiply(&theta(n, 1)).unwrap();
        let a = &GrassmannElement::one(n) + &tb_t;
        let b = &GrassmannElement::one(n) - &tb_t;
        assert_eq!(a.multiply(&b).unwrap(), GrassmannElement::one(n));
    }

    #[test]
    fn left_derivative_basics() {
        let n = 1;
        // ∂/∂θ_1 (θ_1) = 1
        let d = theta(n, 1).left_derivative(GeneratorIndex::unbar(1)).unwrap();
        assert_eq!(d, GrassmannElement::one(n));
        // ∂/∂θ_1 (1) = 0
        let d = GrassmannElement::one(n)
            .left_derivative(GeneratorIndex::unbar(1))
            .unwrap();
        assert!(d.is_zero());
        // ∂/∂θ_1 (θ̄_1 θ_1) = -θ̄_1 (one occupied slot precedes θ_1)
        let tb_t = theta_bar(n, 1).multiply(&theta(n, 1)).unwrap();
        let d = tb_t.left_derivative(GeneratorIndex::unbar(1)).unwrap();
        assert_eq!(d, theta_bar(n, 1).scale(c(-1.0, 0.0)));
    }

    #[test]
    fn right_derivative_basics() {
        let n = 1;
        let d = theta(n, 1).right_derivative(GeneratorIndex::unbar(1)).unwrap();
        assert_eq!(d, GrassmannElement::one(n));
        // (θ̄_1 θ_1) ←∂/∂θ_1 = θ̄_1 (no slots follow θ_1)
        let tb_t = theta_bar(n, 1).multiply(&theta(n, 1)).unwrap();
        let d = tb_t.right_derivative(GeneratorIndex::unbar(1)).unwrap();
        assert_eq!(d, theta_bar(n, 1));
        let d = GrassmannElement::one(n)
            .right_derivative(GeneratorIndex::unbar(1))
            .unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn berezin_measure_normalization() {
        let n = 1;
        // ∫dθ̄ dθ (θ θ̄) = 1: forced by ⟨θ|θ⟩ = 1 and the identity resolution.
        let t_tb = theta(n, 1).multiply(&theta_bar(n, 1)).unwrap();
        assert_eq!(t_tb.integrate_measure(), GrassmannElement::one(n));
        // ∫dθ 1 = 0 and the iterated version.
        assert!(GrassmannElement::one(n)
            .berezin_integrate(GeneratorIndex::unbar(1))
            .unwrap()
            .is_zero());
        assert!(GrassmannElement::one(n).integrate_measure().is_zero());
    }

    #[test]
    fn involution_basics() {
        let n = 1;
        assert_eq!(theta(n, 1).involution(), theta_bar(n, 1));
        let e = GrassmannElement::scalar(n, c(1.0, 2.0));
        assert_eq!(e.involution(), GrassmannElement::scalar(n, c(1.0, -2.0)));
        // θ̄_1θ_1 is self-conjugate: swap gives θ_1θ̄_1, reversal restores order.
        let tb_t = theta_bar(n, 1).multiply(&theta(n, 1)).unwrap();
        assert_eq!(tb_t.involution(), tb_t);
    }

    #[test]
    fn involution_is_an_involution() {
        let mut rng = crate::seeded_rng(7);
        for _ in 0..20 {
            let a = GrassmannElement::random(2, &mut rng);
            assert_eq!(a.involution().involution(), a);
        }
    }

    #[test]
    fn involution_antiautomorphism() {
        let mut rng = crate::seeded_rng(11);
        for _ in 0..20 {
            let a = GrassmannElement::random(2, &mut rng);
            let b = GrassmannElement::random(2, &mut rng);
            let lhs = a.multiply(&b).unwrap().involution();
            let rhs = b.involution().multiply(&a.involution()).unwrap();
            assert!(lhs.max_coeff_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn exp_nilpotent_basics() {
        let n = 2;
        assert_eq!(
            GrassmannElement::zero(n).exp_nilpotent().unwrap(),
            GrassmannElement::one(n)
        );
        // exp(-½ θ̄_1θ_1) = 1 - ½ θ̄_1θ_1
        let x = theta_bar(n, 1)
            .multiply(&theta(n, 1))
            .unwrap()
            .scale(c(-0.5, 0.0));
        let e = x.exp_nilpotent().unwrap();
        assert_eq!(e, &GrassmannElement::one(n) + &x);
        // exp(θ̄_1θ_1 + θ̄_2θ_2) picks up the quartic cross term.
        let x1 = theta_bar(n, 1).multiply(&theta(n, 1)).unwrap();
        let x2 = theta_bar(n, 2).multiply(&theta(n, 2)).unwrap();
        let e = (&x1 + &x2).exp_nilpotent().unwrap();
        let expected = &(&(&GrassmannElement::one(n) + &x1) + &x2)
            + &x1.multiply(&x2).unwrap();
        assert_eq!(e, expected);
    }

    #[test]
    fn exp_rejects_scalar_part() {
        let e = GrassmannElement::one(1);
        assert!(matches!(
            e.exp_nilpotent(),
            Err(Error::NonzeroScalarPart(_))
        ));
    }

    #[test]
    fn exp_inverse_for_even_nilpotent() {
        let mut rng = crate::seeded_rng(3);
        for _ in 0..10 {
            let mut a = GrassmannElement::random_with_parity(2, true, &mut rng);
            a.add_term(Monomial::ONE, -a.scalar_part());
            let e = a.exp_nilpotent().unwrap();
            let e_inv = a.scale(c(-1.0, 0.0)).exp_nilpotent().unwrap();
            let prod = e.multiply(&e_inv).unwrap();
            assert!(prod.max_coeff_diff(&GrassmannElement::one(2)) < 1e-12);
        }
    }

    #[test]
    fn parity_classification() {
        let n = 1;
        assert_eq!(GrassmannElement::one(n).parity(), Parity::Even);
        assert_eq!(theta(n, 1).parity(), Parity::Odd);
        assert_eq!((&GrassmannElement::one(n) + &theta(n, 1)).parity(), Parity::Mixed);
        // Degenerate n = 0: the algebra is the scalars.
        assert_eq!(GrassmannElement::one(0).parity(), Parity::Even);
    }

    #[test]
    fn zero_site_algebra_is_scalars() {
        let a = GrassmannElement::scalar(0, c(2.0, 1.0));
        let b = GrassmannElement::scalar(0, c(0.0, 1.0));
        assert_eq!(a.multiply(&b).unwrap(), GrassmannElement::scalar(0, c(-1.0, 2.0)));
        assert_eq!(a.integrate_measure(), a);
        assert_eq!(a.involution(), GrassmannElement::scalar(0, c(2.0, -1.0)));
    }

    #[test]
    fn graded_leibniz_rule() {
        // ∂(ab) = (∂a)b + (-1)^{|a|} a(∂b) for homogeneous a.
        let mut rng = crate::seeded_rng(19);
        let n = 2;
        for _ in 0..20 {
            for a_even in [false, true] {
                let a = GrassmannElement::random_with_parity(n, a_even, &mut rng);
                let b = GrassmannElement::random(n, &mut rng);
                for g in [GeneratorIndex::unbar(1), GeneratorIndex::bar(2)] {
                    let lhs = a.multiply(&b).unwrap().left_derivative(g).unwrap();
                    let sign = if a_even { 1.0 } else { -1.0 };
                    let rhs = &a.left_derivative(g).unwrap().multiply(&b).unwrap()
                        + &a.multiply(&b.left_derivative(g).unwrap()).unwrap().scale(c(sign, 0.0));
                    assert!(lhs.max_coeff_diff(&rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut rng = crate::seeded_rng(23);
        for n in [0usize, 1, 2, 3] {
            let e = GrassmannElement::random(n, &mut rng);
            let back = GrassmannElement::from_json(&e.to_json()).unwrap();
            assert_eq!(e, back);
        }
    }

    #[test]
    fn json_rejects_bad_monomials() {
        assert!(GrassmannElement::from_json(
            r#"{"n":1,"terms":[{"mono":"tb2","re":1.0,"im":0.0}]}"#
        )
        .is_err());
        assert!(GrassmannElement::from_json(
            r#"{"n":2,"terms":[{"mono":"t1 tb1","re":1.0,"im":0.0}]}"#
        )
        .is_err());
        assert!(GrassmannElement::from_json(
            r#"{"n":2,"terms":[{"mono":"t1 t1","re":1.0,"im":0.0}]}"#
        )
        .is_err());
    }

    #[test]
    fn restrict_and_extend_round_trip() {
        let mut rng = crate::seeded_rng(29);
        let e = GrassmannElement::random(2, &mut rng);
        let big = e.extend(4);
        assert_eq!(big.restrict(2).unwrap(), e);
        // An element touching site 3 cannot be restricted to 2 sites.
        let t3 = theta(3, 3);
        assert!(t3.restrict(2).is_err());
    }

    #[test]
    fn display_round_trips_through_scalar_formats() {
        let e = GrassmannElement::from_terms(
            2,
            [
                (Monomial::ONE, c(1.0, 0.0)),
                (Monomial(0b0001), c(0.0, -1.0)),
                (Monomial(0b0110), c(-0.5, 0.0)),
                (Monomial(0b1111), c(1.5, 2.5)),
            ],
        );
        assert_eq!(e.to_string(), "1 - i tb1 - 0.5 tb2 t1 + (1.5+2.5i) tb1 tb2 t1 t2");
        assert_eq!(GrassmannElement::zero(1).to_string(), "0");
    }
}
