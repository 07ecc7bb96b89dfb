use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::interval::{trig_enclosure, EmbeddedInterval};
use super::rational::Rational;
use super::ArithError;

pub type Coeffs = SmallVec<[Rational; 4]>;

const BASE_BITS: u32 = 128;

/// Which coordinate of the complex embedding ζ_n ↦ exp(2πi/n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Real,
    Imaginary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// The cyclotomic field Q(ζ_n) in the power basis 1, ζ, …, ζ^(d-1).
#[derive(Debug)]
pub struct FieldSpec {
    conductor: u32,
    degree: usize,
    /// Monic Φ_n, lowest degree first.
    cyclotomic: Vec<i64>,
    /// ζ^k reduced to the power basis, for k in 0..2d-1.
    powers: Vec<Vec<i64>>,
    /// ζ^(-k) reduced to the power basis, for k in 0..d.
    conj_table: Vec<Vec<i64>>,
    cos_base: Vec<EmbeddedInterval>,
    sin_base: Vec<EmbeddedInterval>,
    cos_f64: Vec<f64>,
    sin_f64: Vec<f64>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor
    }
}

impl Eq for FieldSpec {}

fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // Both integer polynomials, den monic.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn cyclotomic_poly(n: u32, memo: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_poly(d, memo);
            num = poly_divide_exact(&num, &phi_d);
        }
    }
    memo.insert(n, num.clone());
    num
}

/// x^k modulo a monic integer polynomial of degree d.
fn reduce_power(k: usize, modulus: &[i64]) -> Vec<i64> {
    let d = modulus.len() - 1;
    let mut v = vec![0i64; d];
    if k < d {
        v[k] = 1;
        return v;
    }
    // Multiply by x repeatedly, starting from x^(d-1).
    v[d - 1] = 1;
    for _ in d..=k {
        let top = v[d - 1];
        for i in (1..d).rev() {
            v[i] = v[i - 1];
        }
        v[0] = 0;
        for i in 0..d {
            v[i] -= top * modulus[i];
        }
    }
    v
}

fn totient(mut n: u32) -> usize {
    let mut result = n as usize;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p as usize;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n as usize;
    }
    result
}

impl FieldSpec {
    fn build(conductor: u32) -> FieldSpec {
        let mut memo = HashMap::new();
        let cyclotomic = cyclotomic_poly(conductor, &mut memo);
        let degree = cyclotomic.len() - 1;
        debug_assert_eq!(degree, totient(conductor));
        let powers = (0..2 * degree - 1).map(|k| reduce_power(k, &cyclotomic)).collect();
        let n = conductor as usize;
        let conj_table = (0..degree).map(|k| reduce_power((n - k % n) % n, &cyclotomic)).collect();
        let mut cos_base = Vec::with_capacity(degree);
        let mut sin_base = Vec::with_capacity(degree);
        for k in 0..degree {
            let (c, s) = trig_enclosure(conductor, k as i64, BASE_BITS);
            cos_base.push(c);
            sin_base.push(s);
        }
        let mid = |iv: &EmbeddedInterval| iv.midpoint().to_f64().unwrap();
        let cos_f64 = cos_base.iter().map(mid).collect();
        let sin_f64 = sin_base.iter().map(mid).collect();
        FieldSpec { conductor, degree, cyclotomic, powers, conj_table, cos_base, sin_base, cos_f64, sin_f64 }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of Φ_n, lowest degree first.
    pub fn cyclotomic(&self) -> &[i64] {
        &self.cyclotomic
    }

    fn trig(&self, k: usize, bits: u32) -> (EmbeddedInterval, EmbeddedInterval) {
        if bits <= BASE_BITS {
            (self.cos_base[k].clone(), self.sin_base[k].clone())
        } else {
            trig_enclosure(self.conductor, k as i64, bits)
        }
    }
}

static REGISTRY: OnceLock<Mutex<HashMap<u32, Arc<FieldSpec>>>> = OnceLock::new();

/// The shared spec for Q(ζ_n). Panics on `conductor == 0`.
pub fn field_make(conductor: u32) -> Arc<FieldSpec> {
    assert!(conductor >= 1, "conductor must be positive");
    let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = reg.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(conductor).or_insert_with(|| Arc::new(FieldSpec::build(conductor))).clone()
}

#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Coeffs,
}

impl FieldElement {
    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        FieldElement { spec: spec.clone(), coeffs: (0..spec.degree).map(|_| Rational::zero()).collect() }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Self::from_rational(spec, Rational::one())
    }

    pub fn from_rational(spec: &Arc<FieldSpec>, r: Rational) -> Self {
        let mut e = Self::zero(spec);
        e.coeffs[0] = r;
        e
    }

    pub fn from_int(spec: &Arc<FieldSpec>, n: i64) -> Self {
        Self::from_rational(spec, Rational::from_int(n))
    }

    /// ζ_n^k for any integer k.
    pub fn zeta(spec: &Arc<FieldSpec>, k: i64) -> Self {
        let n = spec.conductor as i64;
        let mut c = vec![Rational::zero(); n as usize];
        c[k.rem_euclid(n) as usize] = Rational::one();
        Self::from_poly(spec, &c)
    }

    /// Σ c_k ζ^k for a coefficient list of any length, reduced.
    pub fn from_poly(spec: &Arc<FieldSpec>, c: &[Rational]) -> Self {
        let n = spec.conductor as usize;
        let d = spec.degree;
        let mut folded = vec![Rational::zero(); n.max(d)];
        for (k, ck) in c.iter().enumerate() {
            let slot = &mut folded[k % n.max(1)];
            *slot = &*slot + ck;
        }
        let mut out: Coeffs = (0..d).map(|_| Rational::zero()).collect();
        for (k, ck) in folded.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let row = reduce_power(k, &spec.cyclotomic);
            for (o, r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o = &*o + &(ck * &Rational::from_int(r));
                }
            }
        }
        FieldElement { spec: spec.clone(), coeffs: out }
    }

    pub fn from_coeffs(spec: &Arc<FieldSpec>, coeffs: Coeffs) -> Result<Self, ArithError> {
        if coeffs.len() != spec.degree {
            return Err(ArithError::BadLength { expected: spec.degree, found: coeffs.len() });
        }
        Ok(FieldElement { spec: spec.clone(), coeffs })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    fn same_field(&self, other: &Self) -> Result<(), ArithError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec.conductor == other.spec.conductor {
            Ok(())
        } else {
            Err(ArithError::SpecMismatch(self.spec.conductor, other.spec.conductor))
        }
    }

    fn add_impl(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        FieldElement { spec: self.spec.clone(), coeffs }
    }

    fn sub_impl(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        FieldElement { spec: self.spec.clone(), coeffs }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let d = self.spec.degree;
        let mut conv: SmallVec<[Rational; 8]> = (0..2 * d - 1).map(|_| Rational::zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] = &conv[i + j] + &(a * b);
                }
            }
        }
        let mut out: Coeffs = conv.drain(..d).collect();
        for (k, ck) in conv.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.spec.powers[k + d]) {
                if r != 0 {
                    *o = &*o + &(ck * &Rational::from_int(r));
                }
            }
        }
        FieldElement { spec: self.spec.clone(), coeffs: out }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * r).collect();
        FieldElement { spec: self.spec.clone(), coeffs }
    }

    /// Multiplicative inverse by Gaussian elimination on the matrix of
    /// multiplication by `self`.
    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let d = self.spec.degree;
        let zeta = FieldElement::zeta(&self.spec, 1);
        // Column j holds self·ζ^j; augmented with e_0.
        let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); d + 1]; d];
        let mut col = self.clone();
        for j in 0..d {
            for i in 0..d {
                m[i][j] = col.coeffs[i].clone();
            }
            col = col.mul_impl(&zeta);
        }
        m[0][d] = Rational::one();
        for c in 0..d {
            let p = (c..d).find(|&r| !m[r][c].is_zero()).ok_or(ArithError::DivisionByZero)?;
            m.swap(c, p);
            let pinv = m[c][c].recip();
            for k in c..=d {
                m[c][k] = &m[c][k] * &pinv;
            }
            for r in 0..d {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in c..=d {
                        let t = &f * &m[c][k];
                        m[r][k] = &m[r][k] - &t;
                    }
                }
            }
        }
        let coeffs = m.into_iter().map(|row| row[d].clone()).collect();
        Ok(FieldElement { spec: self.spec.clone(), coeffs })
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Self {
        let d = self.spec.degree;
        let mut out: Coeffs = (0..d).map(|_| Rational::zero()).collect();
        for (k, ck) in self.coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.spec.conj_table[k]) {
                if r != 0 {
                    *o = &*o + &(ck * &Rational::from_int(r));
                }
            }
        }
        FieldElement { spec: self.spec.clone(), coeffs: out }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            base = base.mul_impl(&base);
            e >>= 1;
        }
        acc
    }

    /// Real and imaginary enclosures at roughly `bits` bits of precision.
    pub fn embed(&self, bits: u32) -> (EmbeddedInterval, EmbeddedInterval) {
        let zero = || EmbeddedInterval::point(BigRational::zero());
        let (mut re, mut im) = (zero(), zero());
        for (k, ck) in self.coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let (c, s) = self.spec.trig(k, bits);
            let q = ck.to_big();
            re = re.add(&c.scale(&q));
            im = im.add(&s.scale(&q));
        }
        (re, im)
    }

    /// Floating approximation; accurate to roughly machine precision.
    pub fn to_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, ck) in self.coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let a = ck.to_f64().unwrap_or_else(|| {
                let (iv, _) = FieldElement::from_rational(&self.spec, ck.clone()).embed(64);
                iv.midpoint().to_f64().unwrap_or(f64::NAN)
            });
            re += a * self.spec.cos_f64[k];
            im += a * self.spec.sin_f64[k];
        }
        (re, im)
    }

    fn float_filter(&self, part: Part) -> Option<i32> {
        let table = match part {
            Part::Real => &self.spec.cos_f64,
            Part::Imaginary => &self.spec.sin_f64,
        };
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for (k, ck) in self.coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let a = ck.to_f64()?;
            if a == 0.0 || !a.is_finite() {
                return None;
            }
            sum += a * table[k];
            mag += a.abs();
        }
        // Loose bound on conversion, table and summation error.
        let bound = mag * (self.spec.degree as f64 + 8.0) * 5e-16 + 1e-300;
        if sum > bound {
            Some(1)
        } else if sum < -bound {
            Some(-1)
        } else {
            None
        }
    }

    /// Exact sign of the chosen part of the complex embedding.
    pub fn sign(&self, part: Part) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(s) = self.float_filter(part) {
            return s;
        }
        let c = self.conj();
        let vanishes = match part {
            Part::Real => self.add_impl(&c).is_zero(),
            Part::Imaginary => self.sub_impl(&c).is_zero(),
        };
        if vanishes {
            return 0;
        }
        let mut bits = BASE_BITS;
        loop {
            let (re, im) = self.embed(bits);
            let iv = if part == Part::Real { re } else { im };
            if let Some(s) = iv.sign() {
                if s != 0 {
                    return s;
                }
            }
            bits *= 2;
        }
    }

    /// Compare real parts exactly.
    pub fn real_cmp(&self, other: &Self) -> Ordering {
        self.sub_impl(other).sign(Part::Real).cmp(&0)
    }

    /// Lexicographic order on (real part, imaginary part).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let d = self.sub_impl(other);
        d.sign(Part::Real).cmp(&0).then_with(|| d.sign(Part::Imaginary).cmp(&0))
    }

    pub fn is_real(&self) -> bool {
        self.sign(Part::Imaginary) == 0
    }

    /// Decimal approximation of one part with `digits` fractional digits.
    pub fn to_decimal(&self, part: Part, digits: usize) -> String {
        let bits = (digits as f64 * 3.33) as u32 + 32;
        let (re, im) = self.embed(bits);
        let iv = if part == Part::Real { re } else { im };
        format_decimal(&iv.midpoint(), digits)
    }
}

/// Round a rational to `digits` fractional decimal digits.
pub fn format_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let int_part = &abs / &scale;
    let frac_part = &abs % &scale;
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        let f = frac_part.to_string();
        s.push('.');
        s.push_str(&"0".repeat(digits - f.len()));
        s.push_str(&f);
    }
    s
}

/// Checked arithmetic entry point.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: Op) -> Result<FieldElement, ArithError> {
    a.same_field(b)?;
    Ok(match op {
        Op::Add => a.add_impl(b),
        Op::Sub => a.sub_impl(b),
        Op::Mul => a.mul_impl(b),
        Op::Div => a.mul_impl(&b.inv()?),
    })
}

/// Sign of the chosen part as -1, 0 or +1.
pub fn field_sign(a: &FieldElement, part: Part) -> i32 {
    a.sign(part)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.spec.conductor == other.spec.conductor && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.conductor.hash(state);
        self.coeffs.hash(state);
    }
}

/// Representation order on coefficient vectors; deterministic but not geometric.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.spec.conductor.cmp(&other.spec.conductor).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                assert_eq!(self.spec.conductor, rhs.spec.conductor, "field mismatch");
                self.$imp(rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let coeffs = self.coeffs.iter().map(|a| -a).collect();
        FieldElement { spec: self.spec.clone(), coeffs }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "Q({})[", self.spec.conductor)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]≈({re:.6}, {im:.6})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> FieldElement {
        let k = field_make(10);
        &FieldElement::zeta(&k, 1) + &FieldElement::zeta(&k, -1)
    }

    #[test]
    fn degrees_are_totients() {
        for (n, d) in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 4), (6, 2), (8, 4), (10, 4), (12, 4)] {
            assert_eq!(field_make(n).degree(), d, "n = {n}");
        }
    }

    #[test]
    fn zeta_to_the_n_is_one() {
        for n in [1u32, 3, 5, 6, 8, 10] {
            let k = field_make(n);
            assert_eq!(FieldElement::zeta(&k, 1).pow(n), FieldElement::one(&k));
        }
    }

    #[test]
    fn golden_ratio_identities() {
        let g = golden();
        let one = FieldElement::one(g.spec());
        assert_eq!(&g * &g, &g + &one);
        assert_eq!(g.sign(Part::Imaginary), 0);
        assert_eq!((&g - &one).sign(Part::Real), 1);
        let ginv = g.inv().unwrap();
        assert_eq!(ginv, &g - &one);
        let (re, _) = g.to_f64();
        assert!((re - 1.618033988749895).abs() < 1e-14);
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let a = FieldElement::one(&field_make(5));
        let z = FieldElement::zero(&field_make(5));
        assert_eq!(field_arith(&a, &z, Op::Div), Err(ArithError::DivisionByZero));
        let b = FieldElement::one(&field_make(6));
        assert!(matches!(field_arith(&a, &b, Op::Add), Err(ArithError::SpecMismatch(5, 6))));
    }

    #[test]
    fn conjugation_is_an_automorphism() {
        let k = field_make(10);
        let z = FieldElement::zeta(&k, 3);
        assert_eq!(z.conj(), FieldElement::zeta(&k, 7));
        assert_eq!((&z * &z.conj()), FieldElement::one(&k));
    }

    #[test]
    fn signs_of_tiny_differences() {
        // γ^-40 is about 4e-9 yet its sign is decided exactly.
        let g = golden();
        let tiny = g.inv().unwrap().pow(40);
        assert_eq!(tiny.sign(Part::Real), 1);
        assert_eq!((-&tiny).sign(Part::Real), -1);
        let q = field_make(6);
        let s3 = &FieldElement::zeta(&q, 1) * &FieldElement::from_int(&q, 2) - FieldElement::one(&q);
        // (2ζ₆ − 1) = i√3 is purely imaginary.
        assert_eq!(s3.sign(Part::Real), 0);
        assert_eq!(s3.sign(Part::Imaginary), 1);
    }

    #[test]
    fn decimal_formatting() {
        let g = golden();
        assert_eq!(g.to_decimal(Part::Real, 10), "1.6180339887");
        let neg = -&g;
        assert_eq!(neg.to_decimal(Part::Real, 3), "-1.618");
        assert_eq!(format_decimal(&BigRational::new(1.into(), 8.into()), 2), "0.13");
    }
}
