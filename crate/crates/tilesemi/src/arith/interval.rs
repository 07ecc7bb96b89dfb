//! Certified rational enclosures of π, cos and sin at rational multiples of π.
//!
//! Everything is done in fixed point with a scale of `2^(bits + GUARD)` and an
//! explicit integer error budget, so the returned intervals are rigorous.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

const GUARD: u32 = 24;

/// Closed rational interval `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedInterval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl EmbeddedInterval {
    pub fn point(x: BigRational) -> Self {
        EmbeddedInterval { lower: x.clone(), upper: x }
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lower + &self.upper) / BigInt::from(2)
    }

    /// `Some(sign)` once zero is excluded (or the interval is the point 0).
    pub fn sign(&self) -> Option<i32> {
        if self.lower.is_positive() {
            Some(1)
        } else if self.upper.is_negative() {
            Some(-1)
        } else if self.lower.is_zero() && self.upper.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        EmbeddedInterval { lower: &self.lower + &other.lower, upper: &self.upper + &other.upper }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_negative() {
            EmbeddedInterval { lower: &self.upper * c, upper: &self.lower * c }
        } else {
            EmbeddedInterval { lower: &self.lower * c, upper: &self.upper * c }
        }
    }
}

/// Fixed-point value `(mid ± err) / 2^shift`.
struct Fixed {
    mid: BigInt,
    err: BigInt,
    shift: u32,
}

impl Fixed {
    fn to_interval(&self) -> EmbeddedInterval {
        let den = BigInt::one() << self.shift;
        EmbeddedInterval {
            lower: BigRational::new(&self.mid - &self.err, den.clone()),
            upper: BigRational::new(&self.mid + &self.err, den),
        }
    }
}

/// arctan(1/m) scaled by 2^shift, m ≥ 2.
fn arctan_recip(m: u32, shift: u32) -> Fixed {
    let scale = BigInt::one() << shift;
    let m = BigInt::from(m);
    let m2 = &m * &m;
    let mut power = m.clone();
    let mut sum = BigInt::zero();
    let mut err = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = &scale / (&power * BigInt::from(2 * k + 1));
        if term.is_zero() {
            // Alternating series with decreasing terms: the tail is below one unit.
            err += 1;
            break;
        }
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        err += 1;
        power *= &m2;
        k += 1;
    }
    Fixed { mid: sum, err, shift }
}

fn pi_fixed(shift: u32) -> Fixed {
    let a = arctan_recip(5, shift);
    let b = arctan_recip(239, shift);
    Fixed {
        mid: a.mid * 16 - b.mid * 4,
        err: a.err * 16 + b.err * 4,
        shift,
    }
}

/// Certified enclosure of π at roughly `bits` bits.
pub fn pi_enclosure(bits: u32) -> EmbeddedInterval {
    pi_fixed(bits + GUARD).to_interval()
}

/// Enclosures of `cos(2πk/n)` and `sin(2πk/n)` at roughly `bits` bits.
pub fn trig_enclosure(n: u32, k: i64, bits: u32) -> (EmbeddedInterval, EmbeddedInterval) {
    assert!(n >= 1);
    let n_i = n as i64;
    let mut k = k.rem_euclid(n_i);
    // Exact values where cheap; also keeps the argument in [-π, π].
    if k == 0 {
        let one = BigRational::one();
        return (EmbeddedInterval::point(one), EmbeddedInterval::point(BigRational::zero()));
    }
    if 2 * k == n_i {
        let m1 = -BigRational::one();
        return (EmbeddedInterval::point(m1), EmbeddedInterval::point(BigRational::zero()));
    }
    if 4 * k == n_i {
        return (EmbeddedInterval::point(BigRational::zero()), EmbeddedInterval::point(BigRational::one()));
    }
    if 4 * k == 3 * n_i {
        return (EmbeddedInterval::point(BigRational::zero()), EmbeddedInterval::point(-BigRational::one()));
    }
    if 2 * k > n_i {
        k -= n_i;
    }
    let shift = bits + GUARD;
    let pi = pi_fixed(shift);
    // θ = 2πk/n in units of 2^-shift: mid ± err.
    let num = BigInt::from(2 * k);
    let den = BigInt::from(n_i);
    let theta_mid = (&pi.mid * &num).div_floor(&den);
    let theta_err = (&pi.err * num.abs()).div_ceil(&den) + 1;

    // Taylor series at the rational point theta_mid / 2^shift.
    let scale = BigInt::one() << shift;
    let mut cos_sum = BigInt::zero();
    let mut sin_sum = BigInt::zero();
    let mut err_total = BigInt::zero();
    let mut term = scale.clone();
    let mut term_err = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        match j % 4 {
            0 => cos_sum += &term,
            1 => sin_sum += &term,
            2 => cos_sum -= &term,
            _ => sin_sum -= &term,
        }
        err_total += &term_err;
        j += 1;
        let next = (&term * &theta_mid) / (&scale * BigInt::from(j));
        // |θ| < 4, so the propagated error grows by at most 4/j per step.
        term_err = (&term_err * 4u32).div_ceil(&BigInt::from(j)) + 1;
        term = next;
        if term.is_zero() && j > 4 {
            // Lagrange remainder: below one unit plus the accumulated error.
            err_total += &term_err + 2;
            break;
        }
    }
    // Lipschitz widening for the uncertainty in θ itself.
    let err: BigInt = err_total + theta_err;
    let c = Fixed { mid: cos_sum, err: err.clone(), shift };
    let s = Fixed { mid: sin_sum, err, shift };
    (c.to_interval(), s.to_interval())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn approx(iv: &EmbeddedInterval) -> f64 {
        iv.midpoint().to_f64().unwrap()
    }

    #[test]
    fn pi_is_tight() {
        let iv = pi_enclosure(200);
        assert!((approx(&iv) - std::f64::consts::PI).abs() < 1e-15);
        let w = iv.width();
        assert!(w < BigRational::new(BigInt::one(), BigInt::one() << 190));
    }

    #[test]
    fn trig_matches_libm() {
        for n in [3u32, 5, 7, 8, 10, 12] {
            for k in 0..n as i64 {
                let (c, s) = trig_enclosure(n, k, 96);
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                assert!((approx(&c) - t.cos()).abs() < 1e-14, "cos {k}/{n}");
                assert!((approx(&s) - t.sin()).abs() < 1e-14, "sin {k}/{n}");
                assert!(c.width() < BigRational::new(BigInt::one(), BigInt::one() << 80));
            }
        }
    }

    #[test]
    fn enclosure_contains_exact_half() {
        // cos(2π/6) = 1/2 exactly.
        let (c, _) = trig_enclosure(6, 1, 64);
        assert!(c.contains(&BigRational::new(BigInt::one(), BigInt::from(2))));
    }
}
