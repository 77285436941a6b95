//! Double-double arithmetic (about 106 significant bits), used where the
//! Ei power series cancels heavily.

use std::ops::{Add, Mul};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs_f64(self) -> f64 {
        self.hi.abs()
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self + Dd::from_f64(q1).mul_f64(-b);
        let q2 = r.hi / b;
        let r = r + Dd::from_f64(q2).mul_f64(-b);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl Add for Dd {
    type Output = Dd;

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Mul for Dd {
    type Output = Dd;

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn from_f64(re: f64, im: f64) -> Self {
        CDd { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    /// Multiply by an ordinary complex `(c, d)`.
    pub fn mul_c64(self, c: f64, d: f64) -> CDd {
        let re = self.re.mul_f64(c) + self.im.mul_f64(-d);
        let im = self.re.mul_f64(d) + self.im.mul_f64(c);
        CDd { re, im }
    }

    pub fn div_f64(self, k: f64) -> CDd {
        CDd { re: self.re.div_f64(k), im: self.im.div_f64(k) }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re + o.re, im: self.im + o.im }
    }

    pub fn norm_f64(self) -> f64 {
        self.re.abs_f64().hypot(self.im.abs_f64())
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_low_order_bits() {
        let a = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        let b = a + Dd::from_f64(-1.0);
        assert_eq!(b.to_f64(), 1e-20);
        let third = Dd::from_f64(1.0).div_f64(3.0);
        let back = third.mul_f64(3.0) + Dd::from_f64(-1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let sq = third * third + Dd::from_f64(-1.0 / 9.0);
        assert!(sq.to_f64().abs() < 1e-17);
    }
}
